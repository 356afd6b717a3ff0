#pragma once

#include "mvi/grid.hpp"

#include <vector>

namespace mvi::detail {

// Unnormalised forward DFT, X[k] = sum_n x[n] exp(-2 pi j n k / N).
std::vector<cplx> dft(const std::vector<cplx>& in);

// Unnormalised 2-D forward DFT of a row-major rows x cols array.
std::vector<cplx> dft2(const std::vector<cplx>& in, std::size_t rows, std::size_t cols);

} // namespace mvi::detail
