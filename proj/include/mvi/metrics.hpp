#pragma once

#include "mvi/grid.hpp"

#include <vector>

namespace mvi {

// Cells with |value| > threshold.
std::vector<bool> support_mask(const ComplexGrid& image, double threshold = 0.0);

// F1 of an estimated support against the truth; 1 when both are empty.
double support_f1(const std::vector<bool>& estimate, const std::vector<bool>& truth);

// |<a, b>| / (|a| |b|); 0 if either is all zeros.
double complex_correlation(const ComplexGrid& a, const ComplexGrid& b);

// |image - oracle|^2 / |oracle|^2
double residual_energy(const ComplexGrid& image, const ComplexGrid& oracle);

// max over cells of |a_i - b_i| / |b_i| (absolute where b_i = 0)
double max_relative_error(const ComplexGrid& a, const ComplexGrid& b);

} // namespace mvi
