#pragma once

#include "mvi/geometry.hpp"
#include "mvi/grid.hpp"

#include <vector>

namespace mvi {

struct GridShape {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double pitch = 1.0;

    template <typename T>
    static GridShape of(const Grid<T>& g)
    {
        return {g.rows(), g.cols(), g.pitch()};
    }

    bool operator==(const GridShape&) const = default;
};

// Paraxial propagation between two parallel planes, discretised as a
// Riemann sum with weight pitch^2 of the source plane:
//
//   out(x_o) = sum_s pitch^2 * E(x_s) * exp[j k / (2Z) |x_s - x_o|^2]
//
// The quadratic phase separates in x and y, so apply() runs as two small
// matrix products. The constant exp(jkZ) / (j lambda Z) is not folded in;
// callers that need it read prefactor().
class FresnelKernel {
public:
    FresnelKernel(const SystemGeometry& geometry, GridShape from, GridShape to, double distance);

    ComplexGrid apply(const ComplexGrid& field) const;

    // Weighted kernel entry linking source cell `from` to target cell `to`.
    cplx element(CellIndex to, CellIndex from) const;

    cplx prefactor() const;

    double distance() const noexcept { return distance_; }
    const GridShape& from_shape() const noexcept { return from_; }
    const GridShape& to_shape() const noexcept { return to_; }

private:
    GridShape from_;
    GridShape to_;
    double distance_;
    double wavelength_;
    double weight_;
    std::vector<cplx> kx_;  // to.cols x from.cols
    std::vector<cplx> ky_;  // to.rows x from.rows
};

// Normalised sinc resolution profile sinc(D x / (lambda Z1)).
double sinc_psf(const SystemGeometry& geometry, double x);

// Separable psf(x) * psf(y) sampled at cell offsets of `shape`, centred
// on cell (rows/2, cols/2).
RealGrid sinc_psf_grid(const SystemGeometry& geometry, GridShape shape);

// Convolves a target-plane field with the separable sinc PSF.
ComplexGrid apply_psf(const ComplexGrid& field, const SystemGeometry& geometry);

} // namespace mvi
