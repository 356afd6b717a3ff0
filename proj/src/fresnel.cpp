#include "mvi/fresnel.hpp"

#include "mvi/errors.hpp"

#include <cmath>
#include <numbers>

namespace mvi {

namespace {

double axis_coord(std::size_t i, std::size_t n, double pitch)
{
    return (static_cast<double>(i) - n / 2.0) * pitch;
}

std::vector<cplx> axis_kernel(std::size_t n_to, double pitch_to, std::size_t n_from, double pitch_from, double k,
                              double z)
{
    std::vector<cplx> m(n_to * n_from);
    for (std::size_t o = 0; o < n_to; ++o) {
        double xo = axis_coord(o, n_to, pitch_to);
        for (std::size_t s = 0; s < n_from; ++s) {
            double d = axis_coord(s, n_from, pitch_from) - xo;
            m[o * n_from + s] = std::polar(1.0, k / (2.0 * z) * d * d);
        }
    }
    return m;
}

double sinc(double u)
{
    if (u == 0.0) return 1.0;
    double pu = std::numbers::pi * u;
    return std::sin(pu) / pu;
}

} // namespace

FresnelKernel::FresnelKernel(const SystemGeometry& geometry, GridShape from, GridShape to, double distance)
    : from_(from), to_(to), distance_(distance), wavelength_(geometry.wavelength)
{
    require(distance > 0.0 && std::isfinite(distance), "propagation distance Z must be positive");
    require(from.rows >= 1 && from.cols >= 1 && from.pitch > 0.0, "invalid source plane shape");
    require(to.rows >= 1 && to.cols >= 1 && to.pitch > 0.0, "invalid target plane shape");
    require(geometry.wavelength > 0.0, "wavelength must be positive");
    double k = geometry.wavenumber();
    weight_ = from.pitch * from.pitch;
    kx_ = axis_kernel(to.cols, to.pitch, from.cols, from.pitch, k, distance);
    ky_ = axis_kernel(to.rows, to.pitch, from.rows, from.pitch, k, distance);
}

ComplexGrid FresnelKernel::apply(const ComplexGrid& field) const
{
    require(field.rows() == from_.rows && field.cols() == from_.cols,
            "field shape does not match the kernel's source plane");
    const std::size_t fr = from_.rows, fc = from_.cols, tr = to_.rows, tc = to_.cols;

    // Along x: tmp(r_s, c_o) = sum_{c_s} E(r_s, c_s) kx(c_o, c_s)
    std::vector<cplx> tmp(fr * tc);
    for (std::size_t r = 0; r < fr; ++r) {
        const cplx* row = field.data().data() + r * fc;
        for (std::size_t o = 0; o < tc; ++o) {
            const cplx* kr = kx_.data() + o * fc;
            cplx acc{};
            for (std::size_t s = 0; s < fc; ++s) acc += row[s] * kr[s];
            tmp[r * tc + o] = acc;
        }
    }

    ComplexGrid out(tr, tc, to_.pitch);
    for (std::size_t o = 0; o < tr; ++o) {
        const cplx* kr = ky_.data() + o * fr;
        for (std::size_t s = 0; s < fr; ++s) {
            cplx w = kr[s] * weight_;
            const cplx* trow = tmp.data() + s * tc;
            cplx* orow = &out(o, 0);
            for (std::size_t c = 0; c < tc; ++c) orow[c] += w * trow[c];
        }
    }
    return out;
}

cplx FresnelKernel::element(CellIndex to, CellIndex from) const
{
    require(to.row < to_.rows && to.col < to_.cols && from.row < from_.rows && from.col < from_.cols,
            "kernel element index out of range");
    return weight_ * kx_[to.col * from_.cols + from.col] * ky_[to.row * from_.rows + from.row];
}

cplx FresnelKernel::prefactor() const
{
    return path_phasor(distance_, wavelength_) / cplx(0.0, wavelength_ * distance_);
}

double sinc_psf(const SystemGeometry& geometry, double x)
{
    require(geometry.aperture > 0.0, "sinc PSF needs a positive aperture D");
    require(geometry.z1 > 0.0, "sinc PSF needs Z1 > 0");
    return sinc(geometry.aperture * x / (geometry.wavelength * geometry.z1));
}

RealGrid sinc_psf_grid(const SystemGeometry& geometry, GridShape shape)
{
    RealGrid out(shape.rows, shape.cols, shape.pitch);
    for (std::size_t r = 0; r < shape.rows; ++r) {
        double py = sinc_psf(geometry, out.y_of(r));
        for (std::size_t c = 0; c < shape.cols; ++c) out(r, c) = py * sinc_psf(geometry, out.x_of(c));
    }
    return out;
}

ComplexGrid apply_psf(const ComplexGrid& field, const SystemGeometry& geometry)
{
    const std::size_t rows = field.rows(), cols = field.cols();
    const double p = field.pitch();
    auto taps = [&](std::size_t n) {
        // psf at offsets -(n-1) .. (n-1) cells
        std::vector<double> t(2 * n - 1);
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] = sinc_psf(geometry, (static_cast<double>(i) - static_cast<double>(n - 1)) * p);
        return t;
    };
    auto tx = taps(cols);
    auto ty = taps(rows);

    std::vector<cplx> tmp(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            cplx acc{};
            for (std::size_t s = 0; s < cols; ++s) acc += tx[c + cols - 1 - s] * field(r, s);
            tmp[r * cols + c] = acc;
        }
    ComplexGrid out(rows, cols, p);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            cplx acc{};
            for (std::size_t s = 0; s < rows; ++s) acc += ty[r + rows - 1 - s] * tmp[s * cols + c];
            out(r, c) = acc;
        }
    return out;
}

} // namespace mvi
