#include "mvi/errors.hpp"
#include "mvi/targets.hpp"

#include <cmath>
#include <numbers>

namespace mvi {

namespace {
constexpr double pi = std::numbers::pi;
}

RealGrid plate_mode_shape(int i, int j, double a, double b, const PlateMaterial& material, GridShape shape)
{
    require(i >= 1 && j >= 1, "plate mode indices must be >= 1");
    require(a > 0.0 && b > 0.0, "plate sides a, b must be > 0");
    material.validate();
    RealGrid w(shape.rows, shape.cols, shape.pitch);
    const double amp = 2.0 / std::sqrt(material.mass_per_area() * a * b);
    for (std::size_t r = 0; r < shape.rows; ++r) {
        double y = static_cast<double>(r) * b / static_cast<double>(shape.rows);
        double sy = std::sin(j * pi * y / b);
        for (std::size_t c = 0; c < shape.cols; ++c) {
            double x = static_cast<double>(c) * a / static_cast<double>(shape.cols);
            w(r, c) = amp * std::sin(i * pi * x / a) * sy;
        }
    }
    // sin(k pi) is ~1e-16, not zero; the supported edges are exactly still
    for (std::size_t c = 0; c < shape.cols; ++c) w(0, c) = 0.0;
    for (std::size_t r = 0; r < shape.rows; ++r) w(r, 0) = 0.0;
    return w;
}

double plate_eigenfrequency(int i, int j, double a, double b, const PlateMaterial& material)
{
    require(i >= 1 && j >= 1, "plate mode indices must be >= 1");
    require(a > 0.0 && b > 0.0, "plate sides a, b must be > 0");
    material.validate();
    double s = static_cast<double>(i * i) / (a * a) + static_cast<double>(j * j) / (b * b);
    return pi * pi * s * std::sqrt(material.flexural_rigidity() / material.mass_per_area());
}

RealGrid forced_mode_shape(CellIndex cell, double attenuation_radius, GridShape shape)
{
    require(cell.row < shape.rows && cell.col < shape.cols, "forced source cell outside the grid");
    require(attenuation_radius >= 0.0, "attenuation radius must be >= 0");
    RealGrid w(shape.rows, shape.cols, shape.pitch);
    if (attenuation_radius == 0.0) {
        w(cell.row, cell.col) = 1.0;
        return w;
    }
    for (std::size_t r = 0; r < shape.rows; ++r)
        for (std::size_t c = 0; c < shape.cols; ++c) {
            double d = std::hypot(static_cast<double>(r) - static_cast<double>(cell.row),
                                  static_cast<double>(c) - static_cast<double>(cell.col));
            w(r, c) = std::exp(-d / attenuation_radius);
        }
    return w;
}

void build_mode_shape(PrincipalMode& mode, double a, double b, const PlateMaterial& material, GridShape shape)
{
    switch (mode.kind) {
    case ModeKind::analytic: {
        mode.shape = plate_mode_shape(mode.i, mode.j, a, b, material, shape);
        if (mode.peak_normalised) {
            double peak = 0.0;
            for (double v : mode.shape.data()) peak = std::max(peak, std::abs(v));
            if (peak > 0.0)
                for (double& v : mode.shape.data()) v /= peak;
        }
        break;
    }
    case ModeKind::forced_point:
        mode.shape = forced_mode_shape(mode.cell, mode.attenuation_radius, shape);
        break;
    case ModeKind::custom:
        require(mode.shape.rows() == shape.rows && mode.shape.cols() == shape.cols,
                "custom mode shape does not match the plate grid");
        break;
    }
}

double canonical_forcing(const RealGrid& load, const RealGrid& mode_shape)
{
    require(load.same_shape(mode_shape), "load and mode shape grids differ in shape");
    double acc = 0.0;
    for (std::size_t i = 0; i < load.size(); ++i) acc += load[i] * mode_shape[i];
    return acc * mode_shape.pitch() * mode_shape.pitch();
}

std::vector<double> canonical_solution(double omega, double eta0, double etadot0, std::span<const double> q,
                                       double dt)
{
    require(omega > 0.0 && std::isfinite(omega), "omega must be > 0");
    require(dt > 0.0, "time step must be > 0");
    const std::size_t n = q.size();
    std::vector<double> eta(n);
    if (n == 0) return eta;

    // I(t) = int_0^t q(tau) exp(j omega tau) dtau, exact for linear q on
    // each step; then eta = ... + Im(exp(j omega t) conj(I)) / omega.
    const cplx jw(0.0, omega);
    const cplx e1 = std::polar(1.0, omega * dt);
    const cplx c0 = (e1 - 1.0) / jw;                      // int_0^h e^{jw s} ds
    const cplx c1 = dt * e1 / jw + (e1 - 1.0) / (omega * omega);  // int_0^h s e^{jw s} ds
    cplx I{};
    for (std::size_t k = 0; k < n; ++k) {
        double t = static_cast<double>(k) * dt;
        if (k > 0) {
            double ta = static_cast<double>(k - 1) * dt;
            double alpha = q[k - 1];
            double beta = (q[k] - q[k - 1]) / dt;
            I += std::polar(1.0, omega * ta) * (alpha * c0 + beta * c1);
        }
        double wt = omega * t;
        eta[k] = eta0 * std::cos(wt) + etadot0 / omega * std::sin(wt) +
                 (std::polar(1.0, wt) * std::conj(I)).imag() / omega;
    }
    return eta;
}

RealGrid plate_displacement(const PlateTarget& target, double t)
{
    RealGrid w(target.reflectivity.rows(), target.reflectivity.cols(), target.reflectivity.pitch());
    for (const auto& m : target.modes) {
        require(m.shape.same_shape(w), "mode shape does not match the plate grid");
        double eta = fourier_series_eval(m.temporal, t);
        if (eta == 0.0) continue;
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += m.shape[i] * eta;
    }
    return w;
}

} // namespace mvi
