#include "mvi/targets.hpp"

#include "mvi/errors.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <utility>

namespace mvi {

void VibrationComponent::validate() const
{
    require(amplitude >= 0.0 && std::isfinite(amplitude), "vibration amplitude must be >= 0");
    require(frequency > 0.0 && std::isfinite(frequency), "vibration frequency must be > 0");
    require(std::isfinite(phase), "vibration phase must be finite");
}

double fourier_series_eval(std::span<const VibrationComponent> components, double t)
{
    double w = 0.0;
    for (const auto& c : components) w += c.amplitude * std::cos(2.0 * std::numbers::pi * c.frequency * t + c.phase);
    return w;
}

double angle_factor(double alpha, double beta, double alpha_q, double beta_q)
{
    return std::cos(beta) * std::cos(beta_q) * std::cos(alpha - alpha_q) + std::sin(beta) * std::sin(beta_q);
}

void DiscreteTargetSet::validate() const
{
    require(shape.rows >= 1 && shape.cols >= 1 && shape.pitch > 0.0, "discrete target needs a valid grid shape");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& s : scatterers) {
        require(s.cell.row < shape.rows && s.cell.col < shape.cols, "scatterer cell outside the target grid");
        require(seen.insert({s.cell.row, s.cell.col}).second, "two scatterers share one cell");
        for (const auto& c : s.components) c.validate();
    }
}

double PlateMaterial::flexural_rigidity() const noexcept
{
    return E * h * h * h / (12.0 * (1.0 - mu * mu));
}

void PlateMaterial::validate() const
{
    require(E > 0.0 && rho > 0.0 && h > 0.0, "plate material needs E, rho, h > 0");
    require(mu >= 0.0 && mu < 0.5, "Poisson ratio must lie in [0, 0.5)");
}

std::string to_string(ModeKind k)
{
    switch (k) {
    case ModeKind::analytic: return "analytic";
    case ModeKind::forced_point: return "forced_point";
    case ModeKind::custom: return "custom";
    }
    return "unknown";
}

ModeKind mode_kind_from_string(const std::string& s)
{
    if (s == "analytic") return ModeKind::analytic;
    if (s == "forced_point") return ModeKind::forced_point;
    if (s == "custom") return ModeKind::custom;
    throw InvalidArgument("unknown mode kind '" + s + "'");
}

void PlateTarget::validate() const
{
    require(a > 0.0 && b > 0.0, "plate sides a, b must be > 0");
    material.validate();
    require(!reflectivity.empty(), "plate needs a reflectivity grid");
    for (const auto& m : modes) {
        require(m.shape.rows() == reflectivity.rows() && m.shape.cols() == reflectivity.cols(), "mode shape does not match the plate grid");
        for (const auto& c : m.temporal) c.validate();
    }
}

GridShape target_shape(const Target& target)
{
    return std::visit(
        [](const auto& t) -> GridShape {
            if constexpr (std::is_same_v<std::decay_t<decltype(t)>, DiscreteTargetSet>)
                return t.shape;
            else
                return t.shape();
        },
        target);
}

RealGrid displacement_field(const Target& target, const SystemGeometry& geometry, double t)
{
    if (const auto* d = std::get_if<DiscreteTargetSet>(&target)) {
        RealGrid w(d->shape.rows, d->shape.cols, d->shape.pitch);
        for (const auto& s : d->scatterers)
            w(s.cell.row, s.cell.col) = fourier_series_eval(s.components, t) *
                                        angle_factor(geometry.alpha, geometry.beta, s.alpha_q, s.beta_q);
        return w;
    }
    const auto& p = std::get<PlateTarget>(target);
    RealGrid w = plate_displacement(p, t);
    double A = angle_factor(geometry.alpha, geometry.beta, p.alpha_q, p.beta_q);
    if (A != 1.0)
        for (auto& v : w.data()) v *= A;
    return w;
}

ComplexGrid complex_target_snapshot(const Target& target, const SystemGeometry& geometry, double t)
{
    const double k2 = 2.0 * geometry.wavenumber();
    if (const auto* d = std::get_if<DiscreteTargetSet>(&target)) {
        ComplexGrid out(d->shape.rows, d->shape.cols, d->shape.pitch);
        for (const auto& s : d->scatterers) {
            double w = fourier_series_eval(s.components, t) *
                       angle_factor(geometry.alpha, geometry.beta, s.alpha_q, s.beta_q);
            out(s.cell.row, s.cell.col) = s.reflectivity * std::polar(1.0, k2 * w);
        }
        return out;
    }
    const auto& p = std::get<PlateTarget>(target);
    RealGrid w = displacement_field(target, geometry, t);
    ComplexGrid out(p.reflectivity.rows(), p.reflectivity.cols(), p.reflectivity.pitch());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = p.reflectivity[i] * std::polar(1.0, k2 * w[i]);
    return out;
}

ComplexGrid single_mode_snapshot(const PlateTarget& plate, const SystemGeometry& geometry, std::size_t mode,
                                 double t)
{
    require(mode < plate.modes.size(), "mode index out of range");
    const auto& m = plate.modes[mode];
    const double phase = 2.0 * geometry.wavenumber() * fourier_series_eval(m.temporal, t) *
                         angle_factor(geometry.alpha, geometry.beta, plate.alpha_q, plate.beta_q);
    ComplexGrid out(plate.reflectivity.rows(), plate.reflectivity.cols(), plate.reflectivity.pitch());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = plate.reflectivity[i] * std::polar(1.0, phase * m.shape[i]);
    return out;
}

std::vector<double> target_frequencies(const Target& target)
{
    std::vector<double> f;
    if (const auto* d = std::get_if<DiscreteTargetSet>(&target)) {
        for (const auto& s : d->scatterers)
            for (const auto& c : s.components) f.push_back(c.frequency);
    } else {
        for (const auto& m : std::get<PlateTarget>(target).modes)
            for (const auto& c : m.temporal) f.push_back(c.frequency);
    }
    return f;
}

} // namespace mvi
