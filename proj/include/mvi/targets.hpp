#pragma once

#include "mvi/fresnel.hpp"
#include "mvi/geometry.hpp"
#include "mvi/grid.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mvi {

struct VibrationComponent {
    double amplitude = 0.0;  // Z, metres
    double frequency = 1.0;  // f, Hz
    double phase = 0.0;      // phi, radians

    void validate() const;
    bool operator==(const VibrationComponent&) const = default;
};

// sum_n Z_n cos(2 pi f_n t + phi_n)
double fourier_series_eval(std::span<const VibrationComponent> components, double t);

// cos(beta) cos(betaQ) cos(alpha - alphaQ) + sin(beta) sin(betaQ)
double angle_factor(double alpha, double beta, double alpha_q, double beta_q);

struct Scatterer {
    CellIndex cell;
    cplx reflectivity{1.0, 0.0};
    std::vector<VibrationComponent> components;
    double alpha_q = 0.0;
    double beta_q = 0.0;

    bool operator==(const Scatterer&) const = default;
};

// Point scatterers on a target-plane grid, one cell each.
struct DiscreteTargetSet {
    GridShape shape;
    std::vector<Scatterer> scatterers;

    void validate() const;
    bool operator==(const DiscreteTargetSet&) const = default;
};

struct PlateMaterial {
    double E = 200e9;     // Young modulus, Pa
    double mu = 0.3;      // Poisson ratio
    double rho = 7850.0;  // density, kg/m^3
    double h = 0.5e-3;    // half thickness, m (physical thickness 2h)

    // E h^3 / (12 (1 - mu^2))
    double flexural_rigidity() const noexcept;
    // rho * 2h, kg/m^2
    double mass_per_area() const noexcept { return rho * 2.0 * h; }

    void validate() const;
    bool operator==(const PlateMaterial&) const = default;
};

enum class ModeKind { analytic, forced_point, custom };

std::string to_string(ModeKind k);
ModeKind mode_kind_from_string(const std::string& s);

struct PrincipalMode {
    ModeKind kind = ModeKind::analytic;
    int i = 1, j = 1;                  // analytic indices
    CellIndex cell;                    // forced_point source
    double attenuation_radius = 0.0;   // cells; 0 = single-cell Dirac
    bool peak_normalised = true;       // analytic: unit peak instead of mass normalisation
    RealGrid shape;                    // W_m, displacement per unit modal coordinate
    std::vector<VibrationComponent> temporal;

    bool operator==(const PrincipalMode&) const = default;
};

// Kirchhoff plate filling the target grid; one reflectivity image,
// displacement is the modal superposition.
struct PlateTarget {
    double a = 1.0, b = 1.0;
    PlateMaterial material;
    ComplexGrid reflectivity;
    std::vector<PrincipalMode> modes;
    double alpha_q = 0.0;
    double beta_q = 0.0;

    GridShape shape() const { return GridShape::of(reflectivity); }
    void validate() const;
    bool operator==(const PlateTarget&) const = default;
};

using Target = std::variant<DiscreteTargetSet, PlateTarget>;

GridShape target_shape(const Target& target);

// Line-of-sight displacement w(x, t) * A on the target grid.
RealGrid displacement_field(const Target& target, const SystemGeometry& geometry, double t);

// T~(x, t) = T(x) exp(j 2k w(x, t) A); zero outside discrete scatterers.
ComplexGrid complex_target_snapshot(const Target& target, const SystemGeometry& geometry, double t);

// T(x) exp(j 2k A W_m(x) eta_m(t)) for one plate mode alone.
ComplexGrid single_mode_snapshot(const PlateTarget& plate, const SystemGeometry& geometry, std::size_t mode,
                                 double t);

// All vibration frequencies present in the target (unsorted, with repeats).
std::vector<double> target_frequencies(const Target& target);

// --- plate modal solver ---

// W_ij = A_ij sin(i pi x / a) sin(j pi y / b) with A_ij = 2 / sqrt(rho 2h a b),
// sampled at plate-local x = col * a / cols, y = row * b / rows.
RealGrid plate_mode_shape(int i, int j, double a, double b, const PlateMaterial& material, GridShape shape);

// pi^2 (i^2/a^2 + j^2/b^2) sqrt(D0 / (rho 2h)), rad/s
double plate_eigenfrequency(int i, int j, double a, double b, const PlateMaterial& material);

// Forced-source profile: exp(-d / radius) around `cell` (d in cells),
// or a single unit cell when radius == 0.
RealGrid forced_mode_shape(CellIndex cell, double attenuation_radius, GridShape shape);

// Fills mode.shape from its kind and parameters.
void build_mode_shape(PrincipalMode& mode, double a, double b, const PlateMaterial& material, GridShape shape);

// q(t) = sum_cells p * W * pitch^2
double canonical_forcing(const RealGrid& load, const RealGrid& mode_shape);

// eta(t_n) for eta'' + omega^2 eta = q, q sampled at t_n = n * dt. The
// Duhamel integral treats q as piecewise linear between samples.
std::vector<double> canonical_solution(double omega, double eta0, double etadot0, std::span<const double> q,
                                       double dt);

// w = sum_m W_m eta_m(t)
RealGrid plate_displacement(const PlateTarget& target, double t);

// --- JSON target description ---
std::string target_to_json(const Target& target);
Target target_from_json(const std::string& text, const std::filesystem::path& base_dir = {});

} // namespace mvi
