#pragma once

#include "mvi/forward.hpp"
#include "mvi/patterns.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mvi {

enum class ReconMethod { static_target, discrete_mode, type1, type2 };

std::string to_string(ReconMethod m);

struct ReconImage {
    ComplexGrid data;
    ReconMethod method = ReconMethod::static_target;
    std::string mode_tag;
    std::size_t t0_index = 0;
    std::size_t n_averaged = 0;
};

struct CompensationSpec {
    enum class Kind { static_target, discrete_mode };
    Kind kind = Kind::static_target;
    std::vector<VibrationComponent> components;

    static CompensationSpec static_target() { return {}; }
    static CompensationSpec discrete_mode(std::vector<VibrationComponent> components);
    void validate() const;
};

// E_c = exp(j k Z1) * Fresnel(pattern, Z1)
ComplexGrid reference_field(const ComplexGrid& pattern, const SystemGeometry& geometry);

// exp(j k Z2) exp[-j k |x_r - x_c|^2 / (2 Z2)]
ComplexGrid static_compensation(const SystemGeometry& geometry, GridShape shape);

// The receiver-path phase the static factor undoes:
// exp(-j k Z2) exp[j k |x_r - x_c|^2 / (2 Z2)].
ComplexGrid residual_phase(const SystemGeometry& geometry, GridShape shape);

// exp[-j 2k sum_n Z_n cos(2 pi f_n t + phi_n)]; 1 for a static spec.
cplx compensation_time_factor(const CompensationSpec& spec, const SystemGeometry& geometry, double t);

// Full U(x_c, t) = static factor * time factor.
ComplexGrid compensation(const CompensationSpec& spec, const SystemGeometry& geometry, GridShape shape, double t);

// Global constant between the raw correlation and the target snapshot:
// eta A_LO N_cells pitch^4 exp[j k (3 Zd - Z1 + Z2)].
cplx correlation_gain(const SystemGeometry& geometry, GridShape shape, double eta, double lo_amplitude);

struct CorrelatorOptions {
    double eta = 1.0;
    double lo_amplitude = 1.0;
};

// Holds the reference fields of one schedule so repeated correlations
// (t0 sweeps, several modes) share them.
class Correlator {
public:
    Correlator(const PatternSchedule& schedule, const SystemGeometry& geometry, CorrelatorOptions options = {});

    // G(x_c) = U_s(x_c) / N_hit * sum_a conj(E_a(x_c)) * mean_{k -> a}[u(t_k) d_k] / gain,
    // d_k the f_IF-demodulated echo and N_hit the number of patterns hit.
    ReconImage correlate(const EchoRecord& echo, const CompensationSpec& spec,
                         std::span<const std::size_t> indices) const;

    const SystemGeometry& geometry() const noexcept { return geometry_; }
    GridShape shape() const noexcept { return shape_; }

private:
    std::size_t samples_per_pattern_;
    std::size_t cycle_;
    Coding coding_;
    SystemGeometry geometry_;
    GridShape shape_;
    std::vector<cplx> conj_refs_;  // n_patterns x cells, conj(E_a)
    std::vector<cplx> static_u_;
    cplx gain_;
};

std::vector<std::size_t> all_indices(std::size_t n_samples);

ReconImage first_order_correlate(const EchoRecord& echo, const PatternSchedule& schedule,
                                 const SystemGeometry& geometry, const CompensationSpec& spec,
                                 std::span<const std::size_t> indices, CorrelatorOptions options = {});

// Zeroes cells with |G| below max(k * 1.4826 * MAD(|G|), floor).
ReconImage relevance_highpass(const ReconImage& image, double k, double floor = 0.0);

inline constexpr double default_relevance_floor = 0.75;

ReconImage reconstruct_discrete_mode(const Correlator& correlator, const EchoRecord& echo,
                                     const CompensationSpec& mode, double filter_k,
                                     double floor = default_relevance_floor);
ReconImage reconstruct_discrete_mode(const EchoRecord& echo, const PatternSchedule& schedule,
                                     const SystemGeometry& geometry, const CompensationSpec& mode, double filter_k,
                                     double floor = default_relevance_floor);

// {t0, t0 + N, t0 + 2N, ...} below N_s
std::vector<std::size_t> subsample_indices(std::size_t t0, std::size_t n_interval, std::size_t n_samples);

// Static-compensation correlation over subsample_indices(t0, N, N_s),
// optionally truncated to the first max_subsamples entries.
ReconImage reconstruct_type1(const Correlator& correlator, const EchoRecord& echo, std::size_t n_t, std::size_t t0,
                             std::size_t max_subsamples = 0);
ReconImage reconstruct_type1(const EchoRecord& echo, const PatternSchedule& schedule,
                             const SystemGeometry& geometry, std::size_t n_t, std::size_t t0,
                             std::size_t max_subsamples = 0);
ReconImage reconstruct_type2(const Correlator& correlator, const EchoRecord& echo, std::size_t n_i, std::size_t t0,
                             std::size_t max_subsamples = 0);
ReconImage reconstruct_type2(const EchoRecord& echo, const PatternSchedule& schedule,
                             const SystemGeometry& geometry, std::size_t n_i, std::size_t t0,
                             std::size_t max_subsamples = 0);

// Centred |2-D DFT| of the image.
RealGrid kspace(const ReconImage& image);

// Non-DC bins at or above rel * (largest non-DC value), row-major order.
std::vector<CellIndex> kspace_peaks(const RealGrid& spectrum, double rel = 0.5);

// <base>.cgrd plus <base>.json sidecar {method, mode_tag, t0_index, n_averaged}.
void write_recon(const std::filesystem::path& base, const ReconImage& image);
ReconImage read_recon(const std::filesystem::path& base);

} // namespace mvi
