#pragma once

#include "mvi/fresnel.hpp"
#include "mvi/geometry.hpp"
#include "mvi/patterns.hpp"
#include "mvi/targets.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mvi {

struct TimingConfig {
    double sample_interval = 1.0 / 120.0;  // T_p, s
    std::size_t n_samples = 1;             // N_s
    double f_if = 0.0;                     // Hz
    double t_start = 0.0;                  // s

    double time(std::size_t k) const noexcept { return t_start + static_cast<double>(k) * sample_interval; }
    double sample_rate() const noexcept { return 1.0 / sample_interval; }

    // exact_demodulation additionally requires f_IF * T_p * N_s integral.
    void validate(bool exact_demodulation = false) const;
    bool operator==(const TimingConfig&) const = default;
};

struct MotionConfig {
    double v = 0.0;      // translation speed, m/s
    double theta = 0.0;  // translation azimuth
    double gamma = 0.0;  // translation elevation
    double noise_sigma = 0.0;

    void validate() const;
    bool operator==(const MotionConfig&) const = default;
};

struct ForwardOptions {
    double eta = 1.0;           // detector efficiency
    double lo_amplitude = 1.0;  // A_LO
    bool psf_blur = false;      // convolve snapshots with the sinc PSF
    std::uint64_t seed = 0;     // noise stream
    unsigned threads = 1;
    std::size_t max_cached_snapshots = 4096;

    bool operator==(const ForwardOptions&) const = default;
};

struct EchoRecord {
    std::vector<cplx> samples;
    TimingConfig timing;
    std::uint64_t seed = 0;
    double eta = 1.0;

    void validate() const;
};

enum class RangeMode { exact, approx };

// Z - Zd for a point displaced by eta_t along a direction with angle
// factor A. The exact branch is written so it does not cancel.
double range_offset(double zd, double eta_t, double angle, RangeMode mode);

// Zd + range_offset(...) with A from the geometry's radar angles.
double instantaneous_range(const SystemGeometry& geometry, double eta_t, double alpha_q, double beta_q,
                           RangeMode mode);

// P = exp(j k Zd) * Fresnel(pattern, Z1), on a target grid of the same
// shape and pitch as the pattern.
ComplexGrid illuminate(const ComplexGrid& pattern, const SystemGeometry& geometry);

// A_LO exp[j 2 pi (f_c - f_IF) t]
cplx lo_field(double carrier_hz, double f_if, double lo_amplitude, double t);

// exp(j 2 pi f t) with the cycle count reduced before the trig call.
cplx tone(double f, double t);

// Coded-illumination echo of one target. Construction precomputes the
// per-pattern weights and, when the vibration is periodic in samples,
// the target snapshots over one common period; sample(k) is then a
// pure function of k.
class EchoSynthesizer {
public:
    EchoSynthesizer(const Target& target, const PatternSchedule& schedule, const SystemGeometry& geometry,
                    const TimingConfig& timing, const MotionConfig& motion, const ForwardOptions& options);

    cplx sample(std::size_t k) const;

    EchoRecord synthesize() const;

    // Full-length record with only `indices` filled (others zero).
    EchoRecord synthesize_indices(std::span<const std::size_t> indices) const;

    // Samples per common vibration period, 0 if not periodic on the grid.
    std::size_t period_samples() const noexcept { return period_; }

private:
    std::vector<cplx> snapshot_values(double t) const;
    EchoRecord empty_record() const;

    Target target_;
    std::size_t samples_per_pattern_;
    std::size_t cycle_;
    SystemGeometry geometry_;
    TimingConfig timing_;
    MotionConfig motion_;
    ForwardOptions options_;
    std::vector<std::size_t> active_;  // cells with non-zero reflectivity
    std::vector<cplx> weights_;        // n_patterns x active
    std::size_t period_ = 0;
    std::vector<cplx> cache_;          // period_ x active, empty if not cached
    double translation_angle_ = 1.0;
};

EchoRecord synthesize_echo(const Target& target, const PatternSchedule& schedule, const SystemGeometry& geometry,
                           const TimingConfig& timing, const MotionConfig& motion,
                           const ForwardOptions& options = {});

// Samples per common period of `frequencies` at rate f_samp, or 0 when
// some f_samp / f is not an integer (relative tolerance 1e-9).
std::size_t common_period_samples(std::span<const double> frequencies, double f_samp);

// CECH: "CECH", u32 N_s, f64 T_p, f64 f_IF, u64 seed, then N_s (re, im) f64.
std::vector<unsigned char> encode_cech(const EchoRecord& echo);
EchoRecord decode_cech(std::span<const unsigned char> bytes);
void write_cech(const std::filesystem::path& path, const EchoRecord& echo);
EchoRecord read_cech(const std::filesystem::path& path);

} // namespace mvi
