#pragma once

#include "mvi/forward.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mvi {

// Squared-magnitude STFT folded onto [0, f_samp/2]. Row-major
// frames x bins; each frame is scaled so its bins sum to the
// window-weighted mean power sum_n w_n^2 |x_n|^2 / sum_n w_n^2.
struct TFSpectrum {
    std::vector<double> magnitudes;
    std::size_t frames = 0;
    std::size_t bins = 0;
    double time_step = 0.0;  // s between frame starts
    double freq_step = 0.0;  // Hz per bin
    std::size_t window_len = 0;

    double at(std::size_t frame, std::size_t bin) const { return magnitudes[frame * bins + bin]; }
    std::vector<double> time_average() const;
};

// Hann-window STFT of the echo after exp(-j 2 pi f_IF t) demodulation.
// hop = 0 selects window_len / 2.
TFSpectrum spectrogram(const EchoRecord& echo, std::size_t window_len, std::size_t hop = 0);
TFSpectrum spectrogram(std::span<const cplx> samples, double f_samp, std::size_t window_len, std::size_t hop = 0);

struct DetectedMode {
    double frequency = 0.0;        // Hz
    std::size_t samples_per_period = 0;  // N_mn
    double confidence = 0.0;       // 1 - median / peak
    bool rounding_warning = false; // |f_samp/f - N| > 0.1% of N
};

struct DetectOptions {
    double threshold_factor = 5.0;  // peak must exceed factor * median
    bool prune_harmonics = false;   // drop integer multiples of another detection
    // Peaks below this fraction of the strongest bin are ignored. A clean
    // simulated spectrum has a median near round-off, so the median test
    // alone lets FFT noise through.
    double dynamic_range = 1e-6;
};

// Peak-picks the time-averaged spectrum. Strongest first; empty when
// nothing clears the threshold.
std::vector<DetectedMode> detect_frequencies(const TFSpectrum& spec, double f_samp, std::size_t max_modes,
                                             const DetectOptions& options = {});

// Exact least common multiple.
std::size_t interval_lcm(std::span<const std::size_t> counts);

// J_m(x) from the integral (1/pi) int_0^pi cos(m tau - x sin tau) dtau.
double bessel_j(int m, double x);

struct SpectralLine {
    int order = 0;
    double frequency = 0.0;
    double amplitude = 0.0;  // |J_m(B)|
};

// Lines at f_IF + m f_v, |m| <= m_max, amplitude |J_m(4 pi Z / lambda)|.
std::vector<SpectralLine> bessel_line_spectrum(double z_vib, double wavelength, double f_v, double f_if, int m_max);

// |(1/N) sum_n x_n exp(-j 2 pi f n / f_samp)|: line amplitude at f.
double line_amplitude(std::span<const cplx> samples, double f_samp, double f);

void write_spectrum_csv(const std::filesystem::path& path, const TFSpectrum& spec);
void write_spectrum_cgrd(const std::filesystem::path& path, const TFSpectrum& spec);
std::string modes_to_json(const std::vector<DetectedMode>& modes, std::size_t n_interval);

} // namespace mvi
