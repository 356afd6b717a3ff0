#include "mvi/spectral.hpp"

#include "binary_io.hpp"
#include "fft.hpp"
#include "json_io.hpp"
#include "mvi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>

namespace mvi {

namespace {
constexpr double pi = std::numbers::pi;

double median(std::vector<double> v)
{
    if (v.empty()) return 0.0;
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
    return m;
}
} // namespace

std::vector<double> TFSpectrum::time_average() const
{
    std::vector<double> avg(bins, 0.0);
    for (std::size_t f = 0; f < frames; ++f)
        for (std::size_t b = 0; b < bins; ++b) avg[b] += at(f, b);
    if (frames > 0)
        for (auto& v : avg) v /= static_cast<double>(frames);
    return avg;
}

TFSpectrum spectrogram(std::span<const cplx> samples, double f_samp, std::size_t window_len, std::size_t hop)
{
    require(f_samp > 0.0, "sample rate must be > 0");
    require(window_len >= 2, "window length must be >= 2");
    if (window_len > samples.size())
        throw InvalidArgument("window of " + std::to_string(window_len) + " samples is longer than the record (" +
                              std::to_string(samples.size()) + ")");
    if (hop == 0) hop = std::max<std::size_t>(1, window_len / 2);

    const std::size_t W = window_len;
    std::vector<double> w(W);
    double w2 = 0.0;
    for (std::size_t n = 0; n < W; ++n) {
        // periodic Hann
        w[n] = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(n) / static_cast<double>(W));
        w2 += w[n] * w[n];
    }

    TFSpectrum s;
    s.window_len = W;
    s.frames = (samples.size() - W) / hop + 1;
    s.bins = W / 2 + 1;
    s.time_step = static_cast<double>(hop) / f_samp;
    s.freq_step = f_samp / static_cast<double>(W);
    s.magnitudes.assign(s.frames * s.bins, 0.0);

    const double scale = 1.0 / (static_cast<double>(W) * w2);
    std::vector<cplx> buf(W);
    for (std::size_t f = 0; f < s.frames; ++f) {
        for (std::size_t n = 0; n < W; ++n) buf[n] = w[n] * samples[f * hop + n];
        auto X = detail::dft(buf);
        double* row = s.magnitudes.data() + f * s.bins;
        for (std::size_t b = 0; b < s.bins; ++b) {
            double p = std::norm(X[b]);
            std::size_t mirror = (W - b) % W;
            if (mirror != b) p += std::norm(X[mirror]);
            row[b] = p * scale;
        }
    }
    return s;
}

TFSpectrum spectrogram(const EchoRecord& echo, std::size_t window_len, std::size_t hop)
{
    std::vector<cplx> base(echo.samples.size());
    for (std::size_t k = 0; k < base.size(); ++k)
        base[k] = echo.samples[k] * std::conj(tone(echo.timing.f_if, echo.timing.time(k)));
    return spectrogram(base, echo.timing.sample_rate(), window_len, hop);
}

std::vector<DetectedMode> detect_frequencies(const TFSpectrum& spec, double f_samp, std::size_t max_modes,
                                             const DetectOptions& options)
{
    require(max_modes >= 1, "max_modes must be >= 1");
    require(f_samp > 0.0, "sample rate must be > 0");
    auto avg = spec.time_average();
    if (avg.size() < 3) return {};
    const double med = median(avg);
    const double strongest = *std::max_element(avg.begin() + 1, avg.end());
    const double threshold = std::max(options.threshold_factor * med, options.dynamic_range * strongest);

    struct Peak {
        double freq;
        double power;
    };
    std::vector<Peak> peaks;
    for (std::size_t b = 1; b < avg.size(); ++b) {
        bool right = b + 1 >= avg.size() || avg[b] >= avg[b + 1];
        if (!(avg[b] > avg[b - 1] && right && avg[b] > threshold)) continue;
        double delta = 0.0;
        if (b + 1 < avg.size() && avg[b - 1] > 0.0 && avg[b + 1] > 0.0) {
            double l = std::log(avg[b - 1]), c = std::log(avg[b]), r = std::log(avg[b + 1]);
            double den = l - 2.0 * c + r;
            if (den < 0.0) delta = std::clamp(0.5 * (l - r) / den, -0.5, 0.5);
        }
        peaks.push_back({(static_cast<double>(b) + delta) * spec.freq_step, avg[b]});
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.power > b.power; });

    // merge within one bin, keeping the stronger
    std::vector<Peak> kept;
    for (const auto& p : peaks) {
        bool near = std::any_of(kept.begin(), kept.end(),
                                [&](const Peak& k) { return std::abs(k.freq - p.freq) <= spec.freq_step; });
        if (!near) kept.push_back(p);
    }
    if (options.prune_harmonics) {
        std::vector<Peak> fundamentals;
        for (const auto& p : kept) {
            bool harmonic = std::any_of(kept.begin(), kept.end(), [&](const Peak& g) {
                if (g.freq >= p.freq - spec.freq_step) return false;
                double m = std::round(p.freq / g.freq);
                return m >= 2.0 && std::abs(p.freq - m * g.freq) <= spec.freq_step;
            });
            if (!harmonic) fundamentals.push_back(p);
        }
        kept = std::move(fundamentals);
    }
    if (kept.size() > max_modes) kept.resize(max_modes);

    std::vector<DetectedMode> out;
    for (const auto& p : kept) {
        DetectedMode m;
        m.frequency = p.freq;
        double ratio = f_samp / p.freq;
        m.samples_per_period = static_cast<std::size_t>(std::max(2.0, std::round(ratio)));
        m.confidence = std::clamp(1.0 - med / p.power, 0.0, 1.0);
        m.rounding_warning = std::abs(ratio - static_cast<double>(m.samples_per_period)) >
                             1e-3 * static_cast<double>(m.samples_per_period);
        out.push_back(m);
    }
    return out;
}

std::size_t interval_lcm(std::span<const std::size_t> counts)
{
    if (counts.empty()) throw InvalidArgument("interval_lcm needs at least one count");
    std::size_t n = 1;
    for (std::size_t c : counts) {
        require(c >= 1, "interval counts must be >= 1");
        std::size_t g = std::gcd(n, c);
        std::size_t f = c / g;
        if (n > std::numeric_limits<std::size_t>::max() / f) throw NumericError("interval LCM overflows");
        n *= f;
    }
    return n;
}

double bessel_j(int m, double x)
{
    // The integrand is smooth and 2 pi periodic, so the trapezoid rule on
    // [-pi, pi) converges geometrically once N exceeds |m| + |x| comfortably.
    const int n = 2 * (std::abs(m) + static_cast<int>(std::ceil(std::abs(x))) + 40);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double tau = -pi + 2.0 * pi * i / n;
        acc += std::cos(m * tau - x * std::sin(tau));
    }
    return acc / n;
}

std::vector<SpectralLine> bessel_line_spectrum(double z_vib, double wavelength, double f_v, double f_if, int m_max)
{
    require(z_vib >= 0.0, "vibration amplitude must be >= 0");
    require(wavelength > 0.0, "wavelength must be > 0");
    require(m_max >= 0, "m range must be >= 0");
    const double B = 4.0 * pi * z_vib / wavelength;
    std::vector<SpectralLine> lines;
    for (int m = -m_max; m <= m_max; ++m)
        lines.push_back({m, f_if + m * f_v, std::abs(bessel_j(m, B))});
    return lines;
}

double line_amplitude(std::span<const cplx> samples, double f_samp, double f)
{
    require(!samples.empty(), "empty record");
    cplx acc{};
    for (std::size_t n = 0; n < samples.size(); ++n) acc += samples[n] * std::conj(tone(f, static_cast<double>(n) / f_samp));
    return std::abs(acc) / static_cast<double>(samples.size());
}

void write_spectrum_csv(const std::filesystem::path& path, const TFSpectrum& spec)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "time,frequency,magnitude\n";
    out.precision(17);
    for (std::size_t f = 0; f < spec.frames; ++f)
        for (std::size_t b = 0; b < spec.bins; ++b)
            out << static_cast<double>(f) * spec.time_step << ',' << static_cast<double>(b) * spec.freq_step << ','
                << spec.at(f, b) << '\n';
    if (!out) throw IoError("short write to " + path.string());
}

void write_spectrum_cgrd(const std::filesystem::path& path, const TFSpectrum& spec)
{
    // rows = frames, cols = bins; the pitch field carries the bin width
    RealGrid g(spec.frames, spec.bins, spec.freq_step, spec.magnitudes);
    write_cgrd(path, g);
}

std::string modes_to_json(const std::vector<DetectedMode>& modes, std::size_t n_interval)
{
    detail::json a = detail::json::array();
    for (const auto& m : modes)
        a.push_back({{"frequency", m.frequency},
                     {"N", m.samples_per_period},
                     {"confidence", m.confidence},
                     {"rounding_warning", m.rounding_warning}});
    detail::json j = {{"modes", a}};
    if (n_interval > 0) j["N_t"] = n_interval;
    return j.dump(2);
}

} // namespace mvi
