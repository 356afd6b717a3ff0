#include "mvi/forward.hpp"

#include "binary_io.hpp"
#include "mvi/errors.hpp"
#include "mvi/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

namespace mvi {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

void TimingConfig::validate(bool exact_demodulation) const
{
    require(sample_interval > 0.0 && std::isfinite(sample_interval), "sample interval T_p must be > 0");
    require(n_samples >= 1, "N_s must be >= 1");
    require(f_if >= 0.0 && std::isfinite(f_if), "f_IF must be >= 0");
    require(std::isfinite(t_start), "t_start must be finite");
    if (exact_demodulation) {
        double cycles = f_if * sample_interval * static_cast<double>(n_samples);
        require(std::abs(cycles - std::round(cycles)) < 1e-9 * std::max(1.0, cycles),
                "f_IF * T_p * N_s must be an integer for exact demodulation");
    }
}

void MotionConfig::validate() const
{
    require(std::isfinite(v) && std::isfinite(theta) && std::isfinite(gamma), "motion parameters must be finite");
    require(noise_sigma >= 0.0 && std::isfinite(noise_sigma), "noise sigma must be >= 0");
}

void EchoRecord::validate() const
{
    timing.validate();
    require(samples.size() == timing.n_samples, "echo length differs from N_s");
    for (const auto& s : samples)
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw NumericError("echo contains non-finite samples");
}

double range_offset(double zd, double eta_t, double angle, RangeMode mode)
{
    require(zd > 0.0, "Zd must be > 0");
    if (mode == RangeMode::approx) return eta_t * angle;
    // sqrt(Zd^2 + eta^2 + 2 Zd eta A) - Zd, rationalised
    double num = eta_t * eta_t + 2.0 * zd * eta_t * angle;
    double root = std::sqrt(zd * zd + num);
    return num / (root + zd);
}

double instantaneous_range(const SystemGeometry& geometry, double eta_t, double alpha_q, double beta_q,
                           RangeMode mode)
{
    double A = angle_factor(geometry.alpha, geometry.beta, alpha_q, beta_q);
    return geometry.zd + range_offset(geometry.zd, eta_t, A, mode);
}

ComplexGrid illuminate(const ComplexGrid& pattern, const SystemGeometry& geometry)
{
    auto shape = GridShape::of(pattern);
    FresnelKernel kernel(geometry, shape, shape, geometry.z1);
    ComplexGrid p = kernel.apply(pattern);
    cplx g = path_phasor(geometry.zd, geometry.wavelength);
    for (auto& v : p.data()) v *= g;
    return p;
}

cplx tone(double f, double t)
{
    double cycles = f * t;
    return std::polar(1.0, two_pi * (cycles - std::floor(cycles)));
}

cplx lo_field(double carrier_hz, double f_if, double lo_amplitude, double t)
{
    return lo_amplitude * tone(carrier_hz - f_if, t);
}

std::size_t common_period_samples(std::span<const double> frequencies, double f_samp)
{
    std::size_t n = 1;
    for (double f : frequencies) {
        if (f <= 0.0) return 0;
        double r = f_samp / f;
        double ri = std::round(r);
        if (ri < 1.0 || std::abs(r - ri) > 1e-9 * r) return 0;
        n = std::lcm(n, static_cast<std::size_t>(ri));
        if (n > (std::size_t{1} << 40)) return 0;
    }
    return n;
}

EchoSynthesizer::EchoSynthesizer(const Target& target, const PatternSchedule& schedule,
                                 const SystemGeometry& geometry, const TimingConfig& timing,
                                 const MotionConfig& motion, const ForwardOptions& options)
    : target_(target),
      samples_per_pattern_(schedule.samples_per_pattern),
      cycle_(schedule.cycle_length()),
      geometry_(geometry),
      timing_(timing),
      motion_(motion),
      options_(options)
{
    geometry.validate();
    timing.validate();
    motion.validate();
    schedule.validate();
    std::visit([](const auto& t) { t.validate(); }, target);
    if (schedule.total_samples < timing.n_samples)
        throw InvalidArgument("pattern schedule covers " + std::to_string(schedule.total_samples) +
                              " samples but timing asks for " + std::to_string(timing.n_samples));
    GridShape ts = target_shape(target);
    GridShape ps = GridShape::of(schedule.patterns.front());
    require(ts.rows == ps.rows && ts.cols == ps.cols, "target grid and pattern grid differ in shape");
    require(std::abs(ts.pitch - ps.pitch) <= 1e-12 * ps.pitch, "target grid and pattern grid differ in pitch");
    if (options.psf_blur) require(geometry.aperture > 0.0, "psf_blur needs a positive aperture D");

    const std::size_t cells = ts.rows * ts.cols;
    if (options.psf_blur) {
        active_.resize(cells);
        std::iota(active_.begin(), active_.end(), std::size_t{0});
    } else if (const auto* d = std::get_if<DiscreteTargetSet>(&target_)) {
        for (const auto& s : d->scatterers)
            if (s.reflectivity != cplx{}) active_.push_back(s.cell.row * ts.cols + s.cell.col);
        std::sort(active_.begin(), active_.end());
    } else {
        const auto& refl = std::get<PlateTarget>(target_).reflectivity;
        for (std::size_t i = 0; i < cells; ++i)
            if (refl[i] != cplx{}) active_.push_back(i);
    }

    // Q_a(x) = eta A_LO exp(j 3k Zd) F(p_a)(x) H(x -> x_r): illumination exp(jkZd) times the round trip
    FresnelKernel kernel(geometry, ps, ts, geometry.z1);
    const double k = geometry.wavenumber();
    const cplx scale = options.eta * options.lo_amplitude * path_phasor(geometry.zd, geometry.wavelength, 3.0);
    ComplexGrid probe(ts.rows, ts.cols, ts.pitch);
    std::vector<cplx> h(active_.size());
    for (std::size_t i = 0; i < active_.size(); ++i) {
        auto [x, y] = probe.coord(active_[i] / ts.cols, active_[i] % ts.cols);
        double dx = geometry.receiver_x - x;
        h[i] = std::polar(1.0, k / (2.0 * geometry.z2) * (dx * dx + y * y));
    }
    weights_.resize(cycle_ * active_.size());
    for (std::size_t a = 0; a < cycle_; ++a) {
        ComplexGrid p = kernel.apply(schedule.patterns[a]);
        for (std::size_t i = 0; i < active_.size(); ++i) weights_[a * active_.size() + i] = scale * p[active_[i]] * h[i];
    }

    translation_angle_ = angle_factor(geometry.alpha, geometry.beta, motion.theta, motion.gamma);

    auto freqs = target_frequencies(target_);
    period_ = common_period_samples(freqs, timing.sample_rate());
    if (freqs.empty()) period_ = 1;
    if (period_ > 0 && period_ <= options.max_cached_snapshots && period_ < timing.n_samples) {
        cache_.resize(period_ * active_.size());
        for (std::size_t n = 0; n < period_; ++n) {
            auto v = snapshot_values(timing.time(n));
            std::copy(v.begin(), v.end(), cache_.begin() + static_cast<std::ptrdiff_t>(n * active_.size()));
        }
    }
}

std::vector<cplx> EchoSynthesizer::snapshot_values(double t) const
{
    ComplexGrid snap = complex_target_snapshot(target_, geometry_, t);
    if (options_.psf_blur) snap = apply_psf(snap, geometry_);
    std::vector<cplx> v(active_.size());
    for (std::size_t i = 0; i < active_.size(); ++i) v[i] = snap[active_[i]];
    return v;
}

cplx EchoSynthesizer::sample(std::size_t k) const
{
    if (k >= timing_.n_samples)
        throw InvalidArgument("sample index " + std::to_string(k) + " outside the record");
    const std::size_t a = (k / samples_per_pattern_) % cycle_;
    const std::size_t n = active_.size();
    const cplx* q = weights_.data() + a * n;
    const double t = timing_.time(k);

    cplx acc{};
    if (!cache_.empty()) {
        const cplx* s = cache_.data() + (k % period_) * n;
        for (std::size_t i = 0; i < n; ++i) acc += q[i] * s[i];
    } else {
        auto s = snapshot_values(t);
        for (std::size_t i = 0; i < n; ++i) acc += q[i] * s[i];
    }
    acc *= tone(timing_.f_if, t);
    if (motion_.v != 0.0) acc *= path_phasor(motion_.v * t * translation_angle_, geometry_.wavelength, 2.0);
    if (motion_.noise_sigma > 0.0) {
        auto [n1, n2] = counter_normal_pair(options_.seed, stream::noise, k);
        acc += motion_.noise_sigma / std::sqrt(2.0) * cplx(n1, n2);
    }
    return acc;
}

EchoRecord EchoSynthesizer::empty_record() const
{
    EchoRecord r;
    r.timing = timing_;
    r.seed = options_.seed;
    r.eta = options_.eta;
    r.samples.assign(timing_.n_samples, cplx{});
    return r;
}

EchoRecord EchoSynthesizer::synthesize() const
{
    EchoRecord r = empty_record();
    const std::size_t n = timing_.n_samples;
    unsigned threads = std::max(1u, options_.threads);
    if (threads == 1 || n < 4096) {
        for (std::size_t k = 0; k < n; ++k) r.samples[k] = sample(k);
        return r;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t k = w; k < n; k += threads) r.samples[k] = sample(k);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return r;
}

EchoRecord EchoSynthesizer::synthesize_indices(std::span<const std::size_t> indices) const
{
    EchoRecord r = empty_record();
    for (std::size_t k : indices) r.samples.at(k) = sample(k);
    return r;
}

EchoRecord synthesize_echo(const Target& target, const PatternSchedule& schedule, const SystemGeometry& geometry,
                           const TimingConfig& timing, const MotionConfig& motion, const ForwardOptions& options)
{
    return EchoSynthesizer(target, schedule, geometry, timing, motion, options).synthesize();
}

std::vector<unsigned char> encode_cech(const EchoRecord& echo)
{
    require(echo.samples.size() <= 0xFFFFFFFFull, "echo too long for CECH");
    detail::ByteWriter w;
    w.magic("CECH");
    w.u32(static_cast<std::uint32_t>(echo.samples.size()));
    w.f64(echo.timing.sample_interval);
    w.f64(echo.timing.f_if);
    w.u64(echo.seed);
    for (const auto& s : echo.samples) {
        w.f64(s.real());
        w.f64(s.imag());
    }
    return std::move(w.bytes());
}

EchoRecord decode_cech(std::span<const unsigned char> bytes)
{
    detail::ByteReader r(bytes);
    if (!r.magic("CECH")) throw IoError("not a CECH file (bad magic)");
    EchoRecord e;
    e.timing.n_samples = r.u32();
    e.timing.sample_interval = r.f64();
    e.timing.f_if = r.f64();
    e.seed = r.u64();
    if (e.timing.n_samples == 0 || !(e.timing.sample_interval > 0.0))
        throw IoError("CECH header has invalid N_s or T_p");
    if (r.remaining() != e.timing.n_samples * 16) throw IoError("CECH payload length does not match header");
    e.samples.resize(e.timing.n_samples);
    for (auto& s : e.samples) {
        double re = r.f64();
        double im = r.f64();
        s = {re, im};
    }
    return e;
}

void write_cech(const std::filesystem::path& path, const EchoRecord& echo)
{
    detail::write_file(path, encode_cech(echo));
}

EchoRecord read_cech(const std::filesystem::path& path)
{
    return decode_cech(detail::read_file(path));
}

} // namespace mvi
