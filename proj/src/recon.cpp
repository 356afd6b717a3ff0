#include "mvi/recon.hpp"

#include "binary_io.hpp"
#include "fft.hpp"
#include "json_io.hpp"
#include "mvi/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mvi {

std::string to_string(ReconMethod m)
{
    switch (m) {
    case ReconMethod::static_target: return "static";
    case ReconMethod::discrete_mode: return "discrete_mode";
    case ReconMethod::type1: return "type1";
    case ReconMethod::type2: return "type2";
    }
    return "unknown";
}

namespace {

ReconMethod method_from_string(const std::string& s)
{
    if (s == "static") return ReconMethod::static_target;
    if (s == "discrete_mode") return ReconMethod::discrete_mode;
    if (s == "type1") return ReconMethod::type1;
    if (s == "type2") return ReconMethod::type2;
    throw IoError("unknown recon method '" + s + "' in sidecar");
}

double median(std::vector<double> v)
{
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
    return m;
}

} // namespace

CompensationSpec CompensationSpec::discrete_mode(std::vector<VibrationComponent> components)
{
    CompensationSpec s;
    s.kind = Kind::discrete_mode;
    s.components = std::move(components);
    s.validate();
    return s;
}

void CompensationSpec::validate() const
{
    if (kind == Kind::discrete_mode) {
        require(!components.empty(), "discrete-mode compensation needs at least one component");
        for (const auto& c : components) c.validate();
    }
}

ComplexGrid reference_field(const ComplexGrid& pattern, const SystemGeometry& geometry)
{
    auto shape = GridShape::of(pattern);
    FresnelKernel kernel(geometry, shape, shape, geometry.z1);
    ComplexGrid e = kernel.apply(pattern);
    cplx g = path_phasor(geometry.z1, geometry.wavelength);
    for (auto& v : e.data()) v *= g;
    return e;
}

ComplexGrid static_compensation(const SystemGeometry& geometry, GridShape shape)
{
    ComplexGrid u(shape.rows, shape.cols, shape.pitch);
    const double k = geometry.wavenumber();
    const cplx g = path_phasor(geometry.z2, geometry.wavelength);
    for (std::size_t r = 0; r < shape.rows; ++r)
        for (std::size_t c = 0; c < shape.cols; ++c) {
            double dx = geometry.receiver_x - u.x_of(c);
            double dy = u.y_of(r);
            u(r, c) = g * std::polar(1.0, -k / (2.0 * geometry.z2) * (dx * dx + dy * dy));
        }
    return u;
}

ComplexGrid residual_phase(const SystemGeometry& geometry, GridShape shape)
{
    ComplexGrid u = static_compensation(geometry, shape);
    for (auto& v : u.data()) v = std::conj(v);
    return u;
}

cplx compensation_time_factor(const CompensationSpec& spec, const SystemGeometry& geometry, double t)
{
    if (spec.kind == CompensationSpec::Kind::static_target) return {1.0, 0.0};
    double w = fourier_series_eval(spec.components, t);
    return std::polar(1.0, -2.0 * geometry.wavenumber() * w);
}

ComplexGrid compensation(const CompensationSpec& spec, const SystemGeometry& geometry, GridShape shape, double t)
{
    spec.validate();
    ComplexGrid u = static_compensation(geometry, shape);
    cplx f = compensation_time_factor(spec, geometry, t);
    if (f != cplx(1.0, 0.0))
        for (auto& v : u.data()) v *= f;
    return u;
}

cplx correlation_gain(const SystemGeometry& geometry, GridShape shape, double eta, double lo_amplitude)
{
    const double p2 = shape.pitch * shape.pitch;
    const double cells = static_cast<double>(shape.rows * shape.cols);
    cplx phase = path_phasor(geometry.zd, geometry.wavelength, 3.0) *
                 std::conj(path_phasor(geometry.z1, geometry.wavelength)) *
                 path_phasor(geometry.z2, geometry.wavelength);
    return eta * lo_amplitude * cells * p2 * p2 * phase;
}

Correlator::Correlator(const PatternSchedule& schedule, const SystemGeometry& geometry, CorrelatorOptions options)
    : samples_per_pattern_(schedule.samples_per_pattern),
      cycle_(schedule.cycle_length()),
      coding_(schedule.coding),
      geometry_(geometry)
{
    schedule.validate();
    geometry.validate();
    require(options.eta != 0.0 && options.lo_amplitude != 0.0, "eta and A_LO must be non-zero");
    shape_ = GridShape::of(schedule.patterns.front());
    const std::size_t cells = shape_.rows * shape_.cols;
    FresnelKernel kernel(geometry, shape_, shape_, geometry.z1);
    const cplx g = path_phasor(geometry.z1, geometry.wavelength);
    conj_refs_.resize(cycle_ * cells);
    for (std::size_t a = 0; a < cycle_; ++a) {
        ComplexGrid e = kernel.apply(schedule.patterns[a]);
        for (std::size_t i = 0; i < cells; ++i) conj_refs_[a * cells + i] = std::conj(g * e[i]);
    }
    static_u_ = static_compensation(geometry, shape_).values();
    gain_ = correlation_gain(geometry, shape_, options.eta, options.lo_amplitude);
}

ReconImage Correlator::correlate(const EchoRecord& echo, const CompensationSpec& spec,
                                 std::span<const std::size_t> indices) const
{
    spec.validate();
    if (indices.empty()) throw InvalidArgument("correlation needs a non-empty sample index set");
    const auto& timing = echo.timing;
    require(echo.samples.size() == timing.n_samples, "echo length differs from its N_s");

    std::vector<cplx> acc(cycle_);
    std::vector<std::size_t> count(cycle_, 0);
    for (std::size_t k : indices) {
        if (k >= echo.samples.size())
            throw InvalidArgument("sample index " + std::to_string(k) + " outside the echo (N_s = " +
                                  std::to_string(echo.samples.size()) + ")");
        const double t = timing.time(k);
        cplx d = echo.samples[k] * std::conj(tone(timing.f_if, t));
        d *= compensation_time_factor(spec, geometry_, t);
        std::size_t a = (k / samples_per_pattern_) % cycle_;
        acc[a] += d;
        ++count[a];
    }

    std::size_t hit = 0;
    for (std::size_t a = 0; a < cycle_; ++a) hit += count[a] > 0;
    if (coding_ == Coding::hadamard && hit < cycle_)
        throw InvalidArgument("insufficient interval samples: the index set reaches " + std::to_string(hit) +
                              " of " + std::to_string(cycle_) + " Hadamard patterns");

    const std::size_t cells = shape_.rows * shape_.cols;
    std::vector<cplx> g(cells);
    for (std::size_t a = 0; a < cycle_; ++a) {
        if (count[a] == 0) continue;
        const cplx m = acc[a] / static_cast<double>(count[a]);
        const cplx* ref = conj_refs_.data() + a * cells;
        for (std::size_t i = 0; i < cells; ++i) g[i] += ref[i] * m;
    }
    const cplx norm = 1.0 / (static_cast<double>(hit) * gain_);
    for (std::size_t i = 0; i < cells; ++i) g[i] *= static_u_[i] * norm;

    ReconImage img;
    img.data = ComplexGrid(shape_.rows, shape_.cols, shape_.pitch, std::move(g));
    img.method = spec.kind == CompensationSpec::Kind::static_target ? ReconMethod::static_target
                                                                    : ReconMethod::discrete_mode;
    img.t0_index = indices.front();
    img.n_averaged = indices.size();
    return img;
}

std::vector<std::size_t> all_indices(std::size_t n_samples)
{
    std::vector<std::size_t> idx(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) idx[k] = k;
    return idx;
}

ReconImage first_order_correlate(const EchoRecord& echo, const PatternSchedule& schedule,
                                 const SystemGeometry& geometry, const CompensationSpec& spec,
                                 std::span<const std::size_t> indices, CorrelatorOptions options)
{
    return Correlator(schedule, geometry, options).correlate(echo, spec, indices);
}

ReconImage relevance_highpass(const ReconImage& image, double k, double floor)
{
    require(k > 0.0, "relevance filter factor k must be > 0");
    require(floor >= 0.0, "relevance floor must be >= 0");
    const auto& d = image.data;
    std::vector<double> mag(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) mag[i] = std::abs(d[i]);
    const double med = median(mag);
    std::vector<double> dev(mag.size());
    for (std::size_t i = 0; i < mag.size(); ++i) dev[i] = std::abs(mag[i] - med);
    const double sigma = 1.4826 * median(dev);
    const double threshold = std::max(k * sigma, floor);

    ReconImage out = image;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (mag[i] < threshold) out.data[i] = cplx{};
    return out;
}

ReconImage reconstruct_discrete_mode(const Correlator& correlator, const EchoRecord& echo,
                                     const CompensationSpec& mode, double filter_k, double floor)
{
    require(mode.kind == CompensationSpec::Kind::discrete_mode, "discrete-mode reconstruction needs a mode spec");
    auto idx = all_indices(echo.samples.size());
    ReconImage img = relevance_highpass(correlator.correlate(echo, mode, idx), filter_k, floor);
    img.method = ReconMethod::discrete_mode;
    return img;
}

ReconImage reconstruct_discrete_mode(const EchoRecord& echo, const PatternSchedule& schedule,
                                     const SystemGeometry& geometry, const CompensationSpec& mode, double filter_k,
                                     double floor)
{
    return reconstruct_discrete_mode(Correlator(schedule, geometry), echo, mode, filter_k, floor);
}

std::vector<std::size_t> subsample_indices(std::size_t t0, std::size_t n_interval, std::size_t n_samples)
{
    require(n_interval >= 1, "sampling interval must be >= 1");
    require(n_interval <= n_samples, "sampling interval exceeds the record length");
    if (t0 >= n_interval)
        throw InvalidArgument("t0 = " + std::to_string(t0) + " must be below the interval " +
                              std::to_string(n_interval));
    std::vector<std::size_t> idx;
    idx.reserve((n_samples - t0 + n_interval - 1) / n_interval);
    for (std::size_t k = t0; k < n_samples; k += n_interval) idx.push_back(k);
    return idx;
}

namespace {

ReconImage interval_recon(const Correlator& correlator, const EchoRecord& echo, std::size_t n, std::size_t t0,
                          std::size_t max_subsamples, ReconMethod method)
{
    // t0 may lie beyond the first interval; the frame then starts later in the record
    require(t0 < echo.samples.size(), "t0 lies outside the echo record");
    auto idx = subsample_indices(t0 % n, n, echo.samples.size());
    idx.erase(idx.begin(), std::lower_bound(idx.begin(), idx.end(), t0));
    if (max_subsamples > 0 && idx.size() > max_subsamples) idx.resize(max_subsamples);
    ReconImage img = correlator.correlate(echo, CompensationSpec::static_target(), idx);
    img.method = method;
    img.t0_index = t0;
    return img;
}

} // namespace

ReconImage reconstruct_type1(const Correlator& correlator, const EchoRecord& echo, std::size_t n_t, std::size_t t0,
                             std::size_t max_subsamples)
{
    return interval_recon(correlator, echo, n_t, t0, max_subsamples, ReconMethod::type1);
}

ReconImage reconstruct_type1(const EchoRecord& echo, const PatternSchedule& schedule,
                             const SystemGeometry& geometry, std::size_t n_t, std::size_t t0,
                             std::size_t max_subsamples)
{
    return reconstruct_type1(Correlator(schedule, geometry), echo, n_t, t0, max_subsamples);
}

ReconImage reconstruct_type2(const Correlator& correlator, const EchoRecord& echo, std::size_t n_i, std::size_t t0,
                             std::size_t max_subsamples)
{
    return interval_recon(correlator, echo, n_i, t0, max_subsamples, ReconMethod::type2);
}

ReconImage reconstruct_type2(const EchoRecord& echo, const PatternSchedule& schedule,
                             const SystemGeometry& geometry, std::size_t n_i, std::size_t t0,
                             std::size_t max_subsamples)
{
    return reconstruct_type2(Correlator(schedule, geometry), echo, n_i, t0, max_subsamples);
}

RealGrid kspace(const ReconImage& image)
{
    const auto& d = image.data;
    const std::size_t rows = d.rows(), cols = d.cols();
    auto X = detail::dft2(d.values(), rows, cols);
    // bin pitch in cycles per metre
    RealGrid out(rows, cols, 1.0 / (static_cast<double>(cols) * d.pitch()));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            out((r + rows / 2) % rows, (c + cols / 2) % cols) = std::abs(X[r * cols + c]);
    return out;
}

std::vector<CellIndex> kspace_peaks(const RealGrid& spectrum, double rel)
{
    require(rel > 0.0 && rel <= 1.0, "relative peak level must lie in (0, 1]");
    const std::size_t dc_r = spectrum.rows() / 2, dc_c = spectrum.cols() / 2;
    double peak = 0.0;
    for (std::size_t r = 0; r < spectrum.rows(); ++r)
        for (std::size_t c = 0; c < spectrum.cols(); ++c)
            if (r != dc_r || c != dc_c) peak = std::max(peak, spectrum(r, c));
    std::vector<CellIndex> bins;
    // round-off floor: a constant image has only its DC bin
    if (peak <= 1e-12 * spectrum(dc_r, dc_c) || peak <= 0.0) return bins;
    for (std::size_t r = 0; r < spectrum.rows(); ++r)
        for (std::size_t c = 0; c < spectrum.cols(); ++c)
            if ((r != dc_r || c != dc_c) && spectrum(r, c) >= rel * peak) bins.push_back({r, c});
    return bins;
}

void write_recon(const std::filesystem::path& base, const ReconImage& image)
{
    auto p = base;
    write_cgrd(p.replace_extension(".cgrd"), image.data);
    detail::json j = {{"method", to_string(image.method)},
                      {"mode_tag", image.mode_tag},
                      {"t0_index", image.t0_index},
                      {"n_averaged", image.n_averaged}};
    detail::write_json_file(p.replace_extension(".json"), j);
}

ReconImage read_recon(const std::filesystem::path& base)
{
    auto p = base;
    ReconImage img;
    img.data = read_cgrd(p.replace_extension(".cgrd"));
    auto bytes = detail::read_file(p.replace_extension(".json"));
    try {
        auto j = detail::json::parse(bytes.begin(), bytes.end());
        img.method = method_from_string(j.at("method").get<std::string>());
        img.mode_tag = j.at("mode_tag").get<std::string>();
        img.t0_index = j.at("t0_index").get<std::size_t>();
        img.n_averaged = j.at("n_averaged").get<std::size_t>();
    } catch (const detail::json::exception& e) {
        throw IoError("recon sidecar: " + std::string(e.what()));
    }
    return img;
}

} // namespace mvi
