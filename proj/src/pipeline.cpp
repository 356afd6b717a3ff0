#include "mvi/pipeline.hpp"

#include "binary_io.hpp"
#include "json_io.hpp"
#include "mvi/errors.hpp"
#include "mvi/metrics.hpp"
#include "mvi/png_export.hpp"
#include "mvi/recon.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

namespace mvi {

using detail::json;

std::string version()
{
    return MVI_VERSION;
}

std::string sha256_hex(std::span<const unsigned char> bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw NumericError("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path)
{
    return sha256_hex(detail::read_file(path));
}

EchoRecord simulate(const SceneConfig& config, const PatternSchedule& schedule, unsigned threads)
{
    return synthesize_echo(config.target, schedule, config.geometry, config.timing, config.motion,
                           config.forward_options(threads));
}

namespace {

std::size_t window_for(const SceneConfig& c)
{
    if (c.spectral.window_len > 0) return c.spectral.window_len;
    return std::max<std::size_t>(16, static_cast<std::size_t>(std::lround(4.0 * c.timing.sample_rate())));
}

} // namespace

EchoRecord survey_echo(const SceneConfig& config, unsigned threads)
{
    const std::size_t window = window_for(config);
    std::size_t n = config.spectral.survey_samples > 0 ? config.spectral.survey_samples : 8 * window;
    n = std::max(n, window);
    TimingConfig timing = config.timing;
    timing.n_samples = n;
    PatternSchedule flat = uniform_pattern(config.grid.side, config.grid.pitch);
    flat.with_timing(1, n);
    return synthesize_echo(config.target, flat, config.geometry, timing, config.motion,
                           config.forward_options(threads));
}

SpectralResult analyse_spectrum(const SceneConfig& config, const EchoRecord& survey)
{
    SpectralResult r;
    const std::size_t window = window_for(config);
    r.spectrum = spectrogram(survey, window, config.spectral.hop);
    DetectOptions opt;
    opt.threshold_factor = config.spectral.threshold_factor;
    opt.prune_harmonics = true;
    r.modes = detect_frequencies(r.spectrum, config.timing.sample_rate(), config.spectral.max_modes, opt);
    std::vector<std::size_t> counts;
    for (const auto& m : r.modes) {
        counts.push_back(m.samples_per_period);
        if (m.rounding_warning) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "f = %.6g Hz: f_samp / f is not an integer; N = %zu is rounded",
                          m.frequency, m.samples_per_period);
            r.warnings.emplace_back(buf);
        }
    }
    if (!counts.empty()) r.n_interval = interval_lcm(counts);
    return r;
}

namespace {

using Clock = std::chrono::steady_clock;

class StageRunner {
public:
    template <typename F>
    auto operator()(const std::string& name, F&& f) -> decltype(f())
    {
        auto start = Clock::now();
        try {
            if constexpr (std::is_void_v<decltype(f())>) {
                f();
                record(name, start);
            } else {
                auto v = f();
                record(name, start);
                return v;
            }
        } catch (const StageError&) {
            throw;
        } catch (const InvalidArgument& e) {
            throw StageError(name, StageError::Kind::config, e.what());
        } catch (const NumericError& e) {
            throw StageError(name, StageError::Kind::numeric, e.what());
        } catch (const IoError& e) {
            throw StageError(name, StageError::Kind::io, e.what());
        } catch (const std::filesystem::filesystem_error& e) {
            throw StageError(name, StageError::Kind::io, e.what());
        }
    }

    json timings;

private:
    void record(const std::string& name, Clock::time_point start)
    {
        double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        timings.push_back({{"stage", name}, {"ms", ms}});
    }
};

class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path root, bool png) : root_(std::move(root)), png_(png) {}

    void grid(const std::string& rel, const ComplexGrid& g) { write_cgrd(add(rel), g); }
    void grid(const std::string& rel, const RealGrid& g) { write_cgrd(add(rel), g); }
    void recon(const std::string& rel_base, const ReconImage& img)
    {
        write_recon(root_ / rel_base, img);
        add(rel_base + ".cgrd");
        add(rel_base + ".json");
        if (png_) {
            export_png(add(rel_base + "_mag.png"), img.data, PngMapping::magnitude);
            export_png(add(rel_base + "_phase.png"), img.data, PngMapping::phase);
        }
    }
    void png(const std::string& rel, const RealGrid& g, PngMapping m)
    {
        if (png_) export_png(add(rel), g, m);
    }
    void json_file(const std::string& rel, const json& j) { detail::write_json_file(add(rel), j); }
    std::filesystem::path add(const std::string& rel)
    {
        files_.insert(rel);
        return root_ / rel;
    }

    const std::set<std::string>& files() const { return files_; }
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
    bool png_;
    std::set<std::string> files_;
};

std::string frame_name(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04zu", i);
    return buf;
}

bool same_mode(const std::vector<VibrationComponent>& a, const std::vector<VibrationComponent>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i].frequency - b[i].frequency) > 1e-9 * b[i].frequency ||
            std::abs(a[i].amplitude - b[i].amplitude) > 1e-12 + 1e-9 * b[i].amplitude)
            return false;
    return true;
}

std::vector<bool> mode_truth(const DiscreteTargetSet& d, const std::vector<VibrationComponent>& comps)
{
    std::vector<bool> truth(d.shape.rows * d.shape.cols, false);
    for (const auto& s : d.scatterers)
        if (same_mode(s.components, comps)) truth[s.cell.row * d.shape.cols + s.cell.col] = true;
    return truth;
}

// Plate mode whose fundamental matches f, if any.
std::optional<std::size_t> plate_mode_for(const PlateTarget& p, double f)
{
    for (std::size_t m = 0; m < p.modes.size(); ++m)
        for (const auto& c : p.modes[m].temporal)
            if (std::abs(c.frequency - f) <= 1e-9 * f) return m;
    return std::nullopt;
}

} // namespace

RunResult run(const SceneConfig& config_in, const RunOptions& options)
{
    StageRunner stage;
    SceneConfig config = stage("config", [&] {
        SceneConfig c = config_in;
        c.finalize();
        return c;
    });
    RunResult result;
    result.out_dir = options.out_dir.empty() ? std::filesystem::path(config.output_dir) : options.out_dir;
    ArtifactWriter out(result.out_dir, options.write_png);
    stage("prepare-output", [&] { std::filesystem::create_directories(result.out_dir); });

    const std::string config_text = serialize_scene(config);
    json manifest;
    manifest["name"] = config.name;
    manifest["version"] = version();
    manifest["seed"] = config.seed;
    manifest["input_hash"] =
        sha256_hex({reinterpret_cast<const unsigned char*>(config_text.data()), config_text.size()});
    json metrics = json::object();
    json warnings = json::array();
    if (!config.notes.empty()) warnings.push_back(config.notes);

    stage("write-config", [&] {
        detail::write_json_file(out.add("config.json"), json::parse(config_text));
    });

    PatternSchedule schedule = stage("patterns", [&] { return build_schedule(config); });

    EchoRecord echo = stage("simulate", [&] { return simulate(config, schedule, options.threads); });
    stage("export-echo", [&] {
        write_cech(out.add("echo.cech"), echo);
        ComplexGrid truth = complex_target_snapshot(config.target, config.geometry, config.timing.time(0));
        out.grid("truth/snapshot_t0.cgrd", truth);
        out.png("truth/snapshot_t0_phase.png", phase(truth), PngMapping::real);
    });

    SpectralResult spectral = stage("spectral", [&] {
        EchoRecord survey = survey_echo(config, options.threads);
        return analyse_spectrum(config, survey);
    });
    stage("export-spectral", [&] {
        write_spectrum_csv(out.add("spectrum/spectrogram.csv"), spectral.spectrum);
        write_spectrum_cgrd(out.add("spectrum/spectrogram.cgrd"), spectral.spectrum);
        detail::write_json_file(out.add("spectrum/modes.json"),
                                json::parse(modes_to_json(spectral.modes, spectral.n_interval)));
    });
    for (const auto& w : spectral.warnings) warnings.push_back(w);
    metrics["detected_N_t"] = spectral.n_interval;

    std::optional<Correlator> correlator;
    if (!config.recon.empty())
        stage("reference-fields",
              [&] { correlator.emplace(schedule, config.geometry, CorrelatorOptions{config.eta, config.lo_amplitude}); });

    for (const auto& req : config.recon) {
        const std::string name = "recon:" + req.tag;
        stage(name, [&] {
            json m;
            switch (req.method) {
            case ReconMethod::static_target: {
                ReconImage img = correlator->correlate(echo, CompensationSpec::static_target(),
                                                       all_indices(echo.samples.size()));
                img.mode_tag = req.tag;
                out.recon("recon/" + req.tag, img);
                ComplexGrid truth = complex_target_snapshot(config.target, config.geometry, config.timing.time(0));
                m["complex_correlation"] = complex_correlation(img.data, truth);
                break;
            }
            case ReconMethod::discrete_mode: {
                ReconImage img = reconstruct_discrete_mode(*correlator, echo,
                                                           CompensationSpec::discrete_mode(req.components),
                                                           req.filter_k, req.floor);
                img.mode_tag = req.tag;
                out.recon("recon/" + req.tag, img);
                std::size_t support = 0;
                for (bool b : support_mask(img.data)) support += b;
                m["support_size"] = support;
                if (const auto* d = std::get_if<DiscreteTargetSet>(&config.target))
                    m["support_f1"] = support_f1(support_mask(img.data), mode_truth(*d, req.components));
                break;
            }
            case ReconMethod::type1:
            case ReconMethod::type2: {
                std::size_t n = 0;
                if (req.method == ReconMethod::type1) {
                    n = req.n_interval > 0 ? req.n_interval : spectral.n_interval;
                    if (n == 0)
                        throw InvalidArgument("no vibration frequency detected; set n_interval explicitly");
                } else {
                    n = static_cast<std::size_t>(std::lround(config.timing.sample_rate() / req.frequency));
                    require(n >= 1, "type2 frequency is above the sample rate");
                }
                m["n_interval"] = n;
                json corr = json::array(), resid = json::array(), frames = json::array();
                std::vector<std::vector<CellIndex>> peak_sets;
                const auto* plate = std::get_if<PlateTarget>(&config.target);
                std::optional<std::size_t> mode;
                if (req.method == ReconMethod::type2 && plate) mode = plate_mode_for(*plate, req.frequency);
                for (std::size_t i = 0; i < req.t0.size(); ++i) {
                    std::size_t t0 = req.t0[i];
                    ReconImage img = req.method == ReconMethod::type1
                                         ? reconstruct_type1(*correlator, echo, n, t0, req.max_subsamples)
                                         : reconstruct_type2(*correlator, echo, n, t0, req.max_subsamples);
                    img.mode_tag = req.tag;
                    const std::string base = "recon/" + req.tag + "/" + frame_name(i);
                    out.recon(base, img);
                    RealGrid ks = kspace(img);
                    const std::string kbase = "kspace/" + req.tag + "/" + frame_name(i);
                    out.grid(kbase + ".cgrd", ks);
                    out.png(kbase + ".png", ks, PngMapping::magnitude);
                    peak_sets.push_back(kspace_peaks(ks));
                    frames.push_back({{"t0", t0}, {"image", base + ".cgrd"}, {"kspace", kbase + ".cgrd"}});

                    const double t = config.timing.time(t0);
                    if (req.method == ReconMethod::type1) {
                        corr.push_back(complex_correlation(
                            img.data, complex_target_snapshot(config.target, config.geometry, t)));
                    } else if (mode) {
                        ComplexGrid oracle = single_mode_snapshot(*plate, config.geometry, *mode, t);
                        corr.push_back(complex_correlation(img.data, oracle));
                        resid.push_back(residual_energy(img.data, oracle));
                    }
                }
                out.json_file("recon/" + req.tag + "/frames.json", {{"tag", req.tag}, {"frames", frames}});
                bool invariant = true;
                for (const auto& s : peak_sets) invariant = invariant && s == peak_sets.front();
                m["kspace_peaks_invariant"] = invariant;
                if (!corr.empty()) m["complex_correlation"] = corr;
                if (!resid.empty()) m["residual_energy"] = resid;
                break;
            }
            }
            metrics[req.tag] = m;
        });
    }

    manifest["metrics"] = metrics;
    manifest["warnings"] = warnings;
    manifest["timings"] = stage.timings;
    stage("manifest", [&] {
        json files = json::array();
        for (const auto& rel : out.files()) {
            auto path = out.root() / rel;
            files.push_back({{"path", rel}, {"sha256", sha256_file(path)}, {"bytes", std::filesystem::file_size(path)}});
            result.files.push_back(rel);
        }
        manifest["files"] = files;
        result.manifest_json = manifest.dump(2);
        detail::write_json_file(out.root() / "manifest.json", manifest);
    });
    return result;
}

} // namespace mvi
