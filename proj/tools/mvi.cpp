#include "mvi/errors.hpp"
#include "mvi/pipeline.hpp"
#include "mvi/png_export.hpp"
#include "mvi/recon.hpp"
#include "mvi/scene.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

enum Exit { ok = 0, config_error = 2, numeric_error = 3, io_error = 4 };

struct Common {
    std::string config;
    std::string preset;
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config, "scene JSON file");
    app->add_option("--preset", c.preset, "bundled scene name");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--seed", c.seed, "overrides the config seed");
    app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

mvi::SceneConfig load(const Common& c)
{
    if (c.config.empty() == c.preset.empty())
        throw mvi::InvalidArgument("exactly one of --config or --preset is required");
    mvi::SceneConfig cfg = c.preset.empty() ? mvi::load_scene(c.config) : mvi::preset(c.preset);
    if (c.seed) cfg = mvi::reseed(cfg, *c.seed);
    cfg.finalize();
    return cfg;
}

fs::path out_dir(const Common& c, const mvi::SceneConfig& cfg)
{
    fs::path p = c.out.empty() ? fs::path(cfg.output_dir) : fs::path(c.out);
    fs::create_directories(p);
    return p;
}

mvi::EchoRecord echo_for(const std::string& echo_path, const mvi::SceneConfig& cfg,
                         const mvi::PatternSchedule& schedule, unsigned threads)
{
    if (!echo_path.empty()) return mvi::read_cech(echo_path);
    return mvi::simulate(cfg, schedule, threads);
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream f(p, std::ios::binary);
    if (!f) throw mvi::IoError("cannot open " + p.string());
    f << text << '\n';
    if (!f) throw mvi::IoError("write failed: " + p.string());
}

void export_recon(const fs::path& base, const mvi::ReconImage& img)
{
    mvi::write_recon(base, img);
    mvi::export_png(base.string() + "_mag.png", img.data, mvi::PngMapping::magnitude);
    mvi::export_png(base.string() + "_phase.png", img.data, mvi::PngMapping::phase);
}

std::vector<mvi::ReconRequest> requests_of(const mvi::SceneConfig& cfg, mvi::ReconMethod m)
{
    std::vector<mvi::ReconRequest> r;
    for (const auto& q : cfg.recon)
        if (q.method == m) r.push_back(q);
    return r;
}

std::string frame_name(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04zu", i);
    return buf;
}

int report(const std::string& what, int code)
{
    std::cerr << "mvi: " << what << '\n';
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Micro-vibration coincidence imaging simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", mvi::version());

    Common common;
    std::string echo_path;

    auto* gen = app.add_subcommand("gen-patterns", "write the illumination schedule");
    add_common(gen, common);

    auto* sim = app.add_subcommand("simulate", "synthesize the coded echo");
    add_common(sim, common);

    auto* spec = app.add_subcommand("spectrum", "time-frequency analysis and mode detection");
    add_common(spec, common);
    spec->add_option("--echo", echo_path, "analyse this CECH record instead of a flat survey");

    auto* rs = app.add_subcommand("recon-static", "static complex target image");
    add_common(rs, common);
    rs->add_option("--echo", echo_path, "CECH record (simulated when omitted)");

    double d_freq = 0, d_amp = 0, d_phase = 0;
    auto* rd = app.add_subcommand("recon-discrete", "per-mode images of discrete scatterers");
    add_common(rd, common);
    rd->add_option("--echo", echo_path, "CECH record (simulated when omitted)");
    rd->add_option("--frequency", d_freq, "mode frequency in Hz (default: config requests)");
    rd->add_option("--amplitude", d_amp, "mode amplitude in m");
    rd->add_option("--phase", d_phase, "mode phase in rad");

    std::size_t n_interval = 0;
    std::vector<std::size_t> t0s;
    auto* r1 = app.add_subcommand("recon-type1", "interval sampling at the common period");
    add_common(r1, common);
    r1->add_option("--echo", echo_path, "CECH record (simulated when omitted)");
    r1->add_option("--n-interval", n_interval, "subsampling interval (default: detected)");
    r1->add_option("--t0", t0s, "start indices");

    double t2_freq = 0;
    auto* r2 = app.add_subcommand("recon-type2", "interval sampling at one mode period");
    add_common(r2, common);
    r2->add_option("--echo", echo_path, "CECH record (simulated when omitted)");
    r2->add_option("--frequency", t2_freq, "target mode frequency in Hz");
    r2->add_option("--t0", t0s, "start indices");

    std::string image_base;
    std::string ks_out;
    auto* ks = app.add_subcommand("kspace", "centred spatial spectrum of a reconstruction");
    ks->add_option("--image", image_base, "reconstruction base path (without .cgrd)")->required();
    ks->add_option("--out", ks_out, "output base path (default: <image>_kspace)");

    auto* pm = app.add_subcommand("plate-modes", "principal mode shapes of the plate target");
    add_common(pm, common);

    bool no_png = false;
    auto* runc = app.add_subcommand("run", "full pipeline with manifest");
    add_common(runc, common);
    runc->add_flag("--no-png", no_png, "skip PNG renders");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (*ks) {
            mvi::ReconImage img = mvi::read_recon(image_base);
            mvi::RealGrid k = mvi::kspace(img);
            std::string base = ks_out.empty() ? image_base + "_kspace" : ks_out;
            if (fs::path(base).has_parent_path()) fs::create_directories(fs::path(base).parent_path());
            mvi::write_cgrd(base + ".cgrd", k);
            mvi::export_png(base + ".png", k, mvi::PngMapping::magnitude);
            json peaks = json::array();
            for (auto c : mvi::kspace_peaks(k)) peaks.push_back({c.row, c.col});
            write_text(base + ".json", json{{"peaks", peaks}}.dump(2));
            return ok;
        }

        const mvi::SceneConfig cfg = load(common);

        if (*runc) {
            mvi::RunOptions opt;
            opt.out_dir = common.out;
            opt.threads = common.threads;
            opt.write_png = !no_png;
            auto r = mvi::run(cfg, opt);
            std::cout << r.out_dir.string() << '\n';
            return ok;
        }

        const fs::path out = out_dir(common, cfg);
        const mvi::PatternSchedule schedule = mvi::build_schedule(cfg);

        if (*gen) {
            mvi::write_schedule(out, schedule);
            return ok;
        }
        if (*sim) {
            mvi::write_cech(out / "echo.cech", mvi::simulate(cfg, schedule, common.threads));
            return ok;
        }
        if (*spec) {
            mvi::SpectralResult r;
            if (echo_path.empty()) {
                r = mvi::analyse_spectrum(cfg, mvi::survey_echo(cfg, common.threads));
            } else {
                r = mvi::analyse_spectrum(cfg, mvi::read_cech(echo_path));
            }
            mvi::write_spectrum_csv(out / "spectrogram.csv", r.spectrum);
            mvi::write_spectrum_cgrd(out / "spectrogram.cgrd", r.spectrum);
            write_text(out / "modes.json", mvi::modes_to_json(r.modes, r.n_interval));
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
            return ok;
        }
        if (*pm) {
            const auto* plate = std::get_if<mvi::PlateTarget>(&cfg.target);
            if (!plate) throw mvi::InvalidArgument("plate-modes needs a plate target");
            json list = json::array();
            for (std::size_t m = 0; m < plate->modes.size(); ++m) {
                const auto& mode = plate->modes[m];
                char name[32];
                std::snprintf(name, sizeof name, "mode_%02zu", m);
                mvi::write_cgrd(out / (std::string(name) + ".cgrd"), mode.shape);
                mvi::export_png(out / (std::string(name) + ".png"), mode.shape, mvi::PngMapping::real);
                json e{{"file", std::string(name) + ".cgrd"}, {"kind", mvi::to_string(mode.kind)}};
                if (mode.kind == mvi::ModeKind::analytic) {
                    e["i"] = mode.i;
                    e["j"] = mode.j;
                    e["eigenfrequency_hz"] =
                        mvi::plate_eigenfrequency(mode.i, mode.j, plate->a, plate->b, plate->material) /
                        (2.0 * M_PI);
                }
                json comps = json::array();
                for (const auto& c : mode.temporal)
                    comps.push_back({{"Z", c.amplitude}, {"f", c.frequency}, {"phi", c.phase}});
                e["components"] = comps;
                list.push_back(e);
            }
            write_text(out / "modes.json", json{{"modes", list}}.dump(2));
            return ok;
        }

        mvi::EchoRecord echo = echo_for(echo_path, cfg, schedule, common.threads);
        mvi::Correlator corr(schedule, cfg.geometry, {cfg.eta, cfg.lo_amplitude});

        if (*rs) {
            auto img = corr.correlate(echo, mvi::CompensationSpec::static_target(), mvi::all_indices(echo.samples.size()));
            img.mode_tag = "static";
            export_recon(out / "static", img);
            return ok;
        }
        if (*rd) {
            auto reqs = requests_of(cfg, mvi::ReconMethod::discrete_mode);
            if (d_freq > 0) {
                mvi::ReconRequest q;
                q.method = mvi::ReconMethod::discrete_mode;
                q.tag = "mode";
                q.components = {{d_amp, d_freq, d_phase}};
                reqs = {q};
            }
            if (reqs.empty()) throw mvi::InvalidArgument("no discrete_mode request in the config and no --frequency");
            for (const auto& q : reqs) {
                auto img = mvi::reconstruct_discrete_mode(corr, echo, mvi::CompensationSpec::discrete_mode(q.components),
                                                          q.filter_k, q.floor);
                img.mode_tag = q.tag;
                export_recon(out / q.tag, img);
            }
            return ok;
        }
        if (*r1 || *r2) {
            const bool type1 = r1->parsed();
            auto reqs = requests_of(cfg, type1 ? mvi::ReconMethod::type1 : mvi::ReconMethod::type2);
            if (reqs.empty() || (type1 ? n_interval > 0 : t2_freq > 0) || !t0s.empty()) {
                mvi::ReconRequest q = reqs.empty() ? mvi::ReconRequest{} : reqs.front();
                q.method = type1 ? mvi::ReconMethod::type1 : mvi::ReconMethod::type2;
                if (q.tag.empty()) q.tag = type1 ? "type1" : "type2";
                if (n_interval > 0) q.n_interval = n_interval;
                if (t2_freq > 0) q.frequency = t2_freq;
                if (!t0s.empty()) q.t0 = t0s;
                reqs = {q};
            }
            for (const auto& q : reqs) {
                std::size_t n = 0;
                if (type1) {
                    n = q.n_interval;
                    if (n == 0) n = mvi::analyse_spectrum(cfg, mvi::survey_echo(cfg, common.threads)).n_interval;
                    if (n == 0) throw mvi::NumericError("no vibration frequency detected; pass --n-interval");
                } else {
                    if (!(q.frequency > 0)) throw mvi::InvalidArgument("recon-type2 needs --frequency");
                    n = static_cast<std::size_t>(std::lround(cfg.timing.sample_rate() / q.frequency));
                    if (n == 0) throw mvi::InvalidArgument("frequency above the sample rate");
                }
                json frames = json::array();
                fs::create_directories(out / q.tag);
                for (std::size_t i = 0; i < q.t0.size(); ++i) {
                    auto img = type1 ? mvi::reconstruct_type1(corr, echo, n, q.t0[i], q.max_subsamples)
                                     : mvi::reconstruct_type2(corr, echo, n, q.t0[i], q.max_subsamples);
                    img.mode_tag = q.tag;
                    export_recon(out / q.tag / frame_name(i), img);
                    frames.push_back({{"t0", q.t0[i]}, {"image", frame_name(i) + ".cgrd"}});
                }
                write_text(out / q.tag / "frames.json",
                           json{{"tag", q.tag}, {"n_interval", n}, {"frames", frames}}.dump(2));
            }
            return ok;
        }
    } catch (const mvi::StageError& e) {
        std::string msg = "stage '" + e.stage() + "': " + e.what();
        switch (e.kind()) {
        case mvi::StageError::Kind::config: return report(msg, config_error);
        case mvi::StageError::Kind::numeric: return report(msg, numeric_error);
        case mvi::StageError::Kind::io: return report(msg, io_error);
        }
    } catch (const mvi::InvalidArgument& e) {
        return report(e.what(), config_error);
    } catch (const mvi::NumericError& e) {
        return report(e.what(), numeric_error);
    } catch (const mvi::IoError& e) {
        return report(e.what(), io_error);
    } catch (const fs::filesystem_error& e) {
        return report(e.what(), io_error);
    } catch (const std::exception& e) {
        return report(e.what(), numeric_error);
    }
    return ok;
}
