// Acceptance harness: one PASS/FAIL line per criterion, exit 1 if any failed.
#include "../unit/helpers.hpp"

#include "mvi/forward.hpp"
#include "mvi/geometry.hpp"
#include "mvi/metrics.hpp"
#include "mvi/patterns.hpp"
#include "mvi/pipeline.hpp"
#include "mvi/recon.hpp"
#include "mvi/scene.hpp"
#include "mvi/spectral.hpp"
#include "mvi/targets.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>

using namespace mvi;
namespace fs = std::filesystem;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

unsigned worker_threads()
{
    return std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---- 1: static recovery -------------------------------------------------

Outcome static_recovery()
{
    const auto start = clock_type::now();
    const std::size_t side = 32;
    const auto g = ideal_geometry(1550e-9, 10.0, side);
    const double p = ideal_pitch(g.wavelength, g.z1, side);
    DiscreteTargetSet d;
    d.shape = {side, side, p};
    for (std::size_t i = 0; i < side * side; ++i) {
        auto [a, b] = counter_normal_pair(11, stream::test, i);
        Scatterer s;
        s.cell = {i / side, i % side};
        s.reflectivity = {a, b};
        d.scatterers.push_back(s);
    }
    auto sched = hadamard_patterns(side, p).with_timing(1, side * side);
    TimingConfig t;
    t.sample_interval = 1.0 / 120.0;
    t.n_samples = side * side;
    ForwardOptions fo;
    fo.threads = worker_threads();
    auto echo = synthesize_echo(d, sched, g, t, {}, fo);
    auto img = first_order_correlate(echo, sched, g, CompensationSpec::static_target(), all_indices(t.n_samples));
    const double err = max_relative_error(img.data, complex_target_snapshot(d, g, 0.0));
    const double secs = seconds_since(start);
    std::ostringstream os;
    os << "max rel err " << err << ", " << secs << " s";
    return {err <= 1e-9 && secs <= 10.0, os.str()};
}

// ---- 2: discrete modes --------------------------------------------------

std::vector<bool> truth_mask(const DiscreteTargetSet& d, const VibrationComponent& mode)
{
    std::vector<bool> m(d.shape.rows * d.shape.cols, false);
    for (const auto& s : d.scatterers)
        for (const auto& c : s.components)
            if (c == mode) m[s.cell.row * d.shape.cols + s.cell.col] = true;
    return m;
}

Outcome discrete_modes()
{
    const auto start = clock_type::now();
    const unsigned threads = worker_threads();
    double worst_f1 = 1.0;
    std::size_t empty = 0;
    const std::size_t runs = 50;
    const VibrationComponent absent{500e-9, 7.0, 0.0};
    for (std::uint64_t seed = 1; seed <= runs; ++seed) {
        SceneConfig c = preset("table2_discrete", seed);
        auto sched = build_schedule(c);
        auto echo = simulate(c, sched, threads);
        Correlator corr(sched, c.geometry, {c.eta, c.lo_amplitude});
        const auto& d = std::get<DiscreteTargetSet>(c.target);
        if (seed == 1) {
            for (const auto& r : c.recon) {
                auto img = reconstruct_discrete_mode(corr, echo, CompensationSpec::discrete_mode(r.components),
                                                     r.filter_k, r.floor);
                worst_f1 = std::min(worst_f1, support_f1(support_mask(img.data), truth_mask(d, r.components[0])));
            }
        }
        const auto& r0 = c.recon.front();
        auto img = reconstruct_discrete_mode(corr, echo, CompensationSpec::discrete_mode({absent}), r0.filter_k,
                                             r0.floor);
        std::size_t support = 0;
        for (bool b : support_mask(img.data)) support += b;
        empty += support == 0;
    }
    const double rate = double(empty) / double(runs);
    const double secs = seconds_since(start);
    std::ostringstream os;
    os << "min F1 " << worst_f1 << ", absent-frequency empty support " << empty << "/" << runs << ", " << secs
       << " s";
    return {worst_f1 >= 0.9 && rate >= 0.95 && secs <= 120.0, os.str()};
}

// ---- 3 and 5: type-1 frames and k-space ---------------------------------

struct Type1Frames {
    std::vector<ReconImage> frames;
    std::vector<double> corr;
    double shift_err = 0.0;
};

Type1Frames type1_frames()
{
    SceneConfig c = preset("table3_plate_type1", 1);
    const std::size_t n_t = 400;
    const std::size_t cover = c.timing.n_samples / n_t;  // subsamples per frame
    // record twice as long so a frame at t0 + N_t still gets the same number of subsamples
    c.timing.n_samples *= 2;
    auto sched = build_schedule(c);
    ForwardOptions fo = c.forward_options(worker_threads());
    EchoSynthesizer synth(c.target, sched, c.geometry, c.timing, c.motion, fo);
    std::vector<std::size_t> needed;
    for (std::size_t t0 : {0, 100, 200, 300, 400}) {
        auto idx = subsample_indices(t0 % n_t, n_t, c.timing.n_samples);
        idx.erase(idx.begin(), std::lower_bound(idx.begin(), idx.end(), t0));
        idx.resize(cover);
        needed.insert(needed.end(), idx.begin(), idx.end());
    }
    std::sort(needed.begin(), needed.end());
    needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
    EchoRecord echo = synth.synthesize_indices(needed);
    Correlator corr(sched, c.geometry, {c.eta, c.lo_amplitude});

    Type1Frames out;
    for (std::size_t t0 : {0, 100, 200, 300}) {
        out.frames.push_back(reconstruct_type1(corr, echo, n_t, t0, cover));
        out.corr.push_back(
            complex_correlation(out.frames.back().data, complex_target_snapshot(c.target, c.geometry, c.timing.time(t0))));
    }
    auto shifted = reconstruct_type1(corr, echo, n_t, n_t, cover);
    out.shift_err = max_relative_error(shifted.data, out.frames.front().data);
    return out;
}

Outcome type1_equivalence(const Type1Frames& f)
{
    double worst = 1.0;
    std::ostringstream os;
    os << "corr";
    for (double c : f.corr) {
        worst = std::min(worst, c);
        os << " " << c;
    }
    os << ", t0 vs t0+N_t max rel diff " << f.shift_err;
    return {worst >= 0.99 && f.shift_err <= 1e-10, os.str()};
}

Outcome kspace_invariance(const Type1Frames& f)
{
    std::vector<std::vector<CellIndex>> sets;
    for (const auto& img : f.frames) sets.push_back(kspace_peaks(kspace(img)));
    bool same = true;
    for (const auto& s : sets) same = same && s == sets.front();
    std::ostringstream os;
    os << "peak counts";
    for (const auto& s : sets) os << " " << s.size();
    os << (same ? ", identical" : ", sets differ between frames");
    return {same && !sets.front().empty(), os.str()};
}

// ---- 4: type-2 isolation ------------------------------------------------

std::size_t mode_at(const PlateTarget& p, double f)
{
    for (std::size_t m = 0; m < p.modes.size(); ++m)
        for (const auto& c : p.modes[m].temporal)
            if (std::abs(c.frequency - f) < 1e-9) return m;
    return p.modes.size();
}

Outcome type2_isolation()
{
    const std::size_t n_i = 80;
    const std::size_t runs = 50;
    double corr_seed1 = 0.0;
    std::size_t decreasing = 0;
    for (std::uint64_t seed = 1; seed <= runs; ++seed) {
        SceneConfig c = preset("table3_plate_type2", seed);
        const auto& plate = std::get<PlateTarget>(c.target);
        const std::size_t mode = mode_at(plate, 5.0);
        auto sched = build_schedule(c);
        const std::size_t n = sched.cycle_length();  // one pass over every pattern
        EchoSynthesizer synth(c.target, sched, c.geometry, c.timing, c.motion, c.forward_options(worker_threads()));
        auto idx = subsample_indices(0, n_i, c.timing.n_samples);
        idx.resize(4 * n);
        EchoRecord echo = synth.synthesize_indices(idx);
        Correlator corr(sched, c.geometry, {c.eta, c.lo_amplitude});
        ComplexGrid oracle = single_mode_snapshot(plate, c.geometry, mode, 0.0);
        auto short_img = reconstruct_type2(corr, echo, n_i, 0, n);
        auto long_img = reconstruct_type2(corr, echo, n_i, 0, 4 * n);
        if (seed == 1) corr_seed1 = complex_correlation(long_img.data, oracle);
        decreasing += residual_energy(long_img.data, oracle) < residual_energy(short_img.data, oracle);
    }
    const double rate = double(decreasing) / double(runs);
    std::ostringstream os;
    os << "corr " << corr_seed1 << ", residual(4n) < residual(n) in " << decreasing << "/" << runs;
    return {corr_seed1 >= 0.8 && rate >= 0.8, os.str()};
}

// ---- 6: plate solver ----------------------------------------------------

Outcome plate_solver()
{
    PlateMaterial unit;
    unit.rho = 1.0;
    unit.E = unit.rho * 2.0 * unit.h * 12.0 * (1.0 - unit.mu * unit.mu) / std::pow(unit.h, 3);
    const double w11 = plate_eigenfrequency(1, 1, 1.0, 1.0, unit);
    const double w_err = std::abs(w11 - 2.0 * M_PI * M_PI);

    PlateMaterial steel;
    const double a = 1.0, b = 1.0;
    const std::size_t side = 256;
    GridShape s{side, side, a / side};
    std::vector<RealGrid> modes;
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j) modes.push_back(plate_mode_shape(i, j, a, b, steel, s));
    const double dA = (a / side) * (b / side);
    double gram_err = 0.0;
    for (std::size_t p = 0; p < modes.size(); ++p)
        for (std::size_t q = p; q < modes.size(); ++q) {
            double acc = 0.0;
            for (std::size_t k = 0; k < modes[p].size(); ++k) acc += modes[p][k] * modes[q][k];
            acc *= steel.mass_per_area() * dA;
            gram_err = std::max(gram_err, std::abs(acc - (p == q ? 1.0 : 0.0)));
        }

    // residual of eta'' + w^2 eta = q by central differences, relative RMS
    const double w = 2.0 * M_PI * 4.0, w0 = 2.0 * M_PI * 2.5;
    const double dt = (2.0 * M_PI / w) / 1000.0;
    const std::size_t n = 10000;
    std::vector<double> q(n);
    for (std::size_t k = 0; k < n; ++k) q[k] = std::sin(w0 * k * dt) + 0.3 * std::cos(3.1 * w0 * k * dt);
    auto eta = canonical_solution(w, 0.0, 0.0, q, dt);
    double r2 = 0.0, q2 = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        double r = (eta[k + 1] - 2.0 * eta[k] + eta[k - 1]) / (dt * dt) + w * w * eta[k] - q[k];
        r2 += r * r;
        q2 += q[k] * q[k];
    }
    const double rms = std::sqrt(r2 / q2);
    std::ostringstream os;
    os << "|w11 - 2pi^2| " << w_err << ", Gram err " << gram_err << ", ODE residual " << rms;
    return {w_err <= 1e-9 && gram_err <= 1e-3 && rms <= 1e-4, os.str()};
}

// ---- 7: Bessel lines ----------------------------------------------------

Outcome bessel_lines()
{
    const std::size_t side = 8;
    const auto g = ideal_geometry(1550e-9, 10.0, side);
    const double p = ideal_pitch(g.wavelength, g.z1, side);
    const double fs = 1200.0, fv = 15.0, z = 1200e-9;
    const std::size_t n = 4800;
    auto flat = uniform_pattern(side, p).with_timing(1, n);
    auto point = [&](std::vector<VibrationComponent> comps) {
        DiscreteTargetSet d;
        d.shape = {side, side, p};
        Scatterer s;
        s.cell = {3, 1};
        s.components = std::move(comps);
        d.scatterers.push_back(s);
        return d;
    };
    TimingConfig t;
    t.sample_interval = 1.0 / fs;
    t.n_samples = n;
    auto still = synthesize_echo(point({}), flat, g, t, {});
    auto moving = synthesize_echo(point({{z, fv, 0.0}}), flat, g, t, {});
    const double base = std::abs(still.samples[0]);
    const double B = 4.0 * M_PI * z / g.wavelength;
    double worst = 0.0;
    for (int m = -5; m <= 5; ++m) {
        double f = m * fv;
        if (f < 0) f += fs;
        const double expect = std::abs(bessel_j(m, B));
        const double got = line_amplitude(moving.samples, fs, f) / base;
        worst = std::max(worst, std::abs(got - expect) / expect);
    }
    std::ostringstream os;
    os << "B " << B << ", worst relative line error " << worst;
    return {worst <= 0.02, os.str()};
}

// ---- 8: range approximation ---------------------------------------------

Outcome range_approximation()
{
    std::size_t violations = 0;
    const std::size_t draws = 10000;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        auto u = [&](std::uint64_t k) { return testing::uniform(99, 6 * i + k); };
        const double zd = 1.0 + 999.0 * u(0);
        const double eta = 1e-4 * (2.0 * u(1) - 1.0);
        const double a = 2.0 * M_PI * u(2), b = (u(3) - 0.5) * M_PI;
        const double aq = 2.0 * M_PI * u(4), bq = (u(5) - 0.5) * M_PI;
        const double exact = testing::brute_range_offset(zd, eta, a, b, aq, bq);
        const double approx = range_offset(zd, eta, angle_factor(a, b, aq, bq), RangeMode::approx);
        const double bound = eta * eta / zd;
        violations += std::abs(exact - approx) > bound;
        worst = std::max(worst, std::abs(exact - approx) / bound);
    }
    std::ostringstream os;
    os << violations << " violations in " << draws << " draws, worst error/bound " << worst;
    return {violations == 0, os.str()};
}

// ---- 9: determinism -----------------------------------------------------

Outcome determinism()
{
    const fs::path root = fs::temp_directory_path() / "mvi_acceptance_determinism";
    fs::remove_all(root);
    std::size_t compared = 0, mismatched = 0;
    for (const auto& name : preset_names()) {
        SceneConfig c = preset(name, 42);
        RunOptions a, b;
        a.out_dir = root / name / "a";
        b.out_dir = root / name / "b";
        a.write_png = b.write_png = false;
        a.threads = 1;
        b.threads = worker_threads();
        RunResult ra = run(c, a);
        run(c, b);
        for (const auto& rel : ra.files) {
            const auto ext = fs::path(rel).extension();
            if (ext != ".cgrd" && ext != ".cech") continue;
            ++compared;
            if (!fs::exists(b.out_dir / rel) || sha256_file(a.out_dir / rel) != sha256_file(b.out_dir / rel))
                ++mismatched;
        }
    }
    fs::remove_all(root);
    std::ostringstream os;
    os << compared << " binary artifacts compared across " << preset_names().size() << " presets, " << mismatched
       << " differ";
    return {compared > 0 && mismatched == 0, os.str()};
}

} // namespace

int main()
{
    int failed = 0;
    auto report = [&](int id, const char* title, const std::function<Outcome()>& fn) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s  criterion %d  %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    };

    report(1, "static complex target recovery", static_recovery);
    report(2, "discrete-mode separation", discrete_modes);
    Type1Frames frames;
    std::string frames_error;
    try {
        frames = type1_frames();
    } catch (const std::exception& e) {
        frames_error = e.what();
    }
    auto need_frames = [&](auto fn) {
        return [&, fn]() -> Outcome {
            if (!frames_error.empty()) return {false, "exception: " + frames_error};
            return fn(frames);
        };
    };
    report(3, "type-1 oracle equivalence", need_frames(type1_equivalence));
    report(4, "type-2 mode isolation", type2_isolation);
    report(5, "k-space argmax invariance", need_frames(kspace_invariance));
    report(6, "plate modal solver", plate_solver);
    report(7, "micro-Doppler Bessel lines", bessel_lines);
    report(8, "range approximation bound", range_approximation);
    report(9, "preset determinism", determinism);

    std::printf("%d of 9 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
