#include "mvi/scene.hpp"

#include "binary_io.hpp"
#include "json_io.hpp"
#include "mvi/errors.hpp"
#include "mvi/rng.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace mvi {

using detail::json;

namespace {

constexpr double pi = std::numbers::pi;

ReconMethod recon_method_from(const std::string& s)
{
    if (s == "static") return ReconMethod::static_target;
    if (s == "discrete_mode") return ReconMethod::discrete_mode;
    if (s == "type1") return ReconMethod::type1;
    if (s == "type2") return ReconMethod::type2;
    throw InvalidArgument("recon.method must be static, discrete_mode, type1 or type2 (got '" + s + "')");
}

json recon_to_json(const ReconRequest& r)
{
    json j = {{"method", to_string(r.method)}, {"tag", r.tag}, {"t0", r.t0}};
    switch (r.method) {
    case ReconMethod::discrete_mode:
        j["components"] = detail::components_to_json(r.components);
        j["filter_k"] = r.filter_k;
        j["floor"] = r.floor;
        break;
    case ReconMethod::type1:
        j["n_interval"] = r.n_interval;
        j["max_subsamples"] = r.max_subsamples;
        break;
    case ReconMethod::type2:
        j["frequency"] = r.frequency;
        j["max_subsamples"] = r.max_subsamples;
        break;
    case ReconMethod::static_target: break;
    }
    return j;
}

ReconRequest recon_from_json(const json& j, std::size_t index)
{
    return detail::with_json_context("recon[" + std::to_string(index) + "]", [&] {
        ReconRequest r;
        r.method = recon_method_from(j.at("method").get<std::string>());
        r.tag = j.value("tag", to_string(r.method) + "_" + std::to_string(index));
        r.t0 = j.value("t0", std::vector<std::size_t>{0});
        if (r.method == ReconMethod::discrete_mode) {
            r.components = detail::components_from_json(j.at("components"));
            r.filter_k = j.value("filter_k", 3.0);
            r.floor = j.value("floor", default_relevance_floor);
        }
        r.n_interval = j.value("n_interval", std::size_t{0});
        r.frequency = j.value("frequency", 0.0);
        r.max_subsamples = j.value("max_subsamples", std::size_t{0});
        return r;
    });
}

} // namespace

void SceneConfig::finalize()
{
    require(grid.side >= 1, "grid.side must be >= 1");
    geometry.validate();
    if (grid.pitch == 0.0) grid.pitch = ideal_pitch(geometry.wavelength, geometry.z1, grid.side);
    require(grid.pitch > 0.0, "grid.pitch must be > 0");
    if (geometry.aperture == 0.0) geometry.aperture = static_cast<double>(grid.side) * grid.pitch;
    timing.validate();
    motion.validate();
    require(patterns.samples_per_pattern >= 1, "patterns.samples_per_pattern must be >= 1");
    if (patterns.coding == Coding::random_speckle)
        require(patterns.n_patterns >= 1, "patterns.n_patterns must be >= 1 for random speckle");
    GridShape ts = target_shape(target);
    require(ts.rows == grid.side && ts.cols == grid.side, "target.grid does not match grid.side");
    require(std::abs(ts.pitch - grid.pitch) <= 1e-9 * grid.pitch, "target.grid.pitch does not match grid.pitch");
    std::visit([](const auto& t) { t.validate(); }, target);
    require(eta > 0.0 && lo_amplitude > 0.0, "eta and lo_amplitude must be > 0");
    std::set<std::string> tags;
    for (const auto& r : recon) {
        require(!r.tag.empty(), "recon request without a tag");
        require(tags.insert(r.tag).second, "duplicate recon tag '" + r.tag + "'");
        require(!r.t0.empty(), "recon '" + r.tag + "': t0 list is empty");
        if (r.method == ReconMethod::discrete_mode) {
            require(!r.components.empty(), "recon '" + r.tag + "': discrete_mode needs components");
            require(r.filter_k > 0.0, "recon '" + r.tag + "': filter_k must be > 0");
        }
        if (r.method == ReconMethod::type2)
            require(r.frequency > 0.0, "recon '" + r.tag + "': type2 needs a positive frequency");
    }
}

ForwardOptions SceneConfig::forward_options(unsigned threads) const
{
    ForwardOptions o;
    o.eta = eta;
    o.lo_amplitude = lo_amplitude;
    o.psf_blur = psf_blur;
    o.seed = seed;
    o.threads = threads;
    return o;
}

std::string serialize_scene(const SceneConfig& c)
{
    json j;
    j["name"] = c.name;
    j["seed"] = c.seed;
    j["geometry"] = detail::to_json(c.geometry);
    j["grid"] = {{"side", c.grid.side}, {"pitch", c.grid.pitch}};
    j["timing"] = {{"sample_interval", c.timing.sample_interval},
                   {"f_samp", c.timing.sample_rate()},
                   {"n_samples", c.timing.n_samples},
                   {"f_if", c.timing.f_if},
                   {"t_start", c.timing.t_start}};
    j["motion"] = {{"v", c.motion.v}, {"theta", c.motion.theta}, {"gamma", c.motion.gamma},
                   {"noise_sigma", c.motion.noise_sigma}};
    j["patterns"] = {{"coding", to_string(c.patterns.coding)},
                     {"samples_per_pattern", c.patterns.samples_per_pattern},
                     {"shuffle", c.patterns.shuffle},
                     {"n_patterns", c.patterns.n_patterns}};
    j["target"] = detail::to_json(c.target);
    j["echo"] = {{"eta", c.eta}, {"lo_amplitude", c.lo_amplitude}, {"psf_blur", c.psf_blur}};
    j["spectral"] = {{"window_len", c.spectral.window_len},
                     {"hop", c.spectral.hop},
                     {"max_modes", c.spectral.max_modes},
                     {"threshold_factor", c.spectral.threshold_factor},
                     {"survey_samples", c.spectral.survey_samples}};
    json rs = json::array();
    for (const auto& r : c.recon) rs.push_back(recon_to_json(r));
    j["recon"] = rs;
    j["output_dir"] = c.output_dir;
    if (!c.notes.empty()) j["notes"] = c.notes;
    return j.dump(2);
}

SceneConfig parse_scene(const std::string& text, const std::filesystem::path& base_dir)
{
    json j = detail::parse_json_text(text, "scene config");
    SceneConfig c;
    detail::with_json_context("scene config", [&] {
        require(j.is_object(), "scene config must be a JSON object");
        require(j.contains("seed"), "scene config: 'seed' is mandatory");
        c.name = j.value("name", std::string("scene"));
        c.seed = j.at("seed").get<std::uint64_t>();
        c.geometry = detail::geometry_from_json(j.value("geometry", json::object()));
        const json g = j.value("grid", json::object());
        c.grid.side = g.value("side", std::size_t{32});
        c.grid.pitch = g.value("pitch", 0.0);

        const json& t = j.at("timing");
        if (t.contains("sample_interval"))
            c.timing.sample_interval = t.at("sample_interval").get<double>();
        else {
            double fs = t.at("f_samp").get<double>();
            require(fs > 0.0, "timing.f_samp must be > 0");
            c.timing.sample_interval = 1.0 / fs;
        }
        c.timing.n_samples = t.at("n_samples").get<std::size_t>();
        c.timing.f_if = t.value("f_if", 0.0);
        c.timing.t_start = t.value("t_start", 0.0);

        const json m = j.value("motion", json::object());
        c.motion = {m.value("v", 0.0), m.value("theta", 0.0), m.value("gamma", 0.0), m.value("noise_sigma", 0.0)};

        const json p = j.value("patterns", json::object());
        c.patterns.coding = coding_from_string(p.value("coding", std::string("hadamard")));
        c.patterns.samples_per_pattern = p.value("samples_per_pattern", std::size_t{1});
        c.patterns.shuffle = p.value("shuffle", false);
        c.patterns.n_patterns = p.value("n_patterns", std::size_t{0});

        c.target = detail::target_from_json(j.at("target"), base_dir);

        const json e = j.value("echo", json::object());
        c.eta = e.value("eta", 1.0);
        c.lo_amplitude = e.value("lo_amplitude", 1.0);
        c.psf_blur = e.value("psf_blur", false);

        const json s = j.value("spectral", json::object());
        c.spectral.window_len = s.value("window_len", std::size_t{0});
        c.spectral.hop = s.value("hop", std::size_t{0});
        c.spectral.max_modes = s.value("max_modes", std::size_t{8});
        c.spectral.threshold_factor = s.value("threshold_factor", 5.0);
        c.spectral.survey_samples = s.value("survey_samples", std::size_t{0});

        std::size_t i = 0;
        for (const auto& r : j.value("recon", json::array())) c.recon.push_back(recon_from_json(r, i++));
        c.output_dir = j.value("output_dir", std::string("out"));
        c.notes = j.value("notes", std::string());
        return 0;
    });
    c.finalize();
    return c;
}

SceneConfig load_scene(const std::filesystem::path& path)
{
    auto bytes = detail::read_file(path);
    return parse_scene(std::string(bytes.begin(), bytes.end()), path.parent_path());
}

namespace {

SceneConfig base_scene(const std::string& name, std::uint64_t seed)
{
    SceneConfig c;
    c.name = name;
    c.seed = seed;
    c.grid.side = 32;
    c.geometry = ideal_geometry(1550e-9, 10.0, c.grid.side);
    c.grid.pitch = ideal_pitch(c.geometry.wavelength, c.geometry.z1, c.grid.side);
    c.output_dir = "out/" + name;
    return c;
}

const std::vector<VibrationComponent>& table2_modes()
{
    static const std::vector<VibrationComponent> modes = {
        {100e-9, 10.0, 0.0}, {500e-9, 5.0, pi / 4.0}, {1200e-9, 15.0, 5.0 * pi / 6.0}};
    return modes;
}

DiscreteTargetSet table2_target(const SceneConfig& c)
{
    DiscreteTargetSet d;
    d.shape = {c.grid.side, c.grid.side, c.grid.pitch};
    const std::size_t cells = c.grid.side * c.grid.side;
    std::set<std::size_t> used;
    std::uint64_t counter = 0;
    while (d.scatterers.size() < 12) {
        auto cell = static_cast<std::size_t>(counter_hash(c.seed, stream::scene, counter++) % cells);
        if (!used.insert(cell).second) continue;
        Scatterer s;
        s.cell = {cell / c.grid.side, cell % c.grid.side};
        s.components = {table2_modes()[d.scatterers.size() % 3]};
        d.scatterers.push_back(s);
    }
    return d;
}

SceneConfig table2_discrete(std::uint64_t seed)
{
    SceneConfig c = base_scene("table2_discrete", seed);
    c.timing = {1.0 / 120.0, 20 * 1024, 0.0, 0.0};
    c.patterns = {Coding::hadamard, 1, true, 0};
    c.target = table2_target(c);
    c.spectral.window_len = 480;
    for (int m = 0; m < 3; ++m) {
        ReconRequest r;
        r.method = ReconMethod::discrete_mode;
        r.tag = "mode" + std::to_string(m + 1);
        r.components = {table2_modes()[static_cast<std::size_t>(m)]};
        c.recon.push_back(r);
    }
    return c;
}

PlateTarget table3_plate(const SceneConfig& c)
{
    PlateTarget p;
    GridShape shape{c.grid.side, c.grid.side, c.grid.pitch};
    p.a = p.b = static_cast<double>(c.grid.side) * c.grid.pitch;
    p.material = {200e9, 0.3, 7850.0, 0.5e-3};
    p.reflectivity = ComplexGrid(shape.rows, shape.cols, shape.pitch, cplx(1.0, 0.0));
    const std::size_t s = c.grid.side;

    PrincipalMode centre;
    centre.kind = ModeKind::forced_point;
    centre.cell = {s / 2, s / 2};
    centre.temporal = {{100e-9, 2.0, 0.0}};
    PrincipalMode corner;
    corner.kind = ModeKind::forced_point;
    corner.cell = {7 * s / 8, 7 * s / 8};
    corner.temporal = {{500e-9, 4.0, pi / 4.0}};
    PrincipalMode free;
    free.kind = ModeKind::analytic;
    free.i = free.j = 1;
    free.temporal = {{1200e-9, 5.0, 5.0 * pi / 6.0}};
    for (auto* m : {&centre, &corner, &free}) {
        build_mode_shape(*m, p.a, p.b, p.material, shape);
        p.modes.push_back(*m);
    }
    return p;
}

SceneConfig table3_common(const std::string& name, std::uint64_t seed)
{
    SceneConfig c = base_scene(name, seed);
    c.timing = {1.0 / 400.0, 1024 * 400, 0.0, 0.0};
    c.patterns = {Coding::hadamard, 16, true, 0};
    c.target = table3_plate(c);
    c.spectral.window_len = 1600;
    return c;
}

SceneConfig table3_plate_type1(std::uint64_t seed)
{
    SceneConfig c = table3_common("table3_plate_type1", seed);
    ReconRequest r;
    r.method = ReconMethod::type1;
    r.tag = "type1";
    r.t0 = {0, 100, 200, 300};
    c.recon.push_back(r);
    return c;
}

SceneConfig table3_plate_type2(std::uint64_t seed)
{
    SceneConfig c = table3_common("table3_plate_type2", seed);
    for (double f : {5.0, 4.0, 2.0}) {
        ReconRequest r;
        r.method = ReconMethod::type2;
        r.frequency = f;
        r.tag = "type2_" + std::to_string(static_cast<int>(f)) + "hz";
        std::size_t n = static_cast<std::size_t>(std::lround(400.0 / f));
        r.t0 = {0, n / 4, n / 2, 3 * n / 4};
        c.recon.push_back(r);
    }
    return c;
}

SceneConfig table1_legacy(std::uint64_t seed)
{
    SceneConfig c = base_scene("table1_legacy", seed);
    c.timing = {1.0 / 20.0, 20, 0.0, 0.0};
    c.patterns = {Coding::hadamard, 1, false, 0};
    c.target = table2_target(c);
    c.spectral.window_len = 8;
    c.notes = "Legacy sampling (f_s = 20 Hz over T = 1 s): 20 samples cannot cover 1024 Hadamard patterns "
              "nor sample a 15 Hz mode; kept for reference, not reconstructing.";
    return c;
}

} // namespace

std::vector<std::string> preset_names()
{
    return {"table2_discrete", "table3_plate_type1", "table3_plate_type2", "table1_legacy"};
}

SceneConfig preset(const std::string& name, std::optional<std::uint64_t> seed)
{
    std::uint64_t s = seed.value_or(1);
    SceneConfig c;
    if (name == "table2_discrete")
        c = table2_discrete(s);
    else if (name == "table3_plate_type1")
        c = table3_plate_type1(s);
    else if (name == "table3_plate_type2")
        c = table3_plate_type2(s);
    else if (name == "table1_legacy")
        c = table1_legacy(s);
    else {
        std::string list;
        for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
        throw InvalidArgument("unknown preset '" + name + "' (available: " + list + ")");
    }
    c.finalize();
    return c;
}

SceneConfig reseed(const SceneConfig& config, std::uint64_t seed)
{
    for (const auto& n : preset_names())
        if (n == config.name) {
            SceneConfig c = preset(n, seed);
            c.output_dir = config.output_dir;
            return c;
        }
    SceneConfig c = config;
    c.seed = seed;
    return c;
}

PatternSchedule build_schedule(const SceneConfig& c)
{
    PatternSchedule s;
    switch (c.patterns.coding) {
    case Coding::hadamard:
        s = hadamard_patterns(c.grid.side, c.grid.pitch,
                              c.patterns.shuffle ? std::optional<std::uint64_t>(c.seed) : std::nullopt);
        break;
    case Coding::random_speckle:
        s = random_speckle_patterns(c.grid.side, c.patterns.n_patterns, c.seed, c.grid.pitch);
        break;
    case Coding::uniform: s = uniform_pattern(c.grid.side, c.grid.pitch); break;
    }
    s.with_timing(c.patterns.samples_per_pattern, c.timing.n_samples);
    return s;
}

} // namespace mvi
