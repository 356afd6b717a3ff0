#include "binary_io.hpp"
#include "json_io.hpp"
#include "mvi/errors.hpp"

namespace mvi {

namespace detail {

json to_json(const VibrationComponent& c)
{
    return {{"Z", c.amplitude}, {"f", c.frequency}, {"phi", c.phase}};
}

VibrationComponent component_from_json(const json& j)
{
    VibrationComponent c{j.at("Z").get<double>(), j.at("f").get<double>(), j.value("phi", 0.0)};
    c.validate();
    return c;
}

json components_to_json(const std::vector<VibrationComponent>& cs)
{
    json a = json::array();
    for (const auto& c : cs) a.push_back(to_json(c));
    return a;
}

std::vector<VibrationComponent> components_from_json(const json& j)
{
    std::vector<VibrationComponent> cs;
    for (const auto& e : j) cs.push_back(component_from_json(e));
    return cs;
}

namespace {

json shape_json(const GridShape& s)
{
    return {{"rows", s.rows}, {"cols", s.cols}, {"pitch", s.pitch}};
}

GridShape shape_from(const json& j)
{
    GridShape s{j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(), j.at("pitch").get<double>()};
    require(s.rows >= 1 && s.cols >= 1 && s.pitch > 0.0, "target grid needs rows, cols >= 1 and pitch > 0");
    return s;
}

} // namespace

json to_json(const Target& target)
{
    if (const auto* d = std::get_if<DiscreteTargetSet>(&target)) {
        json j = {{"type", "discrete"}, {"grid", shape_json(d->shape)}};
        json list = json::array();
        for (const auto& s : d->scatterers)
            list.push_back({{"row", s.cell.row},
                            {"col", s.cell.col},
                            {"reflectivity_re", s.reflectivity.real()},
                            {"reflectivity_im", s.reflectivity.imag()},
                            {"components", components_to_json(s.components)},
                            {"alphaQ", s.alpha_q},
                            {"betaQ", s.beta_q}});
        j["scatterers"] = list;
        return j;
    }
    const auto& p = std::get<PlateTarget>(target);
    json j = {{"type", "plate"},
              {"grid", shape_json(p.shape())},
              {"a", p.a},
              {"b", p.b},
              {"alphaQ", p.alpha_q},
              {"betaQ", p.beta_q},
              {"material", {{"E", p.material.E}, {"mu", p.material.mu}, {"rho", p.material.rho}, {"h", p.material.h}}}};
    bool uniform = true;
    for (const auto& v : p.reflectivity.data()) uniform = uniform && v == p.reflectivity[0];
    if (uniform)
        j["reflectivity"] = {p.reflectivity[0].real(), p.reflectivity[0].imag()};
    json modes = json::array();
    for (const auto& m : p.modes) {
        json e = {{"kind", to_string(m.kind)}, {"components", components_to_json(m.temporal)}};
        if (m.kind == ModeKind::analytic) {
            e["i"] = m.i;
            e["j"] = m.j;
            e["peak_normalised"] = m.peak_normalised;
        } else if (m.kind == ModeKind::forced_point) {
            e["row"] = m.cell.row;
            e["col"] = m.cell.col;
            e["attenuation_radius"] = m.attenuation_radius;
        } else {
            e["shape"] = m.shape.values();
        }
        modes.push_back(e);
    }
    j["modes"] = modes;
    if (!uniform) {
        json re = json::array(), im = json::array();
        for (const auto& v : p.reflectivity.data()) {
            re.push_back(v.real());
            im.push_back(v.imag());
        }
        j["reflectivity_re"] = re;
        j["reflectivity_im"] = im;
    }
    return j;
}

Target target_from_json(const json& j, const std::filesystem::path& base_dir)
{
    return with_json_context("target", [&]() -> Target {
        std::string type = j.at("type").get<std::string>();
        GridShape shape = shape_from(j.at("grid"));
        if (type == "discrete") {
            DiscreteTargetSet d;
            d.shape = shape;
            for (const auto& e : j.at("scatterers")) {
                Scatterer s;
                s.cell = {e.at("row").get<std::size_t>(), e.at("col").get<std::size_t>()};
                s.reflectivity = {e.value("reflectivity_re", 1.0), e.value("reflectivity_im", 0.0)};
                s.components = components_from_json(e.value("components", json::array()));
                s.alpha_q = e.value("alphaQ", 0.0);
                s.beta_q = e.value("betaQ", 0.0);
                d.scatterers.push_back(std::move(s));
            }
            d.validate();
            return d;
        }
        if (type != "plate") throw InvalidArgument("target type must be 'discrete' or 'plate', got '" + type + "'");
        PlateTarget p;
        p.a = j.at("a").get<double>();
        p.b = j.at("b").get<double>();
        p.alpha_q = j.value("alphaQ", 0.0);
        p.beta_q = j.value("betaQ", 0.0);
        const auto& m = j.at("material");
        p.material = {m.at("E").get<double>(), m.at("mu").get<double>(), m.at("rho").get<double>(),
                      m.at("h").get<double>()};
        p.material.validate();
        if (j.contains("reflectivity_image_path")) {
            auto path = std::filesystem::path(j.at("reflectivity_image_path").get<std::string>());
            if (path.is_relative()) path = base_dir / path;
            p.reflectivity = read_cgrd(path);
            require(p.reflectivity.rows() == shape.rows && p.reflectivity.cols() == shape.cols,
                    "reflectivity image does not match the plate grid");
        } else if (j.contains("reflectivity_re")) {
            auto re = j.at("reflectivity_re").get<std::vector<double>>();
            auto im = j.at("reflectivity_im").get<std::vector<double>>();
            require(re.size() == shape.rows * shape.cols && im.size() == re.size(),
                    "reflectivity arrays do not match the plate grid");
            p.reflectivity = ComplexGrid(shape.rows, shape.cols, shape.pitch);
            for (std::size_t i = 0; i < re.size(); ++i) p.reflectivity[i] = {re[i], im[i]};
        } else {
            auto r = j.value("reflectivity", std::vector<double>{1.0, 0.0});
            require(r.size() == 2, "uniform reflectivity must be [re, im]");
            p.reflectivity = ComplexGrid(shape.rows, shape.cols, shape.pitch, cplx(r[0], r[1]));
        }
        for (const auto& e : j.at("modes")) {
            PrincipalMode mode;
            mode.kind = mode_kind_from_string(e.at("kind").get<std::string>());
            mode.temporal = components_from_json(e.value("components", json::array()));
            if (mode.kind == ModeKind::analytic) {
                mode.i = e.at("i").get<int>();
                mode.j = e.at("j").get<int>();
                mode.peak_normalised = e.value("peak_normalised", true);
            } else if (mode.kind == ModeKind::forced_point) {
                mode.cell = {e.at("row").get<std::size_t>(), e.at("col").get<std::size_t>()};
                mode.attenuation_radius = e.value("attenuation_radius", 0.0);
            } else {
                auto v = e.at("shape").get<std::vector<double>>();
                require(v.size() == shape.rows * shape.cols, "custom mode shape does not match the plate grid");
                mode.shape = RealGrid(shape.rows, shape.cols, shape.pitch, std::move(v));
            }
            build_mode_shape(mode, p.a, p.b, p.material, shape);
            p.modes.push_back(std::move(mode));
        }
        p.validate();
        return p;
    });
}

json to_json(const SystemGeometry& g)
{
    return {{"wavelength", g.wavelength}, {"z1", g.z1}, {"z2", g.z2}, {"zd", g.zd}, {"aperture", g.aperture},
            {"alpha", g.alpha}, {"beta", g.beta}, {"receiver_x", g.receiver_x}};
}

SystemGeometry geometry_from_json(const json& j)
{
    return with_json_context("geometry", [&] {
        SystemGeometry g;
        g.wavelength = j.value("wavelength", g.wavelength);
        g.z1 = j.value("z1", g.z1);
        g.z2 = j.value("z2", g.z2);
        g.zd = j.value("zd", g.zd);
        g.aperture = j.value("aperture", 0.0);
        g.alpha = j.value("alpha", 0.0);
        g.beta = j.value("beta", 0.0);
        g.receiver_x = j.value("receiver_x", 0.0);
        g.validate();
        return g;
    });
}

json parse_json_text(const std::string& text, const std::string& what)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(what + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j)
{
    std::string text = j.dump(2) + "\n";
    write_file(path, {reinterpret_cast<const unsigned char*>(text.data()), text.size()});
}

} // namespace detail

std::string target_to_json(const Target& target)
{
    return detail::to_json(target).dump(2);
}

Target target_from_json(const std::string& text, const std::filesystem::path& base_dir)
{
    return detail::target_from_json(detail::parse_json_text(text, "target"), base_dir);
}

} // namespace mvi
