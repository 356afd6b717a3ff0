#include "mvi/errors.hpp"
#include "mvi/forward.hpp"
#include "mvi/pipeline.hpp"
#include "mvi/recon.hpp"
#include "mvi/scene.hpp"
#include "mvi/spectral.hpp"
#include "mvi/targets.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

namespace py = pybind11;
using namespace mvi;

namespace {

template <typename T>
py::array_t<T> to_array(const Grid<T>& g)
{
    py::array_t<T> a({g.rows(), g.cols()});
    std::memcpy(a.mutable_data(), g.data().data(), g.size() * sizeof(T));
    return a;
}

ComplexGrid from_array(py::array_t<cplx, py::array::c_style | py::array::forcecast> a, double pitch)
{
    if (a.ndim() != 2) throw InvalidArgument("expected a 2-D array");
    std::vector<cplx> v(a.data(), a.data() + a.size());
    return ComplexGrid(a.shape(0), a.shape(1), pitch, std::move(v));
}

SceneConfig scene_from(const std::string& text)
{
    SceneConfig c = parse_scene(text);
    c.finalize();
    return c;
}

} // namespace

PYBIND11_MODULE(mvi, m)
{
    m.doc() = "Micro-vibration coincidence imaging simulator";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<StageError>(m, "StageError", PyExc_RuntimeError);

    m.def("version", &version);
    m.def("ideal_pitch", &ideal_pitch, py::arg("wavelength"), py::arg("z1"), py::arg("side"));
    m.def("bessel_j", &bessel_j, py::arg("m"), py::arg("x"));
    m.def("plate_eigenfrequency",
          [](int i, int j, double a, double b, double E, double mu, double rho, double h) {
              return plate_eigenfrequency(i, j, a, b, PlateMaterial{E, mu, rho, h});
          },
          py::arg("i"), py::arg("j"), py::arg("a"), py::arg("b"), py::arg("E"), py::arg("mu"), py::arg("rho"),
          py::arg("h"));
    m.def("range_offset",
          [](double zd, double eta, double angle, bool exact) {
              return range_offset(zd, eta, angle, exact ? RangeMode::exact : RangeMode::approx);
          },
          py::arg("zd"), py::arg("eta"), py::arg("angle") = 1.0, py::arg("exact") = true);

    m.def("hadamard_patterns",
          [](std::size_t side) {
              PatternSchedule s = hadamard_patterns(side, 1.0);
              py::array_t<cplx> a({s.patterns.size(), side, side});
              cplx* out = a.mutable_data();
              for (const auto& p : s.patterns) {
                  std::memcpy(out, p.data().data(), p.size() * sizeof(cplx));
                  out += p.size();
              }
              return a;
          },
          py::arg("side"));

    m.def("preset_names", &preset_names);
    m.def("preset", [](const std::string& name, std::optional<std::uint64_t> seed) {
              return serialize_scene(preset(name, seed));
          },
          py::arg("name"), py::arg("seed") = py::none(), "scene JSON text of a bundled preset");

    m.def("simulate",
          [](const std::string& scene_json, unsigned threads) {
              SceneConfig c = scene_from(scene_json);
              EchoRecord e;
              {
                  py::gil_scoped_release nogil;
                  e = simulate(c, build_schedule(c), threads);
              }
              py::array_t<cplx> a(e.samples.size());
              std::memcpy(a.mutable_data(), e.samples.data(), e.samples.size() * sizeof(cplx));
              return a;
          },
          py::arg("scene_json"), py::arg("threads") = 1, "coded echo samples of a scene");

    m.def("reconstruct_static",
          [](const std::string& scene_json, unsigned threads) {
              SceneConfig c = scene_from(scene_json);
              ReconImage img;
              {
                  py::gil_scoped_release nogil;
                  PatternSchedule s = build_schedule(c);
                  EchoRecord e = simulate(c, s, threads);
                  Correlator corr(s, c.geometry, {c.eta, c.lo_amplitude});
                  img = corr.correlate(e, CompensationSpec::static_target(), all_indices(e.samples.size()));
              }
              return to_array(img.data);
          },
          py::arg("scene_json"), py::arg("threads") = 1);

    m.def("snapshot",
          [](const std::string& scene_json, double t) {
              SceneConfig c = scene_from(scene_json);
              return to_array(complex_target_snapshot(c.target, c.geometry, t));
          },
          py::arg("scene_json"), py::arg("t") = 0.0, "complex reflectivity with vibration phase at time t");

    m.def("kspace",
          [](py::array_t<cplx, py::array::c_style | py::array::forcecast> image) {
              ReconImage img;
              img.data = from_array(image, 1.0);
              return to_array(kspace(img));
          },
          py::arg("image"));

    m.def("run",
          [](const std::string& scene_json, const std::filesystem::path& out_dir, unsigned threads, bool png) {
              SceneConfig c = parse_scene(scene_json);
              py::gil_scoped_release nogil;
              return run(c, RunOptions{out_dir, threads, png}).manifest_json;
          },
          py::arg("scene_json"), py::arg("out_dir"), py::arg("threads") = 1, py::arg("write_png") = true,
          "full pipeline; returns the manifest JSON");

    m.def("read_cgrd", [](const std::filesystem::path& p) { return to_array(read_cgrd(p)); });
    m.def("write_cgrd",
          [](const std::filesystem::path& p, py::array_t<cplx, py::array::c_style | py::array::forcecast> a,
             double pitch) { write_cgrd(p, from_array(a, pitch)); },
          py::arg("path"), py::arg("grid"), py::arg("pitch") = 1.0);
}
