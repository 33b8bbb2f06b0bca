#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "twoweight/acceptance.hpp"
#include "twoweight/bellman.hpp"
#include "twoweight/error.hpp"
#include "twoweight/exponents.hpp"
#include "twoweight/families.hpp"
#include "twoweight/measures.hpp"
#include "twoweight/muckenhoupt.hpp"
#include "twoweight/operators.hpp"
#include "twoweight/parallel.hpp"
#include "twoweight/poly_doubling.hpp"
#include "twoweight/report.hpp"
#include "twoweight/testing.hpp"

namespace py = pybind11;
using namespace twoweight;

namespace {

py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Cube box_or_unit(const std::optional<Cube>& box, int n) { return box ? *box : unit_cube(n); }

std::vector<Cube> family_or_default(const GridMeasure& mu, const std::optional<std::vector<Cube>>& cubes) {
  if (cubes) return *cubes;
  return standard_family(mu.box(), 0, std::min(mu.level() - 1, 6), true).cubes;
}

}  // namespace

PYBIND11_MODULE(_twoweight, m) {
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);

  py::class_<Cube>(m, "Cube")
      .def(py::init<std::vector<double>, double>(), py::arg("corner"), py::arg("side"))
      .def_property_readonly("corner", &Cube::corner)
      .def_property_readonly("side", &Cube::side)
      .def_property_readonly("dimension", &Cube::dimension)
      .def("center", &Cube::center)
      .def("volume", &Cube::volume)
      .def("dilate", [](const Cube& q, double t) { return dilate(q, t); })
      .def(py::self == py::self)
      .def("__repr__", [](const Cube& q) { return "Cube(" + to_json(q).dump() + ")"; });
  m.def("unit_cube", &unit_cube, py::arg("n"));

  py::class_<GridMeasure>(m, "GridMeasure")
      .def_property_readonly("dimension", &GridMeasure::dimension)
      .def_property_readonly("level", &GridMeasure::level)
      .def_property_readonly("box", &GridMeasure::box)
      .def_property_readonly("total_mass", &GridMeasure::total_mass)
      .def_property_readonly("populated_cells", &GridMeasure::populated_cells)
      .def("cells",
           [](const GridMeasure& mu) {
             py::list out;
             for (const auto& c : mu.cells()) out.append(py::make_tuple(c.index, c.mass));
             return out;
           })
      .def("mass", [](const GridMeasure& mu, const Cube& q) { return cube_mass(mu, q); }, py::arg("cube"))
      .def("to_json", [](const GridMeasure& mu) { return to_json(mu); })
      .def("to_csv", [](const GridMeasure& mu) { return to_csv(mu); })
      .def("save", [](const GridMeasure& mu, const std::string& path) { save_measure(mu, path); }, py::arg("path"))
      .def("scaled", [](const GridMeasure& mu, double c) { return scaled(mu, c); }, py::arg("c"))
      .def("coarsen", [](const GridMeasure& mu) { return coarsen(mu); });

  m.def("lebesgue", [](int n, int level, std::optional<Cube> box) {
    return generate(spec::Lebesgue{}, n, level, box_or_unit(box, n));
  }, py::arg("n"), py::arg("level"), py::arg("box") = py::none());
  m.def("line_measure", [](int level, std::optional<Cube> box) {
    return generate(spec::LineMeasure{}, 2, level, box ? *box : Cube({-1.0, -1.0}, 2.0));
  }, py::arg("level"), py::arg("box") = py::none());
  m.def("cantor", [](int n, int level, double ratio, std::optional<Cube> box) {
    return generate(spec::CantorProduct{ratio}, n, level, box_or_unit(box, n));
  }, py::arg("n"), py::arg("level"), py::arg("ratio") = 1.0 / 3.0, py::arg("box") = py::none());
  m.def("point_masses", [](const std::vector<std::pair<std::vector<double>, double>>& atoms, int n, int level,
                           std::optional<Cube> box) {
    spec::PointMasses s;
    for (const auto& [pos, w] : atoms) s.atoms.push_back(spec::Atom{pos, w});
    return generate(s, n, level, box_or_unit(box, n));
  }, py::arg("atoms"), py::arg("n"), py::arg("level"), py::arg("box") = py::none());
  m.def("density", [](const std::vector<double>& values, int table_level, int n, int level, std::optional<Cube> box) {
    return generate(spec::DensityTable{table_level, values}, n, level, box_or_unit(box, n));
  }, py::arg("values"), py::arg("table_level"), py::arg("n"), py::arg("level"), py::arg("box") = py::none());
  m.def("measure_from_json", &measure_from_json, py::arg("text"));
  m.def("load_measure", &load_measure, py::arg("path"));
  m.def("cantor_cdf", &cantor_cdf, py::arg("x"), py::arg("ratio") = 1.0 / 3.0);
  m.def("cantor_dimension", &cantor_dimension, py::arg("ratio") = 1.0 / 3.0);

  m.def("standard_family", [](const Cube& box, int k_min, int k_max, bool shifted) {
    return standard_family(box, k_min, k_max, shifted).cubes;
  }, py::arg("box"), py::arg("k_min"), py::arg("k_max"), py::arg("shifted") = true);
  m.def("cantor_intervals", [](double ratio, int j_max) { return cantor_intervals(ratio, j_max).cubes; },
        py::arg("ratio"), py::arg("j_max"));

  m.def("set_threads", &set_thread_count, py::arg("count"));
  m.def("threads", &thread_count);

  m.def("exponents", [](const GridMeasure& mu, std::optional<std::vector<Cube>> cubes) {
    const auto fam = family_or_default(mu, cubes);
    Json j;
    j["doubling"] = to_json(doubling_exponent(mu, kDefaultGrowthScales, fam));
    j["reverse_doubling"] = to_json(reverse_doubling_exponent(mu, kDefaultShrinkScales, fam));
    return to_py(j);
  }, py::arg("mu"), py::arg("cubes") = py::none());

  m.def("a2", [](const GridMeasure& sigma, const GridMeasure& omega, double alpha, const std::string& variant,
                 std::optional<std::vector<Cube>> cubes) {
    const auto fam = family_or_default(sigma, cubes);
    if (variant == "classical") return to_py(to_json(a2_classical(sigma, omega, alpha, fam)));
    if (variant == "forward") return to_py(to_json(a2_one_tailed(sigma, omega, alpha, fam)));
    if (variant == "backward") return to_py(to_json(a2_one_tailed(sigma, omega, alpha, fam, true)));
    throw InvalidInput("variant must be classical, forward or backward");
  }, py::arg("sigma"), py::arg("omega"), py::arg("alpha"), py::arg("variant") = "classical",
     py::arg("cubes") = py::none());

  m.def("pairing", [](const GridMeasure& sigma, const GridMeasure& omega, const Cube& q, double alpha) {
    return to_py(to_json(fractional_pairing(sigma, omega, q, alpha)));
  }, py::arg("sigma"), py::arg("omega"), py::arg("cube"), py::arg("alpha"));
  m.def("pairing_bound_constant", &pairing_bound_constant, py::arg("n"), py::arg("alpha"), py::arg("theta"));

  m.def("bct", [](const GridMeasure& sigma, const GridMeasure& omega, double alpha,
                  std::optional<std::vector<Cube>> cubes) {
    return to_py(to_json(bct_fractional(sigma, omega, alpha, family_or_default(sigma, cubes))));
  }, py::arg("sigma"), py::arg("omega"), py::arg("alpha"), py::arg("cubes") = py::none());
  m.def("cube_testing", [](const GridMeasure& sigma, const GridMeasure& omega, double alpha, bool backward,
                           std::optional<std::vector<Cube>> cubes) {
    return to_py(to_json(cube_testing(sigma, omega, alpha, family_or_default(sigma, cubes), backward)));
  }, py::arg("sigma"), py::arg("omega"), py::arg("alpha"), py::arg("backward") = false, py::arg("cubes") = py::none());
  m.def("operator_norm", [](const GridMeasure& sigma, const GridMeasure& omega, double alpha) {
    return to_py(to_json(operator_norm(sigma, omega, alpha)));
  }, py::arg("sigma"), py::arg("omega"), py::arg("alpha"));

  m.def("haar_pairing", [](const std::vector<double>& u, const std::vector<double>& v) {
    return haar_pairing(haar_tree(u), haar_tree(v));
  }, py::arg("u"), py::arg("v"));
  m.def("haar_pairing_direct", [](const std::vector<double>& u, const std::vector<double>& v) {
    return haar_pairing_direct(haar_tree(u), haar_tree(v));
  }, py::arg("u"), py::arg("v"));

  m.def("bellman_divergence", [](double tau, int grid, double target, int max_sweeps) {
    BellmanField f(tau, grid);
    return to_py(to_json(iterate_until(f, target, max_sweeps)));
  }, py::arg("tau") = 0.2, py::arg("grid") = 64, py::arg("target") = 3.0, py::arg("max_sweeps") = 10000);
  m.def("verify_pair", [](const std::vector<double>& u, const std::vector<double>& v, double tau, double gamma) {
    return to_py(to_json(verify_certificate(pair_from_leaves(u, v), tau, gamma)));
  }, py::arg("u"), py::arg("v"), py::arg("tau"), py::arg("gamma"));

  m.def("energy_constant", [](const GridMeasure& mu, const Cube& q, int kappa, int starts, std::uint64_t seed) {
    EnergyOptions eo;
    eo.starts = starts;
    eo.seed = seed;
    return to_py(to_json(energy_constant(mu, q, kappa, eo)));
  }, py::arg("mu"), py::arg("cube"), py::arg("kappa"), py::arg("starts") = 24, py::arg("seed") = 1);
  m.def("doubling_from_energy", [](double c, int n, double beta) {
    return to_py(to_json(doubling_from_energy(c, n, beta)));
  }, py::arg("c_kappa"), py::arg("n"), py::arg("beta"));

  m.def("run_criterion", [](int id, std::uint64_t seed) {
    AcceptanceOptions o;
    o.seed = seed;
    CriterionResult r;
    {
      py::gil_scoped_release release;
      r = run_criterion(id, o);
    }
    py::dict d = to_py(to_json(r));
    d["line"] = format_line(r);
    return d;
  }, py::arg("id"), py::arg("seed") = 20240611);

  m.attr("REPORT_SCHEMA") = std::string(kReportSchema);
  m.attr("REPORT_VERSION") = kReportVersion;
}
