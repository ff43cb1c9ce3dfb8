#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <span>
#include <string>

#include "warpcrit/boundary_match.hpp"
#include "warpcrit/errors.hpp"
#include "warpcrit/geometry_check.hpp"
#include "warpcrit/io.hpp"
#include "warpcrit/profile_ode.hpp"
#include "warpcrit/spectral.hpp"

namespace py = pybind11;
using namespace warpcrit;

namespace {

py::array_t<double> array(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

// Reports go through their JSON form so Python sees the same keys as the CLI.
py::object to_py(const io::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Tolerances tolerances_from(const std::optional<py::dict>& d) {
  Tolerances t;
  if (!d) return t;
  for (auto [key, value] : *d) {
    const auto name = key.cast<std::string>();
    if (!t.set(name, value.cast<double>())) throw Error(ErrorKind::InvalidArgument, "unknown tolerance: " + name);
  }
  return t;
}

GridOptions grid_from(double step, const std::optional<py::dict>& tol) {
  GridOptions g;
  g.step = step;
  g.tol = tolerances_from(tol);
  return g;
}

Phase phase_from(const std::string& s) {
  if (s == "min") return Phase::Min;
  if (s == "max") return Phase::Max;
  throw Error(ErrorKind::InvalidArgument, "phase must be 'min' or 'max'");
}

}  // namespace

PYBIND11_MODULE(_warpcrit, m) {
  m.doc() = "Warped-product critical metrics: profile construction, matching, curvature and spectral checks";

  // Kept as a bare handle: a static py::object would be released after the
  // interpreter has already shut down.
  static py::handle error_type = py::exception<Error>(m, "WarpcritError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      auto inst = py::reinterpret_steal<py::object>(PyObject_CallFunction(error_type.ptr(), "s", e.what()));
      inst.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type.ptr(), inst.ptr());
    }
  });

  py::class_<OdeParams>(m, "OdeParams")
      .def(py::init([](int n, double R, double a) {
             OdeParams p{n, R, a};
             p.validate();
             return p;
           }),
           py::arg("n"), py::arg("R"), py::arg("a"))
      .def_readonly("n", &OdeParams::n)
      .def_readonly("R", &OdeParams::R)
      .def_readonly("a", &OdeParams::a)
      .def("potential", &OdeParams::potential)
      .def("first_integral", &OdeParams::first_integral)
      .def("equilibrium_radius", &OdeParams::equilibrium_radius)
      .def("__repr__", [](const OdeParams& p) {
        return "OdeParams(n=" + std::to_string(p.n) + ", R=" + io::format_double(p.R) + ", a=" + io::format_double(p.a) + ")";
      });

  py::class_<RadialSolution, std::shared_ptr<RadialSolution>>(m, "RadialSolution")
      .def_property_readonly("params", &RadialSolution::params)
      .def_property_readonly("kappa0", &RadialSolution::kappa0)
      .def_property_readonly("s", [](const RadialSolution& s) { return array(s.grid()); })
      .def_property_readonly("r", [](const RadialSolution& s) { return array(s.r()); })
      .def_property_readonly("rp", [](const RadialSolution& s) { return array(s.rp()); })
      .def_property_readonly("lam0", [](const RadialSolution& s) { return array(s.lam0()); })
      .def_property_readonly("energy_residual", [](const RadialSolution& s) { return array(s.energy_residual()); })
      .def_property_readonly("period", &RadialSolution::period)
      .def_property_readonly("theta", &RadialSolution::theta)
      .def_property_readonly("constant_solution", &RadialSolution::constant_solution)
      .def("r_at", &RadialSolution::r_at)
      .def("rp_at", &RadialSolution::rp_at)
      .def("lam0_at", &RadialSolution::lam0_at);

  py::class_<Profile>(m, "Profile")
      .def_property_readonly("params", &Profile::params)
      .def_property_readonly("kappa0", &Profile::kappa0)
      .def_property_readonly("C", &Profile::C)
      .def_property_readonly("solution", [](const Profile& p) { return std::const_pointer_cast<RadialSolution>(p.base_ptr()); })
      .def_property_readonly("s", [](const Profile& p) { return array(p.grid()); })
      .def_property_readonly("r", [](const Profile& p) { return array(p.r()); })
      .def_property_readonly("rp", [](const Profile& p) { return array(p.rp()); })
      .def_property_readonly("lam", [](const Profile& p) { return array(p.lam()); })
      .def_property_readonly("lamp", [](const Profile& p) { return array(p.lamp()); })
      .def("lam_at", &Profile::lam_at)
      .def("roots", [](const Profile& p) { return to_py(io::to_json(find_roots(p))); })
      .def("to_csv", [](const Profile& p) { return io::profile_csv(p); })
      .def("__len__", &Profile::size);

  m.def(
      "integrate_r",
      [](const OdeParams& p, double r0, double s_max, double step, std::optional<py::dict> tol) {
        return std::const_pointer_cast<RadialSolution>(integrate_r(p, r0, s_max, grid_from(step, tol)));
      },
      py::arg("params"), py::arg("r0"), py::arg("s_max"), py::arg("step") = 1e-3, py::arg("tolerances") = py::none());
  m.def(
      "integrate_r_from_kappa",
      [](const OdeParams& p, double kappa0, double s_max, const std::string& phase, double step,
         std::optional<py::dict> tol) {
        return std::const_pointer_cast<RadialSolution>(
            integrate_r_from_kappa(p, kappa0, s_max, phase_from(phase), grid_from(step, tol)));
      },
      py::arg("params"), py::arg("kappa0"), py::arg("s_max"), py::arg("phase") = "min", py::arg("step") = 1e-3,
      py::arg("tolerances") = py::none());
  m.def(
      "solve_lambda", [](std::shared_ptr<RadialSolution> sol, double C) { return solve_lambda(sol, C); },
      py::arg("solution"), py::arg("C") = 0.0);
  m.def("space_form_profile", &space_form_profile, py::arg("n"), py::arg("kappa"), py::arg("lambda_p"),
        py::arg("s_max"), py::arg("step") = 1e-3);
  m.def("warped_hyperbolic_profile", &warped_hyperbolic_profile, py::arg("n"), py::arg("A"), py::arg("s_max"),
        py::arg("step") = 1e-3);

  m.def(
      "improper_integral",
      [](std::shared_ptr<RadialSolution> sol, double from, double to) { return improper_integral(*sol, from, to); },
      py::arg("solution"), py::arg("start"), py::arg("stop"));
  m.def(
      "critical_C0", [](std::shared_ptr<RadialSolution> sol) { return critical_C0(*sol); }, py::arg("solution"));
  m.def(
      "classify_roots", [](const Profile& p) { return to_py(io::to_json(classify_roots(p))); }, py::arg("profile"));
  m.def(
      "match_boundary",
      [](std::shared_ptr<RadialSolution> sol, double zeta1) { return to_py(io::to_json(match_boundary(sol, zeta1))); },
      py::arg("solution"), py::arg("zeta1"));
  m.def(
      "build_example1",
      [](const OdeParams& p, double r0, double zeta1) { return to_py(io::to_json(build_example1(p, r0, zeta1))); },
      py::arg("params"), py::arg("r0"), py::arg("zeta1"));
  m.def(
      "build_example2", [](const OdeParams& p, double r0) { return to_py(io::to_json(build_example2(p, r0))); },
      py::arg("params"), py::arg("r0"));
  m.def(
      "schwarzschild_form",
      [](const OdeParams& p, double s_max) {
        BuildOptions opt;
        opt.s_max = s_max;
        return to_py(io::to_json(schwarzschild_form(p, 1.0, opt)));
      },
      py::arg("params"), py::arg("s_max") = 10.0);

  m.def(
      "verify_critical",
      [](const Profile& p, std::optional<double> fiber_kappa0, std::optional<std::pair<double, double>> interval,
         std::optional<py::dict> tol) {
        const FiberSpec fiber{p.params().n - 1, fiber_kappa0.value_or(p.kappa0()), false};
        VerifyOptions opt;
        opt.interval = interval;
        opt.tol = tolerances_from(tol);
        return to_py(io::to_json(verify_critical(p, fiber, opt)));
      },
      py::arg("profile"), py::arg("fiber_kappa0") = py::none(), py::arg("interval") = py::none(),
      py::arg("tolerances") = py::none());
  m.def(
      "verify_conformally_flat",
      [](const Profile& p, std::optional<std::pair<double, double>> interval) {
        VerifyOptions opt;
        opt.interval = interval;
        return to_py(io::to_json(verify_conformally_flat(p, FiberSpec{p.params().n - 1, p.kappa0(), false}, opt)));
      },
      py::arg("profile"), py::arg("interval") = py::none());

  m.def(
      "first_dirichlet_eigenvalue",
      [](const Profile& p, double b1, double b2, std::size_t cells) {
        return to_py(io::to_json(first_dirichlet_eigenvalue(p, b1, b2, SpectralOptions{cells})));
      },
      py::arg("profile"), py::arg("b1"), py::arg("b2"), py::arg("cells") = 200);
  m.def(
      "verify_prop36",
      [](const OdeParams& p, double r0, double C, std::size_t cells) {
        return to_py(io::to_json(verify_prop36(p, r0, C, SpectralOptions{cells})));
      },
      py::arg("params"), py::arg("r0"), py::arg("C"), py::arg("cells") = 200);
}
