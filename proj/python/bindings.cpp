#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "permalloc/criterion.hpp"
#include "permalloc/dynamics.hpp"
#include "permalloc/error.hpp"
#include "permalloc/raceway.hpp"
#include "permalloc/serialize.hpp"
#include "permalloc/solvers.hpp"

namespace py = pybind11;
using namespace permalloc;

namespace {

using Images = std::vector<std::int64_t>;

Permutation to_perm(const Images& images) { return Permutation::from_one_based(images); }

AllocationSystem make_system(std::vector<double> u, std::vector<double> v, std::vector<double> d) {
  return AllocationSystem(std::move(u), std::move(v), std::move(d));
}

py::dict extremum_dict(const Extremum& e) {
  py::dict out;
  out["perm"] = e.perm.one_based();
  out["value"] = e.value;
  out["ties"] = e.ties ? py::cast(*e.ties) : py::none();
  return out;
}

py::dict solve_dict(const SolveResult& r) {
  py::dict out;
  out["mode"] = std::string(to_string(r.mode));
  out["exact"] = r.exact;
  out["best"] = r.best ? py::object(extremum_dict(*r.best)) : py::none();
  out["worst"] = r.worst ? py::object(extremum_dict(*r.worst)) : py::none();
  out["evaluated"] = r.evaluated;
  return out;
}

RacewayScenario make_scenario(double surface_light, double bottom_fraction, double period,
                              std::size_t layers, double depth) {
  RacewayScenario sc{surface_light, bottom_fraction, period, layers, depth};
  sc.validate();
  return sc;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Periodic re-allocation of a switched linear system";
  m.attr("__version__") = kVersion;

  static py::exception<CapExceeded> cap_error(m, "CapExceeded", PyExc_OverflowError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const CapExceeded& e) {
      PyErr_SetString(cap_error.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("steady_state",
        [](std::vector<double> u, std::vector<double> v, std::vector<double> d, const Images& perm) {
          return steady_state(make_system(std::move(u), std::move(v), std::move(d)), to_perm(perm)).x_per;
        },
        py::arg("u"), py::arg("v"), py::arg("d"), py::arg("perm"));
  m.def("objective_J",
        [](std::vector<double> u, std::vector<double> v, std::vector<double> d, const Images& perm) {
          return objective_J(make_system(std::move(u), std::move(v), std::move(d)), to_perm(perm));
        },
        py::arg("u"), py::arg("v"), py::arg("d"), py::arg("perm"));
  m.def("objective_J_approx",
        [](std::vector<double> u, std::vector<double> v, std::vector<double> d, const Images& perm) {
          return objective_J_approx(make_system(std::move(u), std::move(v), std::move(d)), to_perm(perm));
        },
        py::arg("u"), py::arg("v"), py::arg("d"), py::arg("perm"));
  m.def("solve",
        [](std::vector<double> u, std::vector<double> v, std::vector<double> d, const std::string& mode,
           bool exact, unsigned workers, std::size_t n_cap) {
          const auto sys = make_system(std::move(u), std::move(v), std::move(d));
          const Mode md = parse_mode(mode);
          SolveResult r;
          {
            py::gil_scoped_release release;
            r = exact ? solve_exact(sys, {md, workers, n_cap}) : solve_approx(sys, md);
          }
          return solve_dict(r);
        },
        py::arg("u"), py::arg("v"), py::arg("d"), py::arg("mode") = "both", py::arg("exact") = true,
        py::arg("workers") = 1, py::arg("n_cap") = kDefaultEnumerationCap);
  m.def("criterion",
        [](std::vector<double> u, std::vector<double> v, std::vector<double> d, bool m1_2_only) {
          const auto rep = check(make_system(std::move(u), std::move(v), std::move(d)), {m1_2_only});
          return py::module_::import("json").attr("loads")(criterion_report_to_json(rep).dump());
        },
        py::arg("u"), py::arg("v"), py::arg("d"), py::arg("m1_2_only") = false);

  m.def("light_profile",
        [](double is, double q, double t, std::size_t n, double h) {
          return light_profile(make_scenario(is, q, t, n, h));
        },
        py::arg("I_s"), py::arg("q"), py::arg("T"), py::arg("N"), py::arg("h") = 0.4);
  m.def("han_system",
        [](double is, double q, double t, std::size_t n, double h) {
          const auto han = build_han_system(make_scenario(is, q, t, n, h));
          py::dict out;
          out["intensity"] = han.vectors.intensity;
          out["Gamma"] = han.vectors.gamma_vec;
          out["V"] = han.vectors.v_vec;
          out["Z"] = han.vectors.z_vec;
          out["D"] = han.vectors.d_vec;
          return out;
        },
        py::arg("I_s"), py::arg("q"), py::arg("T"), py::arg("N"), py::arg("h") = 0.4);
  m.def("mu_bar",
        [](double is, double q, double t, std::size_t n, const Images& perm, double h) {
          return mu_bar(make_scenario(is, q, t, n, h), to_perm(perm));
        },
        py::arg("I_s"), py::arg("q"), py::arg("T"), py::arg("N"), py::arg("perm"), py::arg("h") = 0.4);
  m.def("efficiency_ratios",
        [](double is, double q, double t, std::size_t n, double h, unsigned workers) {
          const auto sc = make_scenario(is, q, t, n, h);
          EfficiencyRatios r;
          {
            py::gil_scoped_release release;
            r = efficiency_ratios(sc, {Mode::both, workers});
          }
          py::dict out;
          out["p_max"] = r.p_max.one_based();
          out["p_min"] = r.p_min.one_based();
          out["p_plus"] = r.p_plus.one_based();
          out["mu_identity"] = r.mu_identity;
          out["mu_max"] = r.mu_max;
          out["mu_min"] = r.mu_min;
          out["mu_plus"] = r.mu_plus;
          out["r1"] = r.r1;
          out["r2"] = r.r2;
          out["r3"] = r.r3;
          out["rt1"] = r.rt1;
          out["rt2"] = r.rt2;
          return out;
        },
        py::arg("I_s"), py::arg("q"), py::arg("T"), py::arg("N"), py::arg("h") = 0.4,
        py::arg("workers") = 1);
}
