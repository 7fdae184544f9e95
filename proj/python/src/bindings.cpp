#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmbo/bo_solver.hpp"
#include "cmbo/cli.hpp"
#include "cmbo/error.hpp"
#include "cmbo/harness.hpp"
#include "cmbo/lattice.hpp"
#include "cmbo/specfun.hpp"
#include "cmbo/spectral.hpp"

namespace py = pybind11;
using namespace cmbo;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vec(const Array& a) {
  if (a.ndim() != 1) throw ArgumentError("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

spectral::SpectralField field(double period, const Array& values) {
  auto v = to_vec(values);
  const auto n = v.size();
  return spectral::SpectralField::from_values(spectral::PeriodicGrid(period, n), std::move(v));
}

py::dict monitor_dict(const bo::MonitorSample& s) {
  py::dict d;
  d["tau"] = s.tau;
  d["mean"] = s.mean;
  d["l2"] = s.l2;
  d["h6"] = s.h6;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cmbo, m) {
  m.doc() = "Calogero-Moser lattice and Benjamin-Ono long-wave toolkit (C++ core)";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
  auto blowup = py::register_exception<BlowUpError>(m, "BlowUpError", base.ptr());
  py::register_exception<CollisionError>(m, "CollisionError", blowup.ptr());

  // constants
  py::class_<specfun::AlphaParams>(m, "AlphaParams")
      .def_readonly("alpha", &specfun::AlphaParams::alpha)
      .def_readonly("zeta_alpha", &specfun::AlphaParams::zeta_a)
      .def_readonly("zeta_alpha_plus_1", &specfun::AlphaParams::zeta_a1)
      .def_readonly("c", &specfun::AlphaParams::c)
      .def_readonly("kappa1", &specfun::AlphaParams::kappa1)
      .def_readonly("kappa2", &specfun::AlphaParams::kappa2)
      .def_readonly("kappa3", &specfun::AlphaParams::kappa3)
      .def_readonly("eta", &specfun::AlphaParams::eta)
      .def_readonly("gamma", &specfun::AlphaParams::gamma)
      .def_readonly("beta", &specfun::AlphaParams::beta)
      .def("__repr__", [](const specfun::AlphaParams& p) {
        return "AlphaParams(alpha=" + std::to_string(p.alpha) + ", c=" + std::to_string(p.c) + ")";
      });
  const double tol = specfun::kDefaultTol;
  m.def("zeta", &specfun::zeta, py::arg("s"), py::arg("tol") = tol);
  m.def("zeta_tail", &specfun::zeta_tail, py::arg("s"), py::arg("k"), py::arg("tol") = tol);
  m.def("eta_integral", &specfun::eta_integral, py::arg("alpha"), py::arg("tol") = tol);
  m.def("eta_riemann", &specfun::eta_riemann, py::arg("alpha"), py::arg("h"), py::arg("tol") = tol);
  m.def("zeta_gap", &specfun::zeta_gap, py::arg("alpha"), py::arg("tol") = 1e-13);
  m.def("find_alpha_star", &specfun::find_alpha_star, py::arg("tol") = 1e-12, py::arg("lo") = 1.3,
        py::arg("hi") = 1.6, py::arg("zeta_tol") = 1e-13);
  m.def("gamma_exponent", &specfun::gamma_exponent, py::arg("alpha"));
  m.def("beta_exponent", &specfun::beta_exponent, py::arg("alpha"));
  m.def("make_alpha_params", &specfun::make_alpha_params, py::arg("alpha"), py::arg("tol") = tol);

  // periodic fields: (period, values) in, values out
  m.def("hilbert", [](double P, const Array& u) { return to_array(spectral::hilbert(field(P, u)).values()); },
        py::arg("period"), py::arg("values"));
  m.def("frac_deriv",
        [](double P, const Array& u, double a) { return to_array(spectral::frac_deriv(field(P, u), a).values()); },
        py::arg("period"), py::arg("values"), py::arg("alpha"));
  m.def("derivative", [](double P, const Array& u) { return to_array(spectral::derivative(field(P, u)).values()); },
        py::arg("period"), py::arg("values"));
  m.def("average_op",
        [](double P, const Array& u, double h) { return to_array(spectral::average_op(field(P, u), h).values()); },
        py::arg("period"), py::arg("values"), py::arg("h"));
  m.def("antiderivative_meanzero",
        [](double P, const Array& u) { return to_array(spectral::antiderivative_meanzero(field(P, u)).values()); },
        py::arg("period"), py::arg("values"));
  m.def("eval_at", [](double P, const Array& u, double x) { return spectral::eval_at(field(P, u), x); },
        py::arg("period"), py::arg("values"), py::arg("x"));
  m.def("sobolev_norm", [](double P, const Array& u, double s) { return spectral::sobolev_norm(field(P, u), s); },
        py::arg("period"), py::arg("values"), py::arg("s"));

  // Benjamin-Ono
  m.def(
      "solve_bo",
      [](double P, const Array& u0, double alpha, double tau_end, double dtau, double dealias,
         std::vector<double> checkpoints) {
        bo::BOConfig cfg;
        cfg.params = specfun::make_alpha_params(alpha);
        cfg.dtau = dtau;
        cfg.dealias_fraction = dealias;
        cfg.checkpoints = std::move(checkpoints);
        const bo::BOState start{field(P, u0), 0.0};
        std::optional<bo::BORun> result;
        {
          py::gil_scoped_release release;
          result = bo::run_to(start, tau_end, cfg);
        }
        const auto& run = *result;
        py::list trace;
        for (const auto& s : run.trace) trace.append(monitor_dict(s));
        return py::make_tuple(to_array(run.state.u.values()), trace);
      },
      py::arg("period"), py::arg("u0"), py::arg("alpha"), py::arg("tau_end"), py::arg("dtau") = 1e-3,
      py::arg("dealias_fraction") = 2.0 / 3.0, py::arg("checkpoints") = std::vector<double>{},
      "Integrate from tau = 0 to tau_end; returns (u, monitor trace).");

  // lattice
  py::class_<lattice::Lattice>(m, "Lattice")
      .def(py::init([](std::size_t n, double alpha, std::size_t cutoff, double dt, bool tail) {
             return lattice::Lattice({n, alpha, cutoff, dt, tail});
           }),
           py::arg("n"), py::arg("alpha"), py::arg("cutoff"), py::arg("dt") = 0.05,
           py::arg("tail_correction") = false)
      .def("force", [](const lattice::Lattice& l, const Array& r) { return to_array(l.force(to_vec(r))); })
      .def("energy",
           [](const lattice::Lattice& l, const Array& r, const Array& p) {
             return l.energy({to_vec(r), to_vec(p), 0.0});
           })
      .def(
          "advance",
          [](const lattice::Lattice& l, const Array& r, const Array& p, double t, std::size_t steps,
             bool backward) {
            lattice::LatticeState s{to_vec(r), to_vec(p), t};
            {
              py::gil_scoped_release release;
              l.advance(s, steps, backward);
            }
            return py::make_tuple(to_array(s.r), to_array(s.p), s.t);
          },
          py::arg("r"), py::arg("p"), py::arg("t") = 0.0, py::arg("steps") = 1, py::arg("backward") = false,
          "Stormer-Verlet steps; returns (r, p, t).");
  m.def(
      "p2_functional",
      [](const Array& eta, double alpha, std::size_t cutoff) {
        const auto v = lattice::p2_functional(to_vec(eta), alpha, cutoff);
        return py::make_tuple(v.value, v.tail_bound);
      },
      py::arg("eta"), py::arg("alpha"), py::arg("cutoff"));

  // experiments, configured by JSON text and reported as JSON text
  m.def("config_hash", [](const std::string& j) { return harness::config_hash(harness::config_from_json(j)); },
        py::arg("config_json") = "{}");
  m.def("normalize_config", [](const std::string& j) { return harness::config_to_json(harness::config_from_json(j)); },
        py::arg("config_json") = "{}");
  m.def("plan", [](const std::string& j) { return harness::plan_json(harness::config_from_json(j)); },
        py::arg("config_json") = "{}");
  m.def(
      "residual_sweep",
      [](const std::string& j, unsigned jobs) {
        const auto c = harness::config_from_json(j);
        std::vector<harness::AlphaResidual> s;
        {
          py::gil_scoped_release release;
          s = harness::run_residual_sweep(c, jobs);
        }
        return harness::report_json(&s, nullptr);
      },
      py::arg("config_json") = "{}", py::arg("jobs") = 1);
  m.def(
      "validate",
      [](const std::string& j, unsigned jobs) {
        const auto c = harness::config_from_json(j);
        std::vector<harness::AlphaValidation> v;
        {
          py::gil_scoped_release release;
          v = harness::run_validation(c, jobs);
        }
        return harness::report_json(nullptr, &v);
      },
      py::arg("config_json") = "{}", py::arg("jobs") = 1);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "cmbo");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data());
        std::cout.flush();
        std::cerr.flush();
        return code;
      },
      py::arg("args"), "Run the command line front end in-process; returns the exit code.");
}
