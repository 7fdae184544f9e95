// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
// Usage: acceptance [config.json] [--jobs N]
// The config drives criteria 7-9; it defaults to configs/acceptance.json.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cmbo/bo_solver.hpp"
#include "cmbo/error.hpp"
#include "cmbo/harness.hpp"
#include "cmbo/lattice.hpp"
#include "cmbo/log.hpp"
#include "cmbo/specfun.hpp"
#include "cmbo/spectral.hpp"

#ifndef CMBO_SOURCE_DIR
#define CMBO_SOURCE_DIR "."
#endif

using namespace cmbo;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "ok   " : "MISS ") + what);
  }
};

std::string f(double x, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

int failures = 0;

void report(int id, const char* title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < limit_s, "runtime " + f(secs, 3) + " s < " + f(limit_s) + " s");
  if (!out.pass) ++failures;
  std::printf("[%s] criterion %d: %s\n", out.pass ? "PASS" : "FAIL", id, title);
  for (const auto& n : out.notes) std::printf("         %s\n", n.c_str());
  std::fflush(stdout);
}

// eta_2 by direct Gauss-Kronrod integration, period by period, plus a closed-form tail.
double eta2_by_quadrature() {
  using boost::math::quadrature::gauss_kronrod;
  auto g = [](double s) {
    if (s < 1e-3) return 1.0 / 12.0 - s * s / 360.0;
    const double h = std::sin(s / 2) / (s / 2);
    return (1.0 - h * h) / (s * s);
  };
  const double L = 2.0 * pi * 400;
  double sum = 0.0;
  for (int k = 0; k < 400; ++k) sum += gauss_kronrod<double, 61>::integrate(g, 2 * pi * k, 2 * pi * (k + 1), 0, 0);
  // int_L^inf (1 - sinc^2(s/2)) / s^2 = 1/L - int_L^inf 2 (1 - cos s) / s^4, cos term O(L^-4)
  return sum + 1.0 / L - 2.0 / (3.0 * L * L * L);
}

double fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < x.size(); ++i) pairs.emplace_back(x[i], y[i]);
  return harness::fit_slope(pairs).slope;
}

std::vector<double> gaussian_r(std::size_t n, double amp, double width) {
  std::vector<double> r(n);
  const double mid = static_cast<double>(n) / 2;
  for (std::size_t j = 0; j < n; ++j) r[j] = amp * std::exp(-std::pow((static_cast<double>(j) - mid) / width, 2));
  return r;
}

// Pairwise forces between absolute positions of the periodically extended chain.
std::vector<double> position_space_force(const std::vector<double>& r, double alpha, std::size_t M) {
  const long n = static_cast<long>(r.size());
  const double total = std::accumulate(r.begin(), r.end(), 0.0);
  std::vector<double> x0(n);
  for (long j = 1; j < n; ++j) x0[j] = x0[j - 1] + 1.0 + r[j - 1];
  auto x = [&](long j) {
    const long w = (j % n + n) % n;
    return x0[w] + static_cast<double>((j - w) / n) * (static_cast<double>(n) + total);
  };
  std::vector<double> acc(n, 0.0);
  for (long j = 0; j < n; ++j)
    for (long m = 1; m <= static_cast<long>(M); ++m)
      acc[j] -= alpha * (std::pow(x(j + m) - x(j), -alpha - 1) - std::pow(x(j) - x(j - m), -alpha - 1));
  return acc;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Experiment {
  std::vector<harness::AlphaResidual> sweep;
  std::vector<harness::AlphaValidation> runs;
};

Experiment run_experiment(const harness::ValidationConfig& c, unsigned jobs, const fs::path& dir) {
  Experiment e{harness::run_residual_sweep(c, jobs), harness::run_validation(c, jobs)};
  fs::create_directories(dir);
  harness::write_residual_csv(e.sweep, dir / "residual_sweep.csv");
  harness::write_validation_csv(e.runs, dir / "validation.csv");
  harness::write_energy_csv(e.runs, dir / "energy.csv");
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path config_path = fs::path(CMBO_SOURCE_DIR) / "configs" / "acceptance.json";
  unsigned jobs = 1;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc) jobs = static_cast<unsigned>(std::stoul(argv[++i]));
    else config_path = argv[i];
  }
  std::vector<std::string> warnings;
  set_warning_sink([&](const std::string& w) { warnings.push_back(w); });

  report(1, "constants at alpha = 2", 1.0, [](Outcome& o) {
    const auto p = specfun::make_alpha_params(2.0);
    const double eta_q = eta2_by_quadrature();
    o.require(std::abs(eta_q - pi / 6) < 1e-8, "independent quadrature eta_2 - pi/6 = " + f(eta_q - pi / 6, 3));
    o.require(std::abs(p.c - pi) < 1e-8, "c - pi = " + f(p.c - pi, 3));
    o.require(std::abs(p.kappa3 - pi) < 1e-8, "kappa3 - pi = " + f(p.kappa3 - pi, 3));
    o.require(std::abs(p.eta - eta_q) < 1e-8, "library eta_2 vs quadrature = " + f(p.eta - eta_q, 3));
  });

  report(2, "threshold alpha*", 1.0, [](Outcome& o) {
    const double a = specfun::find_alpha_star(1e-12);
    o.require(a > 1.45 && a < 1.5, "alpha* = " + f(a, 13) + " in (1.45, 1.5)");
    const double lo = specfun::zeta_gap(a - 1e-6), hi = specfun::zeta_gap(a + 1e-6);
    o.require(lo < 0.0 && hi > 0.0, "zeta_gap(alpha* -/+ 1e-6) = " + f(lo, 3) + ", " + f(hi, 3));
  });

  report(3, "Riemann-sum rates of eta", 10.0, [](Outcome& o) {
    const std::vector<double> hs{0.4, 0.2, 0.1, 0.05, 0.025};
    for (double alpha : {1.6, 2.0, 2.3, 2.7}) {
      const double eta = specfun::eta_integral(alpha);
      std::vector<double> err;
      for (double h : hs) err.push_back(std::abs(specfun::eta_riemann(alpha, h) - eta));
      const double s = fit(hs, err);
      if (alpha < 2.1) {
        o.require(s >= 0.85 && s <= 1.15, "alpha " + f(alpha) + ": slope " + f(s, 4) + " in [0.85, 1.15]");
      } else {
        o.require(std::abs(s - (3 - alpha)) <= 0.15,
                  "alpha " + f(alpha) + ": slope " + f(s, 4) + " within 0.15 of " + f(3 - alpha));
      }
    }
  });

  report(4, "norm equivalence of P2", 30.0, [](Outcome& o) {
    const std::size_t n = 128, M = n / 2 - 1;
    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> nd;
    auto random_eta = [&] {
      std::vector<double> v(n);
      for (auto& x : v) x = nd(rng);
      return v;
    };
    for (double alpha : {1.6, 2.0, 2.5}) {
      const double lo = specfun::zeta_gap(alpha), hi = specfun::zeta(alpha);
      int bad = 0;
      for (int k = 0; k < 1000; ++k) {
        const auto eta = random_eta();
        const double e2 = std::inner_product(eta.begin(), eta.end(), eta.begin(), 0.0);
        const auto p2 = lattice::p2_functional(eta, alpha, M);
        if (p2.value < lo * e2 || p2.value + p2.tail_bound > hi * e2) ++bad;
      }
      o.require(bad == 0, "alpha " + f(alpha) + ": " + std::to_string(bad) + " of 1000 vectors outside the bounds");
    }
    const double coef = specfun::zeta_gap(1.2);
    int violations = 0;
    for (int k = 0; k < 1000; ++k) {
      const auto eta = random_eta();
      const double e2 = std::inner_product(eta.begin(), eta.end(), eta.begin(), 0.0);
      if (lattice::p2_functional(eta, 1.2, M).value < coef * e2) ++violations;
    }
    o.require(coef < 0.0, "alpha 1.2: lower coefficient 2 zeta(2.2) - zeta(1.2) = " + f(coef, 4) + " < 0");
    o.require(violations > 0, "alpha 1.2: " + std::to_string(violations) + " of 1000 vectors violate the lower bound");
  });

  report(5, "lattice energy, momentum and force", 60.0, [](Outcome& o) {
    const std::size_t n = 512;
    const lattice::Lattice lat({n, 2.0, 16, 0.05, true});
    lattice::LatticeState s{gaussian_r(n, 0.01, 48.0), std::vector<double>(n, 0.0), 0.0};
    for (std::size_t j = 0; j < n; ++j) s.p[j] = -std::sqrt(6 * specfun::zeta(2.0)) * s.r[j];
    const double e0 = lat.energy(s);
    const double mom0 = std::accumulate(s.p.begin(), s.p.end(), 0.0);
    double drift = 0.0;
    for (int block = 0; block < 100; ++block) {
      lat.advance(s, 100);
      drift = std::max(drift, std::abs(lat.energy(s) - e0) / e0);
    }
    const double dmom = std::abs(std::accumulate(s.p.begin(), s.p.end(), 0.0) - mom0);
    o.require(drift <= 1e-6, "max |dE|/E over 1e4 steps = " + f(drift, 3));
    o.require(dmom <= 1e-10, "momentum change = " + f(dmom, 3));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ud(-0.05, 0.05);
    double worst = 0.0;
    for (double alpha : {1.6, 2.0, 2.5}) {
      std::vector<double> r(32);
      for (auto& x : r) x = ud(rng);
      const lattice::LatticeConfig cfg{32, alpha, 15, 0.05, false};
      const auto a = lattice::force(r, cfg), b = position_space_force(r, alpha, 15);
      for (std::size_t j = 0; j < 32; ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
    }
    o.require(worst <= 1e-12, "force vs position-space oracle, N = 32: " + f(worst, 3));
  });

  report(6, "Benjamin-Ono solver", 60.0, [](Outcome& o) {
    using spectral::PeriodicGrid;
    using spectral::SpectralField;
    double worst_phase = 0.0;
    for (double alpha : {1.6, 2.0, 2.5}) {
      bo::BOConfig cfg;
      cfg.params = specfun::make_alpha_params(alpha);
      cfg.params.kappa2 = 0.0;
      const double ratio = cfg.params.kappa3 / cfg.params.kappa1;
      const PeriodicGrid g(2 * pi, 64);
      for (int q : {1, 2, 4}) {
        const double k = q;
        auto u0 = SpectralField::sample(g, [&](double x) { return std::cos(k * x); });
        const double tau = 0.05;
        const auto out = bo::run_to({u0, 0.0}, tau, cfg).state;
        const double omega = -std::arg(out.u.spectrum()[q] / u0.spectrum()[q]) / tau;
        const double expected = -ratio * std::pow(k, alpha);
        worst_phase = std::max(worst_phase, std::abs(omega - expected) / std::abs(expected));
      }
    }
    o.require(worst_phase <= 1e-6, "worst relative dispersion error = " + f(worst_phase, 3));

    auto gaussian = [](const PeriodicGrid& g, double w) {
      const double P = g.period();
      auto raw = SpectralField::sample(g, [&](double x) { return std::exp(-std::pow((x - P / 2) / w, 2)); });
      const double m = raw.mean();
      return SpectralField::sample(g, [&](double x) { return std::exp(-std::pow((x - P / 2) / w, 2)) - m; });
    };
    const PeriodicGrid g(20.0, 128);
    const auto u0 = gaussian(g, 1.5);
    auto solve = [&](double dt) {
      bo::BOConfig c;
      c.params = specfun::make_alpha_params(2.0);
      c.dtau = dt;
      return bo::run_to({u0, 0.0}, 0.2, c).state.u;
    };
    const auto a = solve(0.01), b = solve(0.005), c = solve(0.0025);
    const double ratio = spectral::l2_norm(a - b) / spectral::l2_norm(b - c);
    o.require(ratio >= 12 && ratio <= 20, "RK4 self-convergence ratio = " + f(ratio, 4));

    const PeriodicGrid big(102.4, 1024);
    bo::BOConfig cfg;
    cfg.params = specfun::make_alpha_params(2.0);
    cfg.dtau = 1e-4;
    cfg.checkpoints = {0.1, 0.2, 0.3, 0.4};
    const auto run = bo::run_to({gaussian(big, 102.4 / 20), 0.0}, 0.5, cfg);
    double dmean = 0.0, dl2 = 0.0;
    for (const auto& s : run.trace) {
      dmean = std::max(dmean, std::abs(s.mean - run.trace.front().mean));
      dl2 = std::max(dl2, std::abs(s.l2 - run.trace.front().l2) / run.trace.front().l2);
    }
    o.require(dmean <= 1e-12, "mean drift = " + f(dmean, 3));
    o.require(dl2 <= 1e-8, "relative L2 drift = " + f(dl2, 3));
  });

  harness::ValidationConfig config;
  bool config_ok = true;
  try {
    config = harness::config_from_json(slurp(config_path));
  } catch (const std::exception& e) {
    std::printf("cannot load %s: %s\n", config_path.string().c_str(), e.what());
    config_ok = false;
  }
  const fs::path work = fs::temp_directory_path() / "cmbo_acceptance";
  fs::remove_all(work);
  Experiment first;

  report(7, "residual scaling", 600.0, [&](Outcome& o) {
    o.require(config_ok, "config " + config_path.string());
    if (!config_ok) return;
    first.sweep = harness::run_residual_sweep(config, jobs);
    for (const auto& a : first.sweep) {
      if (!a.report) {
        o.require(false, "alpha " + f(a.alpha) + ": no fit");
        continue;
      }
      const double s = a.report->slope, beta = a.report->target_exponent;
      o.require(std::abs(s - beta) <= 0.3, "alpha " + f(a.alpha) + ": slope " + f(s, 4) + " vs beta " + f(beta));
    }
  });

  report(8, "error scaling of the approximation", 1800.0, [&](Outcome& o) {
    o.require(config_ok, "config " + config_path.string());
    if (!config_ok) return;
    first.runs = harness::run_validation(config, jobs);
    for (const auto& a : first.runs) {
      const std::string tag = "alpha " + f(a.alpha) + ": ";
      bool any_failed = false;
      for (const auto& r : a.runs) {
        if (r.failed) {
          any_failed = true;
          o.require(false, tag + "eps " + f(r.plan.epsilon) + " failed at t " + f(r.failure_time) + ": " + r.failure);
        }
        o.require(r.plan.sites <= 4096, tag + "N = " + std::to_string(r.plan.sites) + " <= 4096");
      }
      if (any_failed || !a.mu || !a.nu) {
        o.require(false, tag + "no fit");
        continue;
      }
      const double gamma = a.mu->target_exponent;
      o.require(std::abs(a.mu->slope - gamma) <= 0.3,
                tag + "mu slope " + f(a.mu->slope, 4) + " vs gamma " + f(gamma));
      o.require(std::abs(a.nu->slope - gamma) <= 0.3,
                tag + "nu slope " + f(a.nu->slope, 4) + " vs gamma " + f(gamma));
      for (const auto* rep : {&*a.mu, &*a.nu}) {
        double worst = 0.0;
        for (const auto& [eps, err] : rep->pairs)
          worst = std::max(worst, err / (std::exp(rep->intercept) * std::pow(eps, rep->slope)));
        o.require(worst <= 10.0, tag + (rep == &*a.mu ? "mu" : "nu") + " error / fitted law <= " + f(worst, 3));
      }
    }
  });

  report(9, "determinism of criteria 7-8", 1800.0, [&](Outcome& o) {
    o.require(config_ok, "config " + config_path.string());
    if (!config_ok || first.sweep.empty() || first.runs.empty()) {
      o.require(false, "criteria 7-8 produced no results to compare");
      return;
    }
    fs::create_directories(work / "a");
    harness::write_residual_csv(first.sweep, work / "a" / "residual_sweep.csv");
    harness::write_validation_csv(first.runs, work / "a" / "validation.csv");
    harness::write_energy_csv(first.runs, work / "a" / "energy.csv");
    run_experiment(config, std::max(1u, jobs + 1), work / "b");
    for (const char* name : {"residual_sweep.csv", "validation.csv", "energy.csv"}) {
      const auto a = slurp(work / "a" / name), b = slurp(work / "b" / name);
      o.require(!a.empty() && a == b, std::string(name) + " identical (" + std::to_string(a.size()) + " bytes)");
    }
  });
  fs::remove_all(work);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
