#include "cmbo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "cmbo/error.hpp"
#include "cmbo/log.hpp"

namespace cmbo::harness {

using spectral::PeriodicGrid;
using spectral::SpectralField;

namespace {

double l2(const std::vector<double>& v) {
  long double acc = 0;
  for (double x : v) acc += static_cast<long double>(x) * x;
  return std::sqrt(static_cast<double>(acc));
}

void remove_mean(std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (auto& x : v) x -= m;
}

std::size_t commensurate_sites(double period, double eps) {
  const double ratio = period / eps;
  const double sites = std::round(ratio);
  if (std::abs(ratio - sites) > 1e-9 * sites) {
    std::ostringstream msg;
    msg << "period " << period << " is not an integer multiple of epsilon " << eps;
    throw ConfigError(msg.str());
  }
  return static_cast<std::size_t>(sites);
}

// Runs `task(i)` for i in [0, count) on up to `jobs` threads. The first
// exception is rethrown after all workers finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

std::size_t zeta_tail_cutoff(const RunPlan& p, const spectral::SpectralField& u0) {
  const auto samples = spectral::sample_uniform(u0, p.sites, 0.0);
  const double r_norm = std::pow(p.epsilon, p.alpha - 1) * l2(samples);
  const double target = 0.05 * std::pow(p.epsilon, specfun::beta_exponent(p.alpha) - p.alpha);
  const std::size_t cap = p.sites / 2 - 1;
  for (std::size_t m = 1; m <= cap; ++m) {
    if (r_norm * std::pow(static_cast<double>(m), 1 - p.alpha) / (p.alpha - 1) < target) return m;
  }
  return cap;
}

}  // namespace

void validate(const ValidationConfig& c) {
  if (c.alphas.empty()) throw ConfigError("config: alphas must not be empty");
  for (double a : c.alphas) {
    if (!(a > 1.0 && a < 3.0)) throw ConfigError("config: every alpha must lie in (1, 3)");
  }
  if (c.epsilons.empty()) throw ConfigError("config: epsilons must not be empty");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    if (!(c.epsilons[i] > 0.0 && c.epsilons[i] < 0.5)) {
      throw ConfigError("config: epsilons must lie in (0, 0.5)");
    }
    if (i > 0 && !(c.epsilons[i] < c.epsilons[i - 1])) {
      throw ConfigError("config: epsilons must be sorted in strictly descending order");
    }
  }
  if (!(c.tau0 > 0.0) || !std::isfinite(c.tau0)) throw ConfigError("config: tau0 must be positive");
  if (c.bo_n < 8 || (c.bo_n & (c.bo_n - 1)) != 0) {
    throw ConfigError("config: bo.n must be a power of two >= 8");
  }
  if (!(c.bo_dtau > 0.0)) throw ConfigError("config: bo.dtau must be positive");
  if (!(c.dealias_fraction > 0.5 && c.dealias_fraction <= 1.0)) {
    throw ConfigError("config: bo.dealias_fraction must lie in (0.5, 1]");
  }
  if (!(c.lattice_dt > 0.0)) throw ConfigError("config: lattice.dt must be positive");
  if (c.cutoff_policy == CutoffPolicy::Fixed && c.cutoff < 1) {
    throw ConfigError("config: a fixed cutoff policy needs lattice.cutoff >= 1");
  }
  if (c.checkpoints < 1) throw ConfigError("config: checkpoints must be at least 1");
  if (!(c.profile.period > 0.0)) throw ConfigError("config: profile.period must be positive");
  if (!std::isfinite(c.profile.amplitude)) throw ConfigError("config: profile.amplitude must be finite");
  if (!(c.profile.width >= 0.0)) throw ConfigError("config: profile.width must be >= 0");
}

std::vector<RunPlan> make_plan(const ValidationConfig& config) {
  validate(config);
  const auto u0 = initial_profile(config);
  std::vector<RunPlan> plans;
  for (double alpha : config.alphas) {
    for (double eps_req : config.epsilons) {
      RunPlan p{};
      p.alpha = alpha;
      p.epsilon_requested = eps_req;
      p.sites = static_cast<std::size_t>(std::lround(config.profile.period / eps_req));
      if (p.sites < 16) throw ConfigError("config: epsilon too large for the period (fewer than 16 sites)");
      p.epsilon = config.profile.period / static_cast<double>(p.sites);
      p.t_end = config.tau0 / std::pow(p.epsilon, alpha);
      const auto k = config.checkpoints;
      const auto per = static_cast<std::size_t>(
          std::ceil(p.t_end / (static_cast<double>(k) * config.lattice_dt) - 1e-12));
      p.steps_per_checkpoint = std::max<std::size_t>(per, 1);
      p.steps = p.steps_per_checkpoint * k;
      p.dt = p.t_end / static_cast<double>(p.steps);
      switch (config.cutoff_policy) {
        case CutoffPolicy::HalfRing: p.cutoff = p.sites / 2 - 1; break;
        case CutoffPolicy::Fixed: p.cutoff = std::min(config.cutoff, p.sites / 2 - 1); break;
        case CutoffPolicy::ZetaTail: p.cutoff = zeta_tail_cutoff(p, u0); break;
      }
      plans.push_back(p);
    }
  }
  return plans;
}

SpectralField initial_profile(const ValidationConfig& config) {
  const double P = config.profile.period;
  const double w = config.profile.width > 0.0 ? config.profile.width : P / 20.0;
  const double a = config.profile.amplitude;
  PeriodicGrid grid(P, config.bo_n);
  auto bump = [&](double x) { return a * std::exp(-std::pow((x - P / 2) / w, 2)); };
  const double mean = SpectralField::sample(grid, bump).mean();
  return SpectralField::sample(grid, [&](double x) { return bump(x) - mean; });
}

lattice::LatticeState build_ansatz(const SpectralField& u0, double eps,
                                   const specfun::AlphaParams& params) {
  if (std::abs(u0.mean()) > 1e-10) throw PreconditionError("build_ansatz: u0 must have zero mean");
  const auto sites = commensurate_sites(u0.grid().period(), eps);
  const auto u = spectral::sample_uniform(u0, sites, 0.0);
  const double scale = std::pow(eps, params.alpha - 1);
  lattice::LatticeState s{std::vector<double>(sites), std::vector<double>(sites), 0.0};
  for (std::size_t j = 0; j < sites; ++j) {
    s.r[j] = -scale * u[j];
    s.p[j] = params.c * scale * u[j];
  }
  return s;
}

AnsatzFields ansatz_fields(const bo::BOState& state, double eps, double t,
                           const specfun::AlphaParams& params, std::size_t sites,
                           double dealias_fraction) {
  const double a = params.alpha;
  const double offset = -eps * params.c * t;
  const auto v = spectral::antiderivative_meanzero(state.u);
  const auto vs = spectral::sample_uniform(v, sites, offset);
  auto vt = spectral::sample_uniform(bo::dtau_v(state, params, dealias_fraction), sites, offset);
  remove_mean(vt);

  AnsatzFields out;
  out.u_shifted = spectral::sample_uniform(state.u, sites, offset);
  out.u_unshifted = spectral::sample_uniform(state.u, sites, 0.0);
  out.rtilde.resize(sites);
  out.ptilde.resize(sites);
  const double sr = std::pow(eps, a - 2);
  const double su = params.c * std::pow(eps, a - 1);
  const double sv = std::pow(eps, 2 * a - 2);
  for (std::size_t j = 0; j < sites; ++j) {
    out.rtilde[j] = sr * (vs[(j + 1) % sites] - vs[j]);
    out.ptilde[j] = su * out.u_shifted[j] + sv * vt[j];
  }
  return out;
}

ResidualSample residual_eval(const bo::BOState& state, double eps, double t,
                             const specfun::AlphaParams& params, const lattice::Lattice& lat,
                             double dealias_fraction, bool keep_values) {
  const std::size_t sites = lat.config().n;
  if (commensurate_sites(state.u.grid().period(), eps) != sites) {
    throw ConfigError("residual_eval: lattice size does not match period / epsilon");
  }
  const double a = params.alpha;
  const double offset = -eps * params.c * t;
  auto sample = [&](const SpectralField& f) { return spectral::sample_uniform(f, sites, offset); };

  const auto ut = bo::dtau_u(state, params, dealias_fraction);
  const auto ux = sample(spectral::derivative(state.u));
  const auto uts = sample(ut);
  const auto vtt = sample(bo::dtau2_v(state, params, dealias_fraction));
  const auto vs = sample(spectral::antiderivative_meanzero(state.u));

  std::vector<double> rt(sites);
  const double sr = std::pow(eps, a - 2);
  for (std::size_t j = 0; j < sites; ++j) rt[j] = sr * (vs[(j + 1) % sites] - vs[j]);
  const auto f = lat.force(rt);

  const double c2 = params.c * params.c;
  const double e1 = std::pow(eps, a), e2 = std::pow(eps, 2 * a - 1), e3 = std::pow(eps, 3 * a - 2);
  std::vector<double> res(sites);
  for (std::size_t j = 0; j < sites; ++j) {
    const double accel = -e1 * c2 * ux[j] + e2 * params.kappa1 * uts[j] + e3 * vtt[j];
    res[j] = accel - f[j];
  }
  remove_mean(res);
  ResidualSample out{eps, t, l2(res), {}};
  if (keep_values) out.values = std::move(res);
  return out;
}

ResidualSample residual_eval(const bo::BOState& state, double eps, double t,
                             const specfun::AlphaParams& params, std::size_t cutoff,
                             bool tail_correction) {
  const auto sites = commensurate_sites(state.u.grid().period(), eps);
  lattice::Lattice lat({sites, params.alpha, cutoff, 0.05, tail_correction});
  return residual_eval(state, eps, t, params, lat);
}

ErrorEnergySample error_energy_sample(const lattice::LatticeState& state,
                                      const AnsatzFields& ansatz,
                                      const lattice::LatticeConfig& config) {
  const std::size_t n = state.r.size();
  std::vector<double> eta(n), xi(n);
  for (std::size_t j = 0; j < n; ++j) {
    eta[j] = state.r[j] - ansatz.rtilde[j];
    xi[j] = state.p[j] - ansatz.ptilde[j];
  }
  const auto h = lattice::error_energy(xi, eta, ansatz.rtilde, config, false);
  ErrorEnergySample s;
  s.t = state.t;
  s.energy = h.value;
  s.sqrt_energy = std::sqrt(std::max(h.value, 0.0));
  s.eta_l2 = l2(eta);
  s.xi_l2 = l2(xi);
  const double eta2 = s.eta_l2 * s.eta_l2;
  const double lo = eta2 > 0 ? h.lower / eta2 : 0.0;
  const double hi = eta2 > 0 ? h.upper / eta2 : 0.0;
  s.lower_ratio = std::sqrt(std::min(0.5, lo));
  s.upper_ratio = std::sqrt(std::max(0.5, hi));
  s.small = h.small;
  s.within_bounds = h.within_bounds;
  return s;
}

double EpsilonRun::sup_mu() const {
  double m = 0;
  for (const auto& c : checkpoints) m = std::max(m, c.mu_l2);
  return m;
}

double EpsilonRun::sup_nu() const {
  double m = 0;
  for (const auto& c : checkpoints) m = std::max(m, c.nu_l2);
  return m;
}

ScalingReport fit_slope(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw ArgumentError("fit_slope: at least three pairs are required");
  double mx = 0, my = 0;
  for (const auto& [e, v] : pairs) {
    if (!(e > 0.0) || !(v > 0.0)) throw ArgumentError("fit_slope: values must be positive");
    mx += std::log(e);
    my += std::log(v);
  }
  const double n = static_cast<double>(pairs.size());
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [e, v] : pairs) {
    const double dx = std::log(e) - mx, dy = std::log(v) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw ArgumentError("fit_slope: epsilons must not all coincide");
  ScalingReport r;
  r.pairs = pairs;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return r;
}

namespace {

void record_checkpoint(EpsilonRun& run, const lattice::LatticeState& st, const bo::BOState& bo,
                       const specfun::AlphaParams& params, const lattice::LatticeConfig& lcfg,
                       double dealias) {
  const auto& p = run.plan;
  const auto fields = ansatz_fields(bo, p.epsilon, st.t, params, p.sites, dealias);
  const double scale = std::pow(p.epsilon, p.alpha - 1);
  std::vector<double> mu(p.sites), nu(p.sites), mu0(p.sites), nu0(p.sites);
  for (std::size_t j = 0; j < p.sites; ++j) {
    mu[j] = st.r[j] + scale * fields.u_shifted[j];
    nu[j] = st.p[j] - params.c * scale * fields.u_shifted[j];
    mu0[j] = st.r[j] + scale * fields.u_unshifted[j];
    nu0[j] = st.p[j] - params.c * scale * fields.u_unshifted[j];
  }
  CheckpointError c;
  c.t = st.t;
  c.tau = bo.tau;
  c.mu_l2 = l2(mu);
  c.nu_l2 = l2(nu);
  c.mu_unshifted_l2 = l2(mu0);
  c.nu_unshifted_l2 = l2(nu0);
  c.energy = error_energy_sample(st, fields, lcfg);
  if (!c.energy.small) {
    std::ostringstream msg;
    msg << "alpha " << p.alpha << ", eps " << p.epsilon << ", t " << st.t
        << ": error-energy smallness hypothesis violated";
    warn(msg.str());
  }
  run.checkpoints.push_back(c);
}

void evolve(EpsilonRun& run, const ValidationConfig& config, const specfun::AlphaParams& params,
            const SpectralField& u0, bool backward) {
  const auto& p = run.plan;
  lattice::LatticeConfig lcfg{p.sites, p.alpha, p.cutoff, p.dt, config.tail_correction};
  lattice::Lattice lat(lcfg);
  bo::BOConfig bcfg{params, config.bo_dtau, config.dealias_fraction, {}};
  auto st = build_ansatz(u0, p.epsilon, params);
  bo::BOState bo{u0, 0.0};
  const double sign = backward ? -1.0 : 1.0;
  const double ea = std::pow(p.epsilon, p.alpha);
  if (!backward) {
    record_checkpoint(run, st, bo, params, lcfg, config.dealias_fraction);
    run.bo_trace.push_back(bo::monitor(bo));
  }
  for (std::size_t i = 1; i <= config.checkpoints; ++i) {
    const double t = sign * p.dt * static_cast<double>(i * p.steps_per_checkpoint);
    const double tau = ea * t;
    try {
      lat.advance(st, p.steps_per_checkpoint, backward);
      st.t = t;
      bo = bo::run_to(bo, tau, bcfg).state;
    } catch (const BlowUpError& e) {
      run.failed = true;
      run.failure = e.what();
      run.failure_time = e.time();
      return;
    }
    record_checkpoint(run, st, bo, params, lcfg, config.dealias_fraction);
    run.bo_trace.push_back(bo::monitor(bo));
  }
}

}  // namespace

std::vector<AlphaValidation> run_validation(const ValidationConfig& config, unsigned jobs) {
  const auto plans = make_plan(config);
  const auto u0 = initial_profile(config);
  std::vector<specfun::AlphaParams> params;
  for (double a : config.alphas) params.push_back(specfun::make_alpha_params(a));

  const std::size_t ne = config.epsilons.size();
  std::vector<EpsilonRun> runs(plans.size());
  parallel_for(plans.size(), jobs, [&](std::size_t i) {
    runs[i].plan = plans[i];
    const auto& pa = params[i / ne];
    evolve(runs[i], config, pa, u0, false);
    if (config.bidirectional && !runs[i].failed) evolve(runs[i], config, pa, u0, true);
    std::sort(runs[i].checkpoints.begin(), runs[i].checkpoints.end(),
              [](const auto& a, const auto& b) { return a.t < b.t; });
  });

  std::vector<AlphaValidation> out;
  for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
    AlphaValidation av;
    av.alpha = config.alphas[ai];
    std::vector<std::pair<double, double>> mu, nu;
    for (std::size_t ei = 0; ei < ne; ++ei) {
      const auto& r = runs[ai * ne + ei];
      av.runs.push_back(r);
      if (r.failed) continue;
      if (r.sup_mu() > 0) mu.emplace_back(r.plan.epsilon, r.sup_mu());
      if (r.sup_nu() > 0) nu.emplace_back(r.plan.epsilon, r.sup_nu());
    }
    const double gamma = params[ai].gamma;
    if (mu.size() >= 3) {
      av.mu = fit_slope(mu);
      av.mu->target_exponent = gamma;
    }
    if (nu.size() >= 3) {
      av.nu = fit_slope(nu);
      av.nu->target_exponent = gamma;
    }
    out.push_back(std::move(av));
  }
  return out;
}

std::vector<AlphaResidual> run_residual_sweep(const ValidationConfig& config, unsigned jobs) {
  const auto plans = make_plan(config);
  const auto u0 = initial_profile(config);
  const std::size_t ne = config.epsilons.size();
  const std::size_t k = config.checkpoints;

  std::vector<AlphaResidual> out(config.alphas.size());
  parallel_for(config.alphas.size(), jobs, [&](std::size_t ai) {
    auto& res = out[ai];
    res.alpha = config.alphas[ai];
    const auto params = specfun::make_alpha_params(res.alpha);
    bo::BOConfig bcfg{params, config.bo_dtau, config.dealias_fraction, {}};

    // BO states at the common slow times tau_i = i tau0 / k.
    std::vector<bo::BOState> states{{u0, 0.0}};
    auto march = [&](double sign) {
      bo::BOState s{u0, 0.0};
      for (std::size_t i = 1; i <= k; ++i) {
        s = bo::run_to(s, sign * config.tau0 * static_cast<double>(i) / static_cast<double>(k), bcfg).state;
        states.push_back(s);
      }
    };
    march(1.0);
    if (config.bidirectional) march(-1.0);
    std::sort(states.begin(), states.end(), [](const auto& a, const auto& b) { return a.tau < b.tau; });

    std::vector<std::pair<double, double>> pairs;
    for (std::size_t ei = 0; ei < ne; ++ei) {
      const auto& plan = plans[ai * ne + ei];
      res.plans.push_back(plan);
      lattice::Lattice lat({plan.sites, plan.alpha, plan.cutoff, plan.dt, config.tail_correction});
      std::vector<ResidualSample> samples;
      double sup = 0;
      const double ea = std::pow(plan.epsilon, plan.alpha);
      for (const auto& s : states) {
        samples.push_back(residual_eval(s, plan.epsilon, s.tau / ea, params, lat, config.dealias_fraction));
        sup = std::max(sup, samples.back().l2_norm);
      }
      res.samples.push_back(std::move(samples));
      if (sup > 0) pairs.emplace_back(plan.epsilon, sup);
    }
    if (pairs.size() >= 3) {
      res.report = fit_slope(pairs);
      res.report->target_exponent = params.beta;
    }
  });
  return out;
}

}  // namespace cmbo::harness
