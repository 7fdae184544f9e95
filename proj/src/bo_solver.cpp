#include "cmbo/bo_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmbo/error.hpp"
#include "cmbo/log.hpp"
#include "fft.hpp"

namespace cmbo::bo {

using spectral::Complex;
using spectral::PeriodicGrid;
using spectral::SpectralField;

namespace {

std::vector<double> dealias_mask(const PeriodicGrid& grid, double fraction) {
  const double limit = fraction * static_cast<double>(grid.size() / 2);
  std::vector<double> mask(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto q = std::abs(static_cast<double>(grid.mode_index(j)));
    mask[j] = (q < limit && j != grid.nyquist_slot()) ? 1.0 : 0.0;
  }
  return mask;
}

// Linear symbol of u_tau = L u: +i (kappa3/kappa1) sgn(k) |k|^alpha.
std::vector<Complex> linear_symbol(const PeriodicGrid& grid, const specfun::AlphaParams& p) {
  std::vector<Complex> sym(grid.size());
  const double ratio = p.kappa3 / p.kappa1;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double k = grid.wavenumber(j);
    if (k == 0.0 || j == grid.nyquist_slot()) continue;
    sym[j] = Complex(0.0, ratio * std::copysign(std::pow(std::abs(k), p.alpha), k));
  }
  return sym;
}

std::vector<double> real_inverse(const std::vector<Complex>& spec) {
  std::vector<Complex> tmp(spec.size());
  detail::dft_backward(spec, tmp);
  std::vector<double> out(spec.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = tmp[i].real();
  return out;
}

std::vector<Complex> normalized_forward(const std::vector<double>& values) {
  std::vector<Complex> in(values.begin(), values.end()), out(values.size());
  detail::dft_forward(in, out);
  const double inv = 1.0 / static_cast<double>(values.size());
  for (auto& c : out) c *= inv;
  return out;
}

// Dealiased spectrum of a * d_X b, both given as spectra; the result is
// truncated with the same mask.
std::vector<Complex> product_dx(const PeriodicGrid& grid, const std::vector<double>& mask,
                                const std::vector<Complex>& a, const std::vector<Complex>& b) {
  const std::size_t n = grid.size();
  std::vector<Complex> ad(n), bxd(n);
  for (std::size_t j = 0; j < n; ++j) {
    ad[j] = mask[j] * a[j];
    bxd[j] = mask[j] * Complex(0.0, grid.wavenumber(j)) * b[j];
  }
  auto av = real_inverse(ad);
  const auto bv = real_inverse(bxd);
  for (std::size_t i = 0; i < n; ++i) av[i] *= bv[i];
  auto out = normalized_forward(av);
  for (std::size_t j = 0; j < n; ++j) out[j] *= mask[j];
  return out;
}

std::vector<Complex> to_vector(std::span<const Complex> s) { return {s.begin(), s.end()}; }

bool all_finite(const std::vector<Complex>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

class Integrator {
 public:
  Integrator(const PeriodicGrid& grid, const specfun::AlphaParams& params, double dt,
             double fraction)
      : grid_(grid), dt_(dt), mask_(dealias_mask(grid, fraction)),
        coupling_(-params.kappa2 / params.kappa1), e_(grid.size()), e2_(grid.size()) {
    const auto sym = linear_symbol(grid, params);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      e_[j] = std::exp(sym[j] * dt);
      e2_[j] = std::exp(sym[j] * (0.5 * dt));
    }
    e_[grid.nyquist_slot()] = e2_[grid.nyquist_slot()] = 0.0;
  }

  void advance(std::vector<Complex>& u) const {
    const std::size_t n = u.size();
    std::vector<Complex> stage(n);
    const auto k1 = nonlinear(u);
    for (std::size_t j = 0; j < n; ++j) stage[j] = e2_[j] * (u[j] + 0.5 * dt_ * k1[j]);
    const auto k2 = nonlinear(stage);
    for (std::size_t j = 0; j < n; ++j) stage[j] = e2_[j] * u[j] + 0.5 * dt_ * k2[j];
    const auto k3 = nonlinear(stage);
    for (std::size_t j = 0; j < n; ++j) stage[j] = e_[j] * u[j] + dt_ * e2_[j] * k3[j];
    const auto k4 = nonlinear(stage);
    for (std::size_t j = 0; j < n; ++j) {
      u[j] = e_[j] * u[j] +
             dt_ / 6.0 * (e_[j] * k1[j] + 2.0 * e2_[j] * (k2[j] + k3[j]) + k4[j]);
    }
  }

  double cfl_number(const std::vector<Complex>& u) const {
    double umax = 0.0;
    for (double v : real_inverse(u)) umax = std::max(umax, std::abs(v));
    const double kmax = std::abs(grid_.wavenumber(grid_.nyquist_slot()));
    return std::abs(dt_ * coupling_) * umax * kmax;
  }

 private:
  std::vector<Complex> nonlinear(const std::vector<Complex>& u) const {
    auto out = product_dx(grid_, mask_, u, u);
    for (auto& c : out) c *= coupling_;
    return out;
  }

  PeriodicGrid grid_;
  double dt_;
  std::vector<double> mask_;
  double coupling_;
  std::vector<Complex> e_, e2_;
};

void check_finite(const std::vector<Complex>& u, double tau) {
  if (!all_finite(u)) {
    throw BlowUpError("Benjamin-Ono solution became non-finite", tau);
  }
}

}  // namespace

void validate(const BOConfig& config) {
  if (!(config.dtau > 0.0) || !std::isfinite(config.dtau)) {
    throw ArgumentError("BOConfig: dtau must be positive");
  }
  if (!(config.dealias_fraction > 0.5 && config.dealias_fraction <= 1.0)) {
    throw ArgumentError("BOConfig: dealias_fraction must lie in (0.5, 1]");
  }
  if (!(config.params.kappa1 > 0.0)) throw ArgumentError("BOConfig: params not initialized");
}

SpectralField bo_rhs(const BOState& state, const specfun::AlphaParams& params,
                     double dealias_fraction) {
  const auto& grid = state.u.grid();
  const auto mask = dealias_mask(grid, dealias_fraction);
  const auto u = to_vector(state.u.spectrum());
  auto out = product_dx(grid, mask, u, u);
  const auto sym = linear_symbol(grid, params);
  const double coupling = -params.kappa2 / params.kappa1;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = coupling * out[j] + sym[j] * u[j];
  return SpectralField::from_spectrum(grid, out);
}

SpectralField dtau_u(const BOState& state, const specfun::AlphaParams& params,
                     double dealias_fraction) {
  return bo_rhs(state, params, dealias_fraction);
}

SpectralField dtau_v(const BOState& state, const specfun::AlphaParams& params,
                     double dealias_fraction) {
  if (std::abs(state.u.mean()) > 1e-10) {
    throw PreconditionError("dtau_v: u must have zero mean");
  }
  return spectral::antiderivative_meanzero(bo_rhs(state, params, dealias_fraction));
}

SpectralField dtau2_v(const BOState& state, const specfun::AlphaParams& params,
                      double dealias_fraction) {
  if (std::abs(state.u.mean()) > 1e-10) {
    throw PreconditionError("dtau2_v: u must have zero mean");
  }
  const auto& grid = state.u.grid();
  const auto mask = dealias_mask(grid, dealias_fraction);
  const auto u = to_vector(state.u.spectrum());
  const auto ut = to_vector(bo_rhs(state, params, dealias_fraction).spectrum());
  // d_tau (u u_X) = d_X (u u_tau) = u u_tau,X + u_tau u_X
  auto a = product_dx(grid, mask, u, ut);
  const auto b = product_dx(grid, mask, ut, u);
  const auto sym = linear_symbol(grid, params);
  const double coupling = -params.kappa2 / params.kappa1;
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = coupling * (a[j] + b[j]) + sym[j] * ut[j];
  a[0] = 0.0;
  return spectral::antiderivative_meanzero(SpectralField::from_spectrum(grid, a));
}

MonitorSample monitor(const BOState& state) {
  return {state.tau, state.u.mean(), spectral::l2_norm(state.u),
          spectral::sobolev_norm(state.u, 6.0)};
}

BOState step(const BOState& state, const BOConfig& config) {
  validate(config);
  Integrator integ(state.u.grid(), config.params, config.dtau, config.dealias_fraction);
  auto u = to_vector(state.u.spectrum());
  const double cfl = integ.cfl_number(u);
  if (cfl > 1.0) {
    std::ostringstream msg;
    msg << "Benjamin-Ono step CFL number " << cfl << " exceeds 1";
    warn(msg.str());
  }
  integ.advance(u);
  const double tau = state.tau + config.dtau;
  check_finite(u, tau);
  return {SpectralField::from_spectrum(state.u.grid(), u), tau};
}

BORun run_to(const BOState& state, double tau_end, const BOConfig& config) {
  validate(config);
  if (!std::isfinite(tau_end)) throw ArgumentError("run_to: tau_end must be finite");
  BORun run{state, {monitor(state)}};
  if (tau_end == state.tau) return run;

  const double dir = tau_end > state.tau ? 1.0 : -1.0;
  std::vector<double> stops;
  for (double c : config.checkpoints) {
    if (dir * (c - state.tau) > 0.0 && dir * (tau_end - c) > 0.0) stops.push_back(c);
  }
  std::sort(stops.begin(), stops.end(), [dir](double a, double b) { return dir * a < dir * b; });
  stops.push_back(tau_end);

  const auto& grid = state.u.grid();
  auto u = to_vector(state.u.spectrum());
  double tau = state.tau;
  bool warned = false;
  for (double stop : stops) {
    const double span = stop - tau;
    const auto steps = static_cast<long>(std::ceil(std::abs(span) / config.dtau - 1e-9));
    if (steps <= 0) continue;
    const double dt = span / static_cast<double>(steps);
    Integrator integ(grid, config.params, dt, config.dealias_fraction);
    if (!warned) {
      const double cfl = integ.cfl_number(u);
      if (cfl > 1.0) {
        std::ostringstream msg;
        msg << "Benjamin-Ono run CFL number " << cfl << " exceeds 1";
        warn(msg.str());
        warned = true;
      }
    }
    for (long s = 0; s < steps; ++s) {
      integ.advance(u);
      check_finite(u, tau + dt * static_cast<double>(s + 1));
    }
    tau = stop;
    run.state = {SpectralField::from_spectrum(grid, u), tau};
    u = to_vector(run.state.u.spectrum());
    run.trace.push_back(monitor(run.state));
  }
  return run;
}

}  // namespace cmbo::bo
