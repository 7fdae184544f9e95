#include "cmbo/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "cmbo/error.hpp"
#include "cmbo/log.hpp"
#include "cmbo/specfun.hpp"
#include "fft.hpp"
#include "numeric_detail.hpp"

namespace cmbo::lattice {

namespace {

using Complex = std::complex<double>;
constexpr double kSeriesCrossover = 1e-3;

// (1+q)^-s - 1 + s q
double phi(double s, double q) {
  if (std::abs(q) < kSeriesCrossover) {
    const double c2 = s * (s + 1) / 2;
    const double c3 = c2 * (s + 2) / 3;
    const double c4 = c3 * (s + 3) / 4;
    const double c5 = c4 * (s + 4) / 5;
    return q * q * (c2 - q * (c3 - q * (c4 - q * c5)));
  }
  return std::expm1(-s * std::log1p(q)) + s * q;
}

// 1 - (1+q)^-s
double one_minus_power(double s, double q) {
  if (std::abs(q) < kSeriesCrossover) {
    const double c1 = s;
    const double c2 = c1 * (s + 1) / 2;
    const double c3 = c2 * (s + 2) / 3;
    const double c4 = c3 * (s + 3) / 4;
    const double c5 = c4 * (s + 4) / 5;
    return q * (c1 - q * (c2 - q * (c3 - q * (c4 - q * c5))));
  }
  return -std::expm1(-s * std::log1p(q));
}

[[noreturn]] void collision(double g, long m) {
  std::ostringstream msg;
  msg << "particles collided: window m = " << m << " has m + G_m r = " << m + g;
  throw CollisionError(msg.str(), 0.0);
}

std::vector<double> prefix_twice(std::span<const double> r) {
  const std::size_t n = r.size();
  std::vector<double> s(2 * n + 1, 0.0);
  for (std::size_t i = 0; i < 2 * n; ++i) s[i + 1] = s[i] + r[i % n];
  return s;
}

double sum_squares(std::span<const double> v) {
  detail::CompensatedSum acc;
  for (double x : v) acc.add(x * x);
  return acc.value();
}

std::vector<Complex> fft(std::span<const double> v) {
  std::vector<Complex> in(v.begin(), v.end()), out(v.size());
  detail::dft_forward(in, out);
  return out;
}

}  // namespace

void validate(const LatticeConfig& c) {
  cmbo::detail::require_alpha_open(c.alpha, "LatticeConfig");
  if (c.n < 16) throw ArgumentError("LatticeConfig: ring size must be at least 16");
  if (c.cutoff < 1 || c.cutoff + 1 > c.n / 2) {
    throw ArgumentError("LatticeConfig: cutoff must satisfy 1 <= M <= N/2 - 1");
  }
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ArgumentError("LatticeConfig: dt must be positive");
}

std::vector<double> gsum(std::span<const double> r, long m) {
  const auto n = static_cast<long>(r.size());
  if (m == 0 || std::abs(m) > n) {
    throw ArgumentError("gsum: window length must satisfy 1 <= |m| <= N");
  }
  if (std::abs(m) == 1) {
    std::vector<double> out(r.begin(), r.end());
    if (m < 0) std::rotate(out.rbegin(), out.rbegin() + 1, out.rend());
    return out;
  }
  const auto s = prefix_twice(r);
  const long len = std::abs(m);
  const long shift = m > 0 ? 0 : n - len;  // G_{-m} r_j = G_m r_{j-m}
  std::vector<double> out(r.size());
  for (long j = 0; j < n; ++j) {
    const long start = (j + shift) % n;
    out[j] = s[start + len] - s[start];
  }
  return out;
}

double v_m(double g, long m, double alpha) {
  if (g <= -static_cast<double>(m)) collision(g, m);
  const double md = static_cast<double>(m);
  return std::pow(md, -alpha) * phi(alpha, g / md);
}

double v_m_prime(double g, long m, double alpha) {
  if (g <= -static_cast<double>(m)) collision(g, m);
  const double md = static_cast<double>(m);
  return alpha * std::pow(md, -alpha - 1) * one_minus_power(alpha + 1, g / md);
}

double w_m(double a, double b, long m, double alpha) {
  const double md = static_cast<double>(m);
  if (b <= -md) collision(b, m);
  if (b + a <= -md) collision(b + a, m);
  const double base = md + b;
  return std::pow(base, -alpha) * phi(alpha, a / base);
}

double w_m_prime(double a, double b, long m, double alpha) {
  const double md = static_cast<double>(m);
  if (b <= -md) collision(b, m);
  if (b + a <= -md) collision(b + a, m);
  const double base = md + b;
  return alpha * std::pow(base, -alpha - 1) * one_minus_power(alpha + 1, a / base);
}

double w_m_db(double a, double b, long m, double alpha) {
  const double md = static_cast<double>(m);
  if (b <= -md) collision(b, m);
  if (b + a <= -md) collision(b + a, m);
  const double base = md + b;
  return -alpha * std::pow(base, -alpha - 1) * phi(alpha + 1, a / base);
}

Lattice::Lattice(LatticeConfig config) : config_(config) {
  validate(config_);
  if (!config_.tail_correction) return;

  // Fold m^-(alpha+2), m > M, onto ring residues; the ring multipliers only
  // depend on m mod N.
  const std::size_t n = config_.n;
  const double s = config_.alpha + 2.0;
  const double aa1 = config_.alpha * (config_.alpha + 1.0);
  std::vector<double> folded(n, 0.0);
  const std::size_t explicit_terms = std::max<std::size_t>(n * 64, std::size_t{1} << 20);
  const std::size_t last = config_.cutoff + explicit_terms;
  for (std::size_t m = last; m > config_.cutoff; --m) {
    folded[m % n] += std::pow(static_cast<double>(m), -s);
  }
  // Remaining terms per residue class: integral plus half the first term.
  for (std::size_t k = 1; k <= n; ++k) {
    const double m0 = static_cast<double>(last + k);
    folded[(last + k) % n] += std::pow(m0, 1.0 - s) / ((s - 1.0) * static_cast<double>(n)) +
                              0.5 * std::pow(m0, -s);
  }
  detail::CompensatedSum total;
  for (double w : folded) total.add(w);
  const double z = total.value();
  const auto transform = fft(folded);

  tail_force_re_.assign(n, 0.0);
  tail_force_im_.assign(n, 0.0);
  tail_energy_.assign(n, 0.0);
  for (std::size_t q = 0; q < n; ++q) {
    if (q == 0) {
      tail_energy_[0] = aa1 * specfun::zeta_tail(config_.alpha, static_cast<std::int64_t>(config_.cutoff), 1e-15);
      continue;
    }
    const double kappa = 2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(n);
    const double c = transform[q].real();  // sum_{m>M} m^-s cos(kappa m)
    const Complex sym = aa1 * 2.0 * (c - z) / (std::polar(1.0, kappa) - 1.0);
    tail_force_re_[q] = sym.real();
    tail_force_im_[q] = sym.imag();
    tail_energy_[q] = aa1 * 2.0 * (z - c) / (2.0 - 2.0 * std::cos(kappa));
  }
}

void Lattice::add_tail_force(std::span<const double> r, std::span<double> out) const {
  const std::size_t n = r.size();
  auto spec = fft(r);
  for (std::size_t q = 0; q < n; ++q) spec[q] *= Complex(tail_force_re_[q], tail_force_im_[q]);
  std::vector<Complex> back(n);
  detail::dft_backward(spec, back);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) out[j] += back[j].real() * inv;
}

std::vector<double> Lattice::force(std::span<const double> r) const {
  const std::size_t n = config_.n;
  if (r.size() != n) throw ArgumentError("force: array length does not match ring size");
  const double alpha = config_.alpha;
  const auto s = prefix_twice(r);
  std::vector<double> out(n, 0.0), f(n);
  for (std::size_t m = 1; m <= config_.cutoff; ++m) {
    const double md = static_cast<double>(m);
    const double coef = alpha * std::pow(md, -alpha - 1);
    const double inv = 1.0 / md;
    for (std::size_t j = 0; j < n; ++j) {
      const double g = s[j + m] - s[j];
      if (g <= -md) collision(g, static_cast<long>(m));
      f[j] = coef * one_minus_power(alpha + 1, g * inv);
    }
    // out_j += f_j - f_{j-m}
    for (std::size_t j = 0; j < n; ++j) out[j] += f[j] - f[(j + n - m) % n];
  }
  if (config_.tail_correction) add_tail_force(r, out);
  return out;
}

double Lattice::potential(std::span<const double> r) const {
  const std::size_t n = config_.n;
  if (r.size() != n) throw ArgumentError("potential: array length does not match ring size");
  const auto s = prefix_twice(r);
  detail::CompensatedSum acc;
  for (std::size_t m = 1; m <= config_.cutoff; ++m) {
    for (std::size_t j = 0; j < n; ++j) acc.add(v_m(s[j + m] - s[j], static_cast<long>(m), config_.alpha));
  }
  if (config_.tail_correction) {
    const auto spec = fft(r);
    double tail = 0.0;
    for (std::size_t q = 0; q < n; ++q) tail += tail_energy_[q] * std::norm(spec[q]);
    acc.add(0.5 * tail / static_cast<double>(n));
  }
  return acc.value();
}

double Lattice::energy(const LatticeState& state) const {
  return 0.5 * sum_squares(state.p) + potential(state.r);
}

void Lattice::kick(LatticeState& state, std::span<const double> f, double h) const {
  for (std::size_t j = 0; j < state.p.size(); ++j) state.p[j] += h * f[j];
}

void Lattice::drift(LatticeState& state, double h) const {
  const std::size_t n = state.r.size();
  for (std::size_t j = 0; j < n; ++j) state.r[j] += h * (state.p[(j + 1) % n] - state.p[j]);
}

void Lattice::step(LatticeState& state) const { advance(state, 1, false); }

void Lattice::advance(LatticeState& state, std::size_t steps, bool backward) const {
  if (state.r.size() != config_.n || state.p.size() != config_.n) {
    throw ArgumentError("lattice state does not match ring size");
  }
  const double h = backward ? -config_.dt : config_.dt;
  const double t0 = state.t;
  bool warned = false;
  try {
    auto f = force(state.r);
    for (std::size_t k = 0; k < steps; ++k) {
      kick(state, f, 0.5 * h);
      drift(state, h);
      f = force(state.r);
      kick(state, f, 0.5 * h);
      state.t = t0 + h * static_cast<double>(k + 1);

      const double rmax = std::abs(*std::max_element(state.r.begin(), state.r.end(),
          [](double a, double b) { return std::abs(a) < std::abs(b); }));
      if (!std::isfinite(rmax)) throw BlowUpError("lattice state became non-finite", state.t);
      if (!warned && rmax >= 1.0) {
        warn("lattice displacement reached |r| >= 1 at t = " + std::to_string(state.t));
        warned = true;
      }
    }
  } catch (const CollisionError& e) {
    if (e.time() != 0.0) throw;
    throw CollisionError(std::string(e.what()).substr(0, std::string(e.what()).rfind(" (t =")),
                         state.t);
  }
}

std::vector<double> force(std::span<const double> r, const LatticeConfig& config) {
  return Lattice(config).force(r);
}

LatticeState verlet_step(const LatticeState& state, const LatticeConfig& config) {
  LatticeState next = state;
  Lattice(config).step(next);
  return next;
}

double energy(const LatticeState& state, const LatticeConfig& config) {
  return Lattice(config).energy(state);
}

P2Value p2_functional(std::span<const double> eta, double alpha, std::size_t cutoff) {
  cmbo::detail::require_alpha_open(alpha, "p2_functional");
  const std::size_t n = eta.size();
  if (cutoff < 1 || cutoff > n) throw ArgumentError("p2_functional: cutoff must satisfy 1 <= M <= N");
  const auto s = prefix_twice(eta);
  detail::CompensatedSum acc;
  for (std::size_t m = 1; m <= cutoff; ++m) {
    const double w = std::pow(static_cast<double>(m), -alpha - 2);
    for (std::size_t j = 0; j < n; ++j) {
      const double g = s[j + m] - s[j];
      acc.add(w * g * g);
    }
  }
  const double tail = sum_squares(eta) *
                      specfun::zeta_tail(alpha, static_cast<std::int64_t>(cutoff), 1e-14);
  return {acc.value(), tail};
}

ErrorEnergy error_energy(std::span<const double> xi, std::span<const double> eta,
                         std::span<const double> rtilde, const LatticeConfig& config,
                         bool enforce_smallness) {
  validate(config);
  const std::size_t n = config.n;
  if (xi.size() != n || eta.size() != n || rtilde.size() != n) {
    throw ArgumentError("error_energy: array lengths must equal the ring size");
  }
  const double eta2 = sum_squares(eta);
  const double rt2 = sum_squares(rtilde);
  const bool small = std::sqrt(eta2) <= 0.25 && std::sqrt(rt2) <= 0.25;
  if (enforce_smallness && !small) {
    std::ostringstream msg;
    msg << "error_energy: smallness hypothesis violated (||eta|| = " << std::sqrt(eta2)
        << ", ||rtilde|| = " << std::sqrt(rt2) << ", both must be <= 1/4)";
    throw PreconditionError(msg.str());
  }
  const double alpha = config.alpha;
  const auto se = prefix_twice(eta);
  const auto sr = prefix_twice(rtilde);
  detail::CompensatedSum acc;
  for (std::size_t m = 1; m <= config.cutoff; ++m) {
    for (std::size_t j = 0; j < n; ++j) {
      acc.add(w_m(se[j + m] - se[j], sr[j + m] - sr[j], static_cast<long>(m), alpha));
    }
  }
  ErrorEnergy out{};
  out.kinetic = 0.5 * sum_squares(xi);
  out.potential = acc.value();
  out.value = out.kinetic + out.potential;
  const double za = specfun::zeta(alpha, 1e-13);
  const double za1 = specfun::zeta(alpha + 1, 1e-13);
  const double pre = std::pow(2.0, alpha + 1) * alpha * (alpha + 1);
  out.lower = pre * (2 * za1 - za) / std::pow(3.0, alpha + 2) * eta2;
  out.upper = pre * za * eta2;
  out.small = small;
  out.within_bounds = out.potential >= out.lower && out.potential <= out.upper;
  return out;
}

}  // namespace cmbo::lattice
