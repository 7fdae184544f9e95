#include "cmbo/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cmbo/error.hpp"
#include "numeric_detail.hpp"

namespace cmbo::specfun {

namespace {

using detail::CompensatedSum;

// B_{2k} / (2k)! for k = 1..5.
constexpr std::array<double, 5> kBernoulliOverFactorial = {
    1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0,
    1.0 / 47900160.0};

// Rising factorial s (s+1) ... (s+n-1).
double rising(double s, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= s + i;
  return r;
}

// Euler-Maclaurin estimate of sum_{m >= start} m^{-s}, keeping four
// Bernoulli corrections. Returns the magnitude of the first omitted one via
// `omitted`.
double em_tail_from(double s, double start, double* omitted) {
  double t = std::pow(start, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(start, -s);
  for (int k = 1; k <= 4; ++k) {
    t += kBernoulliOverFactorial[k - 1] * rising(s, 2 * k - 1) *
         std::pow(start, -s - 2.0 * k + 1.0);
  }
  if (omitted != nullptr) {
    *omitted = std::abs(kBernoulliOverFactorial[4] * rising(s, 9) *
                        std::pow(start, -s - 9.0));
  }
  return t;
}

// Smallest start point >= 10 at which the Euler-Maclaurin remainder is below tol.
double em_start(double s, double tol) {
  double start = 10.0;
  double omitted = 0.0;
  em_tail_from(s, start, &omitted);
  while (omitted > tol && start < 1e6) {
    start *= 2.0;
    em_tail_from(s, start, &omitted);
  }
  return start;
}

// (1 - s^2/12 - sinc^2(s/2)) / s^alpha, bounded on [0, 2].
double desingularized(double s, double alpha) {
  if (s == 0.0) return 0.0;
  const double x = 0.5 * s;
  double num;
  if (x < 0.5) {
    // 1 - sinc^2(x) - x^2/3 = sum_{k>=3} (-1)^k 2^{2k-1} x^{2k-2} / (2k)!
    const double x2 = x * x;
    double term = 32.0 / 720.0 * x2 * x2;  // k = 3 magnitude
    num = 0.0;
    for (int k = 3; k < 30; ++k) {
      num += (k % 2 == 0 ? term : -term);
      term *= 4.0 * x2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
      if (term < 1e-20 * std::abs(num)) break;
    }
  } else {
    num = one_minus_sinc2(x) - s * s / 12.0;
  }
  return num / std::pow(s, alpha);
}

double gk_integrate(const auto& f, double a, double b, double tol) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 12, 1e-13, &err);
  if (err > tol) {
    throw ConsistencyError("eta_integral: quadrature error estimate " +
                           std::to_string(err) + " exceeds tolerance");
  }
  return v;
}

}  // namespace

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double one_minus_sinc2(double x) {
  const double ax = std::abs(x);
  if (ax < 0.5) {
    // sum_{k>=2} (-1)^k 2^{2k-1} x^{2k-2} / (2k)!
    const double x2 = x * x;
    double term = x2 / 3.0;
    double sum = 0.0;
    for (int k = 2; k < 30; ++k) {
      sum += (k % 2 == 0 ? term : -term);
      term *= 4.0 * x2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
      if (term < 1e-20 * sum) break;
    }
    return sum;
  }
  const double s = std::sin(x) / x;
  return 1.0 - s * s;
}

double zeta(double s, double tol) {
  if (!(s > 1.0)) {
    throw DomainError("zeta: requires s > 1, got " + std::to_string(s));
  }
  detail::require_positive_tol(tol, "zeta");
  const double start = em_start(s, 0.5 * tol);
  CompensatedSum sum;
  // Add small terms first.
  for (auto m = static_cast<std::int64_t>(start) - 1; m >= 1; --m) {
    sum.add(std::pow(static_cast<double>(m), -s));
  }
  sum.add(em_tail_from(s, start, nullptr));
  return sum.value();
}

double zeta_tail(double s, std::int64_t k, double tol) {
  if (!(s > 1.0)) {
    throw DomainError("zeta_tail: requires s > 1");
  }
  detail::require_positive_tol(tol, "zeta_tail");
  if (k < 0) throw ArgumentError("zeta_tail: k must be nonnegative");
  const double first = static_cast<double>(k + 1);
  const double start = std::max(first, em_start(s, 0.5 * tol));
  CompensatedSum sum;
  for (auto m = static_cast<std::int64_t>(start) - 1; m >= k + 1; --m) {
    sum.add(std::pow(static_cast<double>(m), -s));
  }
  sum.add(em_tail_from(s, start, nullptr));
  return sum.value();
}

double eta_integral(double alpha, double tol) {
  detail::require_alpha_open(alpha, "eta_integral");
  detail::require_positive_tol(tol, "eta_integral");

  // [0, 2]: bounded desingularized integrand plus the closed form of s^{2-alpha}/12.
  const double near = gk_integrate([alpha](double s) { return desingularized(s, alpha); },
                                   0.0, 2.0, 0.25 * tol) +
                      std::pow(2.0, 3.0 - alpha) / (12.0 * (3.0 - alpha));

  // [2, inf): (1 - sinc^2(s/2)) / s^alpha = s^-alpha - 2 / s^(alpha+2) + 2 cos(s) / s^(alpha+2).
  const double p = alpha + 2.0;
  const double smooth =
      std::pow(2.0, 1.0 - alpha) / (alpha - 1.0) - std::pow(2.0, -alpha) / (alpha + 1.0);

  // Oscillatory part: period-by-period quadrature up to S, then a three-term
  // integration-by-parts tail with remainder 2 p (p+1) (p+2) S^{-p-3}.
  constexpr double two_pi = 2.0 * std::numbers::pi;
  int periods = 1;
  auto remainder = [p](double S) { return 2.0 * p * (p + 1.0) * (p + 2.0) * std::pow(S, -p - 3.0); };
  while (2.0 * remainder(2.0 + two_pi * periods) > 0.25 * tol && periods < 100000) {
    ++periods;
  }
  CompensatedSum osc;
  const double chunk_tol = 0.25 * tol / periods;
  for (int i = 0; i < periods; ++i) {
    const double a = 2.0 + two_pi * i;
    osc.add(gk_integrate([p](double s) { return 2.0 * std::cos(s) * std::pow(s, -p); }, a,
                         a + two_pi, chunk_tol));
  }
  const double S = 2.0 + two_pi * periods;
  const double tail = -std::sin(S) * std::pow(S, -p) + p * std::cos(S) * std::pow(S, -p - 1.0) +
                      p * (p + 1.0) * std::sin(S) * std::pow(S, -p - 2.0);
  osc.add(2.0 * tail);

  return near + smooth + osc.value();
}

double eta_riemann(double alpha, double h, double tol) {
  detail::require_alpha_open(alpha, "eta_riemann");
  if (!(h > 0.0)) throw ArgumentError("eta_riemann: h must be positive");
  detail::require_positive_tol(tol, "eta_riemann");

  // Beyond K the summand is (hm)^-alpha - 2 (hm)^-(alpha+2) + 2 cos(hm) (hm)^-(alpha+2).
  // The first two sum in closed form; the cosine sum is bounded by Abel summation
  // (a_{K+1} / |sin(h/2)|) or by its absolute series, whichever is smaller.
  const double scale = 2.0 * std::pow(h, -1.0 - alpha);
  const double budget = 0.25 * tol;
  const double sin_half = std::abs(std::sin(0.5 * h));
  double k_abel = std::numeric_limits<double>::infinity();
  if (sin_half > 0.0) {
    k_abel = std::pow(scale / (budget * sin_half), 1.0 / (alpha + 2.0));
  }
  const double k_abs = std::pow(scale / ((alpha + 1.0) * budget), 1.0 / (alpha + 1.0));
  const double k_real = std::clamp(std::min(k_abel, k_abs), 16.0, 4e8);
  const auto K = static_cast<std::int64_t>(std::ceil(k_real));

  CompensatedSum sum;
  for (std::int64_t m = K; m >= 1; --m) {
    const double s = h * static_cast<double>(m);
    sum.add(one_minus_sinc2(0.5 * s) / std::pow(s, alpha));
  }
  double total = h * sum.value();
  total += std::pow(h, 1.0 - alpha) * zeta_tail(alpha, K, 0.1 * tol);
  total -= scale * zeta_tail(alpha + 2.0, K, 0.1 * tol);
  return total;
}

double zeta_gap(double alpha, double tol) {
  if (!(alpha > 1.0)) throw DomainError("zeta_gap: requires alpha > 1");
  return 2.0 * zeta(alpha + 1.0, tol) - zeta(alpha, tol);
}

double find_alpha_star(double tol, double lo, double hi, double zeta_tol) {
  detail::require_positive_tol(tol, "find_alpha_star");
  if (!(lo > 1.0 && hi > lo)) throw ArgumentError("find_alpha_star: need 1 < lo < hi");
  double f_lo = zeta_gap(lo, zeta_tol);
  const double f_hi = zeta_gap(hi, zeta_tol);
  if (!(f_lo < 0.0 && f_hi > 0.0) && !(f_lo > 0.0 && f_hi < 0.0)) {
    throw ConsistencyError("find_alpha_star: zeta_gap has no sign change on the bracket");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = zeta_gap(mid, zeta_tol);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double gamma_exponent(double alpha) { return alpha <= 2.0 ? 2.0 * alpha - 2.5 : 1.5; }

double beta_exponent(double alpha) { return alpha <= 2.0 ? 3.0 * alpha - 2.5 : alpha + 1.5; }

AlphaParams make_alpha_params(double alpha, double tol) {
  detail::require_alpha_open(alpha, "make_alpha_params");
  detail::require_positive_tol(tol, "make_alpha_params");
  AlphaParams p;
  p.alpha = alpha;
  p.zeta_a = zeta(alpha, 0.01 * tol);
  p.zeta_a1 = zeta(alpha + 1.0, 0.01 * tol);
  const double a1 = alpha * (alpha + 1.0);
  p.c = std::sqrt(a1 * p.zeta_a);
  p.kappa1 = 2.0 * p.c;
  p.kappa2 = a1 * (alpha + 2.0) * p.zeta_a;
  p.eta = eta_integral(alpha, tol);
  p.kappa3 = a1 * p.eta;
  p.gamma = gamma_exponent(alpha);
  p.beta = beta_exponent(alpha);
  return p;
}

}  // namespace cmbo::specfun
