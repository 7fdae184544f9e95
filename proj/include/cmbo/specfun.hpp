#pragma once

// Scalar constants of the long-wave limit: zeta values, the sinc-squared
// integral eta_alpha and its right-endpoint Riemann sums, the wave speed and
// Benjamin-Ono coefficients, and the scaling exponents of the error bounds.

#include <cstdint>

namespace cmbo::specfun {

inline constexpr double kDefaultTol = 1e-10;

/// sin(x)/x with sinc(0) = 1.
double sinc(double x);

/// 1 - sinc(x)^2, accurate near x = 0.
double one_minus_sinc2(double x);

/// Riemann zeta function for real s > 1, absolute error below tol.
///
/// Partial sum plus an Euler-Maclaurin tail whose first neglected term is
/// below tol; the number of explicit terms stays small (tens) even for s
/// close to 1.
double zeta(double s, double tol = kDefaultTol);

/// Tail sum_{m > k} m^{-s} for s > 1 and k >= 0.
double zeta_tail(double s, std::int64_t k, double tol = kDefaultTol);

/// eta_alpha = int_0^inf (1 - sinc^2(s/2)) / s^alpha ds for alpha in (1, 3).
double eta_integral(double alpha, double tol = kDefaultTol);

/// eta_alpha(h) = h sum_{m>=1} (1 - sinc^2(hm/2)) / (hm)^alpha, the
/// right-endpoint rectangle rule for eta_alpha with step h > 0.
double eta_riemann(double alpha, double h, double tol = kDefaultTol);

/// 2 zeta(alpha + 1) - zeta(alpha); positive exactly when the
/// quadratic-form norm equivalence of the lattice energy holds.
double zeta_gap(double alpha, double tol = 1e-13);

/// Root of zeta_gap by bisection on [lo, hi]. Throws ConsistencyError when
/// the bracket does not straddle a sign change.
double find_alpha_star(double tol, double lo = 1.3, double hi = 1.6,
                       double zeta_tol = 1e-13);

/// Error exponent: 2 alpha - 5/2 on (1, 2], 3/2 on (2, 3).
double gamma_exponent(double alpha);

/// Residual exponent: 3 alpha - 5/2 on (1, 2], alpha + 3/2 on (2, 3).
double beta_exponent(double alpha);

/// Every alpha-derived scalar of the lattice/Benjamin-Ono pairing.
struct AlphaParams {
  double alpha = 0.0;
  double zeta_a = 0.0;   ///< zeta(alpha)
  double zeta_a1 = 0.0;  ///< zeta(alpha + 1)
  double c = 0.0;        ///< long-wave speed, c^2 = alpha (alpha+1) zeta(alpha)
  double kappa1 = 0.0;   ///< 2 c
  double kappa2 = 0.0;   ///< alpha (alpha+1) (alpha+2) zeta(alpha)
  double kappa3 = 0.0;   ///< alpha (alpha+1) eta
  double eta = 0.0;      ///< eta_integral(alpha)
  double gamma = 0.0;    ///< error exponent
  double beta = 0.0;     ///< residual exponent
};

AlphaParams make_alpha_params(double alpha, double tol = kDefaultTol);

}  // namespace cmbo::specfun
