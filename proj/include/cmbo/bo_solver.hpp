#pragma once

// Pseudo-spectral solver for
//     kappa1 u_tau + kappa2 u u_X + kappa3 H |D|^alpha u = 0
// on a periodic grid: integrating-factor RK4 with the dispersive term treated
// exactly and the quadratic term dealiased by spectral truncation.

#include <vector>

#include "cmbo/specfun.hpp"
#include "cmbo/spectral.hpp"

namespace cmbo::bo {

struct BOState {
  spectral::SpectralField u;
  double tau = 0.0;
};

struct BOConfig {
  specfun::AlphaParams params;
  double dtau = 1e-3;
  /// Modes with |q| >= fraction * n/2 are removed before forming products.
  double dealias_fraction = 2.0 / 3.0;
  /// Extra times at which run_to records a monitor sample.
  std::vector<double> checkpoints;
};

struct MonitorSample {
  double tau;
  double mean;
  double l2;
  double h6;
};

struct BORun {
  BOState state;
  std::vector<MonitorSample> trace;
};

/// Throws ArgumentError unless dtau > 0 and dealias_fraction in (0.5, 1].
void validate(const BOConfig& config);

/// -(kappa2/kappa1) u u_X - (kappa3/kappa1) H|D|^alpha u.
spectral::SpectralField bo_rhs(const BOState& state, const specfun::AlphaParams& params,
                               double dealias_fraction = 2.0 / 3.0);

/// One step of size config.dtau (a negative dtau is not accepted here; use
/// run_to for backward integration). Throws BlowUpError on non-finite output.
BOState step(const BOState& state, const BOConfig& config);

/// Integrates to tau_end (either direction) with steps no longer than
/// config.dtau, landing exactly on tau_end and on every checkpoint in range.
/// The trace holds the start, each checkpoint and the end.
BORun run_to(const BOState& state, double tau_end, const BOConfig& config);

/// u_tau from the equation itself.
spectral::SpectralField dtau_u(const BOState& state, const specfun::AlphaParams& params,
                               double dealias_fraction = 2.0 / 3.0);

/// v_tau_tau for v = -int_0^X u, obtained from u_tau_tau = -(kappa2/kappa1)
/// d_X(u u_tau) - (kappa3/kappa1) H|D|^alpha u_tau and normalized by v(0) = 0.
/// Requires mean(u) = 0.
spectral::SpectralField dtau2_v(const BOState& state, const specfun::AlphaParams& params,
                                double dealias_fraction = 2.0 / 3.0);

/// v_tau = antiderivative of u_tau, normalized by v(0) = 0.
spectral::SpectralField dtau_v(const BOState& state, const specfun::AlphaParams& params,
                               double dealias_fraction = 2.0 / 3.0);

MonitorSample monitor(const BOState& state);

}  // namespace cmbo::bo
