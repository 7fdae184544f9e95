#pragma once

// Power-law particle ring in relative coordinates r_j = x_{j+1} - x_j - 1,
// p_j = dx_j/dt:
//     dr_j/dt = p_{j+1} - p_j,
//     dp_j/dt = sum_{m=1}^{M} [V_m'(G_m r)_j - V_m'(G_m r)_{j-m}],
// with G_m r_j = r_j + ... + r_{j+m-1} (indices mod N) and
//     V_m(g) = (m+g)^-alpha - m^-alpha + alpha g m^-(alpha+1).
// Interactions beyond the cutoff can optionally be kept in linearized form.

#include <cstddef>
#include <span>
#include <vector>

namespace cmbo::lattice {

struct LatticeState {
  std::vector<double> r;
  std::vector<double> p;
  double t = 0.0;
};

struct LatticeConfig {
  std::size_t n = 0;
  double alpha = 2.0;
  std::size_t cutoff = 1;
  double dt = 0.05;
  /// Add the harmonic part of every interaction with m > cutoff (evaluated
  /// exactly on the ring by FFT) to the force and the energy.
  bool tail_correction = false;
};

/// Throws ArgumentError/DomainError unless n >= 16, 1 <= cutoff <= n/2 - 1,
/// dt > 0 and alpha in (1, 3).
void validate(const LatticeConfig& config);

/// Windowed periodic sum: G_m r_j = sum_{l<m} r_{j+l} for m > 0 and
/// G_{-m} r_j = G_m r_{j-m}. Requires 1 <= |m| <= N.
std::vector<double> gsum(std::span<const double> r, long m);

/// V_m(g), V_m'(g). Throw CollisionError when g <= -m.
double v_m(double g, long m, double alpha);
double v_m_prime(double g, long m, double alpha);

/// W_m(a,b) = V_m(b+a) - V_m(b) - V_m'(b) a and its partial derivatives.
/// Throw CollisionError unless b > -m and b + a > -m.
double w_m(double a, double b, long m, double alpha);
double w_m_prime(double a, double b, long m, double alpha);
double w_m_db(double a, double b, long m, double alpha);

/// Precomputed evaluator for one ring configuration.
class Lattice {
 public:
  explicit Lattice(LatticeConfig config);

  const LatticeConfig& config() const { return config_; }

  std::vector<double> force(std::span<const double> r) const;
  double energy(const LatticeState& state) const;
  /// Potential part only (sum of V_m plus the harmonic tail when enabled).
  double potential(std::span<const double> r) const;

  /// Half kick, drift, half kick. Throws CollisionError / BlowUpError with
  /// the lattice time of failure.
  void step(LatticeState& state) const;
  /// `steps` steps of size config.dt, or of size -config.dt when backward.
  void advance(LatticeState& state, std::size_t steps, bool backward = false) const;

 private:
  void kick(LatticeState& state, std::span<const double> f, double h) const;
  void drift(LatticeState& state, double h) const;
  void add_tail_force(std::span<const double> r, std::span<double> out) const;

  LatticeConfig config_;
  std::vector<double> tail_force_re_, tail_force_im_;  // multiplier per ring mode
  std::vector<double> tail_energy_;                    // quadratic form per ring mode
};

std::vector<double> force(std::span<const double> r, const LatticeConfig& config);
LatticeState verlet_step(const LatticeState& state, const LatticeConfig& config);
double energy(const LatticeState& state, const LatticeConfig& config);

struct P2Value {
  double value;       ///< sum_j sum_{m<=M} m^-(alpha+2) (G_m eta)_j^2
  double tail_bound;  ///< ||eta||^2 sum_{m>M} m^-alpha
};
P2Value p2_functional(std::span<const double> eta, double alpha, std::size_t cutoff);

struct ErrorEnergy {
  double value;      ///< H = kinetic + potential
  double kinetic;    ///< ||xi||^2 / 2
  double potential;  ///< sum_j sum_{m<=M} W_m(G_m eta, G_m rtilde)_j
  double lower;      ///< 2^{a+1} a(a+1)(2 zeta_{a+1} - zeta_a) / 3^{a+2} * ||eta||^2
  double upper;      ///< 2^{a+1} a(a+1) zeta_a * ||eta||^2
  bool small;        ///< ||eta||, ||rtilde|| <= 1/4
  bool within_bounds;
};

/// Error energy with the equivalence bounds that hold under the smallness
/// hypothesis. With enforce_smallness the call throws PreconditionError when
/// ||eta|| or ||rtilde|| exceeds 1/4; otherwise it only reports it.
ErrorEnergy error_energy(std::span<const double> xi, std::span<const double> eta,
                         std::span<const double> rtilde, const LatticeConfig& config,
                         bool enforce_smallness = true);

}  // namespace cmbo::lattice
