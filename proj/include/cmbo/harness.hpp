#pragma once

// Long-wave validation experiments: lattice data built from a Benjamin-Ono
// profile, residual of the ansatz, matched lattice/BO evolutions, error
// energy diagnostics and log-log scaling fits.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cmbo/bo_solver.hpp"
#include "cmbo/lattice.hpp"
#include "cmbo/specfun.hpp"
#include "cmbo/spectral.hpp"

namespace cmbo::harness {

enum class CutoffPolicy {
  HalfRing,  ///< M = N/2 - 1
  ZetaTail,  ///< smallest M with ||r|| M^{1-a}/(a-1) < 0.05 eps^{beta-a}, capped at N/2 - 1
  Fixed,     ///< ValidationConfig::cutoff, capped at N/2 - 1
};

struct ProfileConfig {
  double amplitude = 1.0;
  double width = 0.0;  ///< 0 selects period / 20
  double period = 102.4;
};

struct ValidationConfig {
  std::vector<double> alphas{2.0};
  std::vector<double> epsilons{0.2, 0.141, 0.1, 0.0707};
  double tau0 = 0.25;
  // Benjamin-Ono discretization
  std::size_t bo_n = 1024;
  double bo_dtau = 1e-3;
  double dealias_fraction = 2.0 / 3.0;
  // lattice discretization
  double lattice_dt = 0.05;
  CutoffPolicy cutoff_policy = CutoffPolicy::HalfRing;
  std::size_t cutoff = 0;
  bool tail_correction = true;
  ProfileConfig profile;
  std::size_t checkpoints = 20;
  bool bidirectional = false;
  std::string output = "cmbo-out";
};

/// Throws ConfigError on inconsistent fields (unsorted/out-of-range epsilons,
/// alpha outside (1,3), nonpositive steps, ...).
void validate(const ValidationConfig& config);

/// JSON round trip; every field is optional on input.
ValidationConfig config_from_json(const std::string& text);
std::string config_to_json(const ValidationConfig& config, int indent = 2);
/// 64-bit FNV-1a of the compact canonical JSON, as 16 hex digits.
std::string config_hash(const ValidationConfig& config);

/// Resolved per-epsilon schedule.
struct RunPlan {
  double alpha;
  double epsilon_requested;
  double epsilon;  ///< period / sites, so that sites * epsilon == period
  std::size_t sites;
  std::size_t cutoff;
  double dt;                   ///< lattice step, <= config.lattice_dt
  std::size_t steps;           ///< total steps to t_end
  std::size_t steps_per_checkpoint;
  double t_end;                ///< tau0 / epsilon^alpha
};

std::vector<RunPlan> make_plan(const ValidationConfig& config);

/// a exp(-(X - P/2)^2 / w^2) minus its mean on a bo_n-point grid.
spectral::SpectralField initial_profile(const ValidationConfig& config);

/// r_j = -eps^{a-1} u0(eps j), p_j = c eps^{a-1} u0(eps j), t = 0.
/// Throws ConfigError unless period / eps is an integer.
lattice::LatticeState build_ansatz(const spectral::SpectralField& u0, double eps,
                                   const specfun::AlphaParams& params);

struct ResidualSample {
  double epsilon = 0.0;
  double t = 0.0;
  double l2_norm = 0.0;
  std::vector<double> values;  ///< per-site residual (empty unless requested)
};

/// Residual of x_j = j + eps^{a-2} v(eps(j - c t), tau) in the lattice
/// equations, with v = -int_0^X u, tau = state.tau and t the lattice time.
/// The time derivatives come from the equation (dtau_u, dtau2_v). The spatially
/// uniform part (a rigid acceleration of the whole ring) is removed.
ResidualSample residual_eval(const bo::BOState& state, double eps, double t,
                             const specfun::AlphaParams& params, const lattice::Lattice& lattice,
                             double dealias_fraction = 2.0 / 3.0, bool keep_values = false);
ResidualSample residual_eval(const bo::BOState& state, double eps, double t,
                             const specfun::AlphaParams& params, std::size_t cutoff,
                             bool tail_correction = true);

/// Ansatz lattice fields at lattice time t:
///   r~_j = eps^{a-2} (v(X_{j+1}) - v(X_j)),  p~_j = c eps^{a-1} u(X_j) + eps^{2a-2} v_tau(X_j),
/// X_j = eps (j - c t), and the leading-order comparison field u(X_j).
struct AnsatzFields {
  std::vector<double> rtilde;
  std::vector<double> ptilde;
  std::vector<double> u_shifted;
  std::vector<double> u_unshifted;
};
AnsatzFields ansatz_fields(const bo::BOState& state, double eps, double t,
                           const specfun::AlphaParams& params, std::size_t sites,
                           double dealias_fraction = 2.0 / 3.0);

struct ErrorEnergySample {
  double t = 0.0;
  double energy = 0.0;       ///< H
  double sqrt_energy = 0.0;
  double eta_l2 = 0.0;       ///< ||r - r~||
  double xi_l2 = 0.0;        ///< ||p - p~||
  double lower_ratio = 0.0;  ///< lower equivalence constant for sqrt(H) / ||(eta, xi)||
  double upper_ratio = 0.0;
  bool small = true;         ///< smallness hypothesis held
  bool within_bounds = true;
};

/// H(xi, eta, r~) for a lattice state against the ansatz at the same time.
ErrorEnergySample error_energy_sample(const lattice::LatticeState& state,
                                      const AnsatzFields& ansatz,
                                      const lattice::LatticeConfig& config);

struct CheckpointError {
  double t = 0.0;
  double tau = 0.0;
  double mu_l2 = 0.0;
  double nu_l2 = 0.0;
  double mu_unshifted_l2 = 0.0;
  double nu_unshifted_l2 = 0.0;
  ErrorEnergySample energy;
};

struct EpsilonRun {
  RunPlan plan;
  std::vector<CheckpointError> checkpoints;
  std::vector<bo::MonitorSample> bo_trace;
  bool failed = false;
  std::string failure;
  double failure_time = 0.0;
  double sup_mu() const;
  double sup_nu() const;
};

struct ScalingReport {
  std::vector<std::pair<double, double>> pairs;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double target_exponent = 0.0;
};

/// OLS of log(value) on log(eps). Requires >= 3 pairs with positive entries.
ScalingReport fit_slope(const std::vector<std::pair<double, double>>& pairs);

struct AlphaValidation {
  double alpha = 0.0;
  std::vector<EpsilonRun> runs;
  std::optional<ScalingReport> mu;
  std::optional<ScalingReport> nu;
};

/// Matched lattice and BO evolutions for every (alpha, epsilon) of the plan,
/// on up to `jobs` worker threads. Failed runs are marked, not thrown.
std::vector<AlphaValidation> run_validation(const ValidationConfig& config, unsigned jobs = 1);

struct AlphaResidual {
  double alpha = 0.0;
  std::vector<RunPlan> plans;
  std::vector<std::vector<ResidualSample>> samples;  ///< per epsilon, per checkpoint
  std::optional<ScalingReport> report;               ///< sup_t ||R|| against eps
};

/// Residual sup norms over the checkpoint times, for every (alpha, epsilon).
std::vector<AlphaResidual> run_residual_sweep(const ValidationConfig& config, unsigned jobs = 1);

// Output files. CSV numerics are printed with 17 significant digits.
void write_residual_csv(const std::vector<AlphaResidual>& sweep, const std::filesystem::path& path);
void write_validation_csv(const std::vector<AlphaValidation>& runs, const std::filesystem::path& path);
void write_energy_csv(const std::vector<AlphaValidation>& runs, const std::filesystem::path& path);
/// Whitespace-separated mirror of a CSV file with a '#' header line.
void write_dat_mirror(const std::filesystem::path& csv, const std::filesystem::path& dat);
std::string report_json(const std::vector<AlphaResidual>* sweep,
                        const std::vector<AlphaValidation>* runs);
void write_manifest(const ValidationConfig& config, const std::filesystem::path& dir,
                    const std::vector<std::filesystem::path>& outputs, const std::string& command);
/// Same for commands without a ValidationConfig; the hash covers the given JSON object.
void write_manifest(const std::string& parameters_json, const std::filesystem::path& dir,
                    const std::vector<std::filesystem::path>& outputs, const std::string& command);

std::string plan_json(const ValidationConfig& config);

}  // namespace cmbo::harness
