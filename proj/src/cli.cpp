#include "cmbo/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cmbo/bo_solver.hpp"
#include "cmbo/error.hpp"
#include "cmbo/harness.hpp"
#include "cmbo/lattice.hpp"
#include "cmbo/log.hpp"
#include "cmbo/specfun.hpp"
#include "cmbo/spectral.hpp"

namespace cmbo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  unsigned jobs = 1;
  std::string out;
  long long seed = 0;
  bool dry_run = false;
  bool bidirectional = false;
};

// Reported by the numerical subcommands when an evolution fails.
struct BlowUp {
  double alpha;
  double epsilon;  // NaN when not applicable
  double t;
  std::string what;
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string command_line(int argc, const char* const* argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_constants(double alpha, double tol) {
  const auto p = specfun::make_alpha_params(alpha, tol);
  const json j{{"alpha", p.alpha},   {"zeta_alpha", p.zeta_a}, {"zeta_alpha_plus_1", p.zeta_a1},
               {"c", p.c},           {"kappa1", p.kappa1},    {"kappa2", p.kappa2},
               {"kappa3", p.kappa3}, {"eta", p.eta},          {"gamma", p.gamma},
               {"beta", p.beta},     {"zeta_gap", specfun::zeta_gap(alpha)}};
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int cmd_alpha_star(double tol) {
  const double a = specfun::find_alpha_star(tol);
  std::cout << std::setprecision(15) << a << '\n';
  return kOk;
}

int cmd_eta_rates(double alpha, const std::vector<double>& hs, double tol) {
  const double eta = specfun::eta_integral(alpha, tol);
  std::cout << "h,eta_h,abs_err\n";
  for (double h : hs) {
    const double eh = specfun::eta_riemann(alpha, h, tol);
    std::cout << fmt(h) << ',' << fmt(eh) << ',' << fmt(std::abs(eh - eta)) << '\n';
  }
  return kOk;
}

struct SolveBoArgs {
  double alpha = 2.0;
  std::size_t n = 1024;
  double period = 102.4;
  double dtau = 1e-3;
  double tau_end = 0.25;
  double amplitude = 1.0;
  double width = 0.0;
  double dealias = 2.0 / 3.0;
  std::size_t checkpoints = 10;
  std::string init;
  std::string trace = "trace.csv";
};

int cmd_solve_bo(const SolveBoArgs& a, const Globals& g, const std::string& cmdline,
                 std::optional<BlowUp>& blowup) {
  fs::path trace_path = a.trace;
  if (!g.out.empty() && trace_path.is_relative()) trace_path = fs::path(g.out) / trace_path;
  const fs::path dir = trace_path.has_parent_path() ? trace_path.parent_path() : fs::path(".");

  json params{{"alpha", a.alpha},     {"n", a.n},
              {"period", a.period},   {"dtau", a.dtau},
              {"tau_end", a.tau_end}, {"amplitude", a.amplitude},
              {"width", a.width},     {"dealias_fraction", a.dealias},
              {"checkpoints", a.checkpoints}, {"init", a.init}};
  if (g.dry_run) {
    std::cout << json{{"solve_bo", params}, {"trace", trace_path.string()}}.dump(2) << '\n';
    return kOk;
  }
  if (a.checkpoints == 0) throw ArgumentError("--checkpoints must be positive");

  bo::BOConfig cfg;
  cfg.params = specfun::make_alpha_params(a.alpha);
  cfg.dtau = a.dtau;
  cfg.dealias_fraction = a.dealias;
  bo::validate(cfg);

  spectral::SpectralField u0 = [&] {
    if (!a.init.empty()) return spectral::read_csv(a.init);
    harness::ValidationConfig vc;
    vc.bo_n = a.n;
    vc.profile = {a.amplitude, a.width, a.period};
    return harness::initial_profile(vc);
  }();

  bo::BOState state{u0, 0.0};
  std::vector<bo::MonitorSample> trace{bo::monitor(state)};
  std::vector<fs::path> outputs{trace_path};
  const std::string stem = trace_path.stem().string();
  try {
    for (std::size_t k = 1; k <= a.checkpoints; ++k) {
      const double tau = a.tau_end * static_cast<double>(k) / static_cast<double>(a.checkpoints);
      auto run = bo::run_to(state, tau, cfg);
      state = std::move(run.state);
      trace.push_back(run.trace.back());
      char name[64];
      std::snprintf(name, sizeof name, "%s_u%03zu.bin", stem.c_str(), k);
      spectral::write_binary(state.u, dir / name);
      outputs.push_back(dir / name);
    }
  } catch (const BlowUpError& e) {
    blowup = BlowUp{a.alpha, std::nan(""), e.time(), e.what()};
  }

  auto os = open_out(trace_path);
  os << "tau,mean,l2,h6\n";
  for (const auto& s : trace) os << fmt(s.tau) << ',' << fmt(s.mean) << ',' << fmt(s.l2) << ',' << fmt(s.h6) << '\n';
  os.close();
  const fs::path final_csv = dir / (stem + "_final.csv");
  spectral::write_csv(state.u, final_csv);
  outputs.push_back(final_csv);
  harness::write_manifest(params.dump(), dir, outputs, cmdline);
  return blowup ? kBlowUp : kOk;
}

struct LatticeArgs {
  double alpha = 2.0;
  std::size_t n = 0;
  std::size_t cutoff = 0;
  double dt = 0.05;
  std::size_t steps = 1000;
  std::size_t every = 0;
  bool tail = false;
  double eps = 0.0;
  std::string init;
  std::string traj = "traj.csv";
};

// "j,r,p" rows, or an "X,value" Benjamin-Ono profile turned into ansatz data at spacing eps.
lattice::LatticeState load_lattice_init(const LatticeArgs& a) {
  std::ifstream in(a.init);
  if (!in) throw ConfigError("cannot read " + a.init);
  std::string header;
  std::getline(in, header);
  if (header.rfind("X,value", 0) == 0) {
    if (!(a.eps > 0.0)) throw ConfigError("--eps is required with an X,value profile");
    in.close();
    const auto raw = spectral::read_csv(a.init);
    std::vector<double> values(raw.values().begin(), raw.values().end());
    for (double& v : values) v -= raw.mean();
    const auto u = spectral::SpectralField::from_values(raw.grid(), std::move(values));
    return harness::build_ansatz(u, a.eps, specfun::make_alpha_params(a.alpha));
  }
  if (header.rfind("j,r,p", 0) != 0) throw ConfigError(a.init + ": expected header j,r,p or X,value");
  lattice::LatticeState s;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string j, r, p;
    if (!std::getline(row, j, ',') || !std::getline(row, r, ',') || !std::getline(row, p, ','))
      throw ConfigError(a.init + ": malformed row " + line);
    if (std::stoull(j) != s.r.size()) throw ConfigError(a.init + ": site indices must be 0, 1, 2, ...");
    s.r.push_back(std::stod(r));
    s.p.push_back(std::stod(p));
  }
  return s;
}

int cmd_simulate_lattice(const LatticeArgs& a, const Globals& g, const std::string& cmdline,
                         std::optional<BlowUp>& blowup) {
  fs::path traj_path = a.traj;
  if (!g.out.empty() && traj_path.is_relative()) traj_path = fs::path(g.out) / traj_path;
  const fs::path dir = traj_path.has_parent_path() ? traj_path.parent_path() : fs::path(".");
  if (a.init.empty()) throw ConfigError("--init is required");

  auto state = load_lattice_init(a);
  if (a.n != 0 && a.n != state.r.size())
    throw ConfigError("--n " + std::to_string(a.n) + " does not match the " + std::to_string(state.r.size()) +
                      " sites of " + a.init);
  lattice::LatticeConfig cfg{.n = state.r.size(),
                             .alpha = a.alpha,
                             .cutoff = a.cutoff ? a.cutoff : state.r.size() / 2 - 1,
                             .dt = a.dt,
                             .tail_correction = a.tail};
  lattice::validate(cfg);
  const std::size_t every = a.every ? a.every : std::max<std::size_t>(1, a.steps / 10);

  json params{{"alpha", a.alpha}, {"n", cfg.n},         {"cutoff", cfg.cutoff},
              {"dt", a.dt},       {"steps", a.steps},   {"every", every},
              {"tail_correction", a.tail}, {"eps", a.eps}, {"init", a.init}};
  if (g.dry_run) {
    std::cout << json{{"simulate_lattice", params}, {"trajectory", traj_path.string()}}.dump(2) << '\n';
    return kOk;
  }

  const lattice::Lattice lat(cfg);
  auto os = open_out(traj_path);
  os << "t,j,r,p\n";
  auto dump = [&](const lattice::LatticeState& s) {
    for (std::size_t j = 0; j < s.r.size(); ++j)
      os << fmt(s.t) << ',' << j << ',' << fmt(s.r[j]) << ',' << fmt(s.p[j]) << '\n';
  };
  dump(state);
  const double e0 = lat.energy(state);
  std::size_t done = 0;
  try {
    while (done < a.steps) {
      const std::size_t chunk = std::min(every, a.steps - done);
      lat.advance(state, chunk);
      done += chunk;
      dump(state);
    }
  } catch (const BlowUpError& e) {
    const double eps = a.eps > 0.0 ? a.eps : std::nan("");
    blowup = BlowUp{a.alpha, eps, e.time(), e.what()};
  }
  os.close();
  if (!blowup) {
    const double e1 = lat.energy(state);
    std::cout << json{{"steps", done}, {"t", state.t}, {"energy_initial", e0}, {"energy_final", e1}}.dump() << '\n';
  }
  harness::write_manifest(params.dump(), dir, {traj_path}, cmdline);
  return blowup ? kBlowUp : kOk;
}

struct ExperimentArgs {
  std::string config;
  std::vector<double> alphas;
  double tau0 = 0.0;
  double amplitude = 0.0;
  std::size_t checkpoints = 0;
};

harness::ValidationConfig load_config(const ExperimentArgs& a, const Globals& g) {
  harness::ValidationConfig c;
  if (!a.config.empty()) c = harness::config_from_json(read_file(a.config));
  if (!a.alphas.empty()) c.alphas = a.alphas;
  if (a.tau0 > 0.0) c.tau0 = a.tau0;
  if (a.amplitude != 0.0) c.profile.amplitude = a.amplitude;
  if (a.checkpoints > 0) c.checkpoints = a.checkpoints;
  if (!g.out.empty()) c.output = g.out;
  if (g.bidirectional) c.bidirectional = true;
  harness::validate(c);
  return c;
}

int cmd_residual_sweep(const ExperimentArgs& a, const Globals& g, const std::string& cmdline,
                       std::optional<BlowUp>& blowup) {
  const auto c = load_config(a, g);
  if (g.dry_run) {
    std::cout << harness::plan_json(c) << '\n';
    return kOk;
  }
  std::vector<harness::AlphaResidual> sweep;
  try {
    sweep = harness::run_residual_sweep(c, g.jobs);
  } catch (const BlowUpError& e) {
    blowup = BlowUp{c.alphas.front(), std::nan(""), e.time(), e.what()};
    return kBlowUp;
  }
  const fs::path dir = c.output;
  fs::create_directories(dir);
  harness::write_residual_csv(sweep, dir / "residual_sweep.csv");
  harness::write_dat_mirror(dir / "residual_sweep.csv", dir / "residual_sweep.dat");
  open_out(dir / "report.json") << harness::report_json(&sweep, nullptr) << '\n';
  harness::write_manifest(c, dir, {dir / "residual_sweep.csv", dir / "residual_sweep.dat", dir / "report.json"},
                          cmdline);
  for (const auto& s : sweep) {
    if (s.report)
      std::cout << "alpha " << s.alpha << ": residual slope " << std::setprecision(4) << s.report->slope
                << " (beta " << s.report->target_exponent << ")\n";
  }
  return kOk;
}

int cmd_validate(const ExperimentArgs& a, const Globals& g, const std::string& cmdline,
                 std::optional<BlowUp>& blowup) {
  const auto c = load_config(a, g);
  if (g.dry_run) {
    std::cout << harness::plan_json(c) << '\n';
    return kOk;
  }
  const auto runs = harness::run_validation(c, g.jobs);
  const fs::path dir = c.output;
  fs::create_directories(dir);
  harness::write_validation_csv(runs, dir / "validation.csv");
  harness::write_dat_mirror(dir / "validation.csv", dir / "validation.dat");
  harness::write_energy_csv(runs, dir / "energy.csv");
  harness::write_dat_mirror(dir / "energy.csv", dir / "energy.dat");
  open_out(dir / "report.json") << harness::report_json(nullptr, &runs) << '\n';
  harness::write_manifest(c, dir,
                          {dir / "validation.csv", dir / "validation.dat", dir / "energy.csv", dir / "energy.dat",
                           dir / "report.json"},
                          cmdline);
  for (const auto& av : runs) {
    for (const auto& r : av.runs) {
      if (r.failed && !blowup) blowup = BlowUp{av.alpha, r.plan.epsilon, r.failure_time, r.failure};
    }
    if (av.mu && av.nu)
      std::cout << "alpha " << av.alpha << ": mu slope " << std::setprecision(4) << av.mu->slope << ", nu slope "
                << av.nu->slope << " (gamma " << av.mu->target_exponent << ")\n";
  }
  return blowup ? kBlowUp : kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Calogero-Moser lattice and Benjamin-Ono long-wave toolkit", "cmbo"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(CMBO_VERSION));

  Globals g;
  app.add_option("--jobs", g.jobs, "worker threads for independent runs")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "reserved; every pipeline is deterministic");
  app.add_flag("--dry-run", g.dry_run, "print the resolved plan without computing");
  app.add_flag("--bidirectional", g.bidirectional, "also integrate to negative time");

  double alpha = 2.0, tol = specfun::kDefaultTol;
  auto* constants = app.add_subcommand("constants", "print every alpha-dependent constant as JSON");
  constants->add_option("--alpha", alpha)->required();
  constants->add_option("--tol", tol)->capture_default_str();

  double star_tol = 1e-12;
  auto* star = app.add_subcommand("alpha-star", "root of 2 zeta(alpha+1) - zeta(alpha)");
  star->add_option("--tol", star_tol)->capture_default_str();

  std::vector<double> hs{0.4, 0.2, 0.1, 0.05, 0.025};
  auto* rates = app.add_subcommand("eta-rates", "Riemann-sum errors |eta(h) - eta| as CSV");
  rates->add_option("--alpha", alpha)->required();
  rates->add_option("--h-list", hs)->capture_default_str();
  rates->add_option("--tol", tol)->capture_default_str();

  SolveBoArgs bo;
  auto* solve = app.add_subcommand("solve-bo", "integrate the Benjamin-Ono equation");
  solve->add_option("--alpha", bo.alpha)->capture_default_str();
  solve->add_option("--n", bo.n)->capture_default_str();
  solve->add_option("--period", bo.period)->capture_default_str();
  solve->add_option("--dtau", bo.dtau)->capture_default_str();
  solve->add_option("--tau-end", bo.tau_end)->capture_default_str();
  solve->add_option("--amplitude", bo.amplitude)->capture_default_str();
  solve->add_option("--width", bo.width, "Gaussian width; 0 means period/20")->capture_default_str();
  solve->add_option("--dealias", bo.dealias)->capture_default_str();
  solve->add_option("--checkpoints", bo.checkpoints, "field dumps along the run")->capture_default_str();
  solve->add_option("--init", bo.init, "initial profile as X,value CSV");
  solve->add_option("--out,--trace", bo.trace, "monitor trace CSV; a global --out before the subcommand is a directory")->capture_default_str();

  LatticeArgs lat;
  auto* sim = app.add_subcommand("simulate-lattice", "integrate the lattice with Stormer-Verlet");
  sim->add_option("--alpha", lat.alpha)->capture_default_str();
  sim->add_option("--n", lat.n, "number of sites (checked against --init)");
  sim->add_option("--cutoff", lat.cutoff, "interaction range M; 0 means n/2 - 1");
  sim->add_option("--dt", lat.dt)->capture_default_str();
  sim->add_option("--steps", lat.steps)->capture_default_str();
  sim->add_option("--every", lat.every, "steps between trajectory rows; 0 means steps/10");
  sim->add_flag("--tail-correction", lat.tail, "add the harmonic part of interactions beyond the cutoff");
  sim->add_option("--eps", lat.eps, "lattice spacing in X when --init is an X,value profile");
  sim->add_option("--init", lat.init, "j,r,p CSV or X,value profile")->required();
  sim->add_option("--out,--traj", lat.traj, "trajectory CSV (t,j,r,p)")->capture_default_str();

  ExperimentArgs ex;
  auto add_experiment = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", ex.config, "JSON configuration");
    sub->add_option("--alpha", ex.alphas, "override the alpha list");
    sub->add_option("--tau0", ex.tau0, "override tau0");
    sub->add_option("--amplitude", ex.amplitude, "override the profile amplitude");
    sub->add_option("--checkpoints", ex.checkpoints, "override the checkpoint count");
    return sub;
  };
  auto* sweep = add_experiment("residual-sweep", "residual norms of the ansatz over the epsilon sweep");
  auto* validate = add_experiment("validate", "matched lattice and Benjamin-Ono runs with error fits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsageOrDomain;
  }

  const std::string cmdline = command_line(argc, argv);
  std::optional<BlowUp> blowup;
  int code = kOk;
  try {
    if (constants->parsed()) code = cmd_constants(alpha, tol);
    else if (star->parsed()) code = cmd_alpha_star(star_tol);
    else if (rates->parsed()) code = cmd_eta_rates(alpha, hs, tol);
    else if (solve->parsed()) code = cmd_solve_bo(bo, g, cmdline, blowup);
    else if (sim->parsed()) code = cmd_simulate_lattice(lat, g, cmdline, blowup);
    else if (sweep->parsed()) code = cmd_residual_sweep(ex, g, cmdline, blowup);
    else if (validate->parsed()) code = cmd_validate(ex, g, cmdline, blowup);
  } catch (const BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return kBlowUp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageOrDomain;
  }
  if (blowup) {
    std::cerr << "blow-up: alpha " << blowup->alpha << ", eps ";
    if (std::isnan(blowup->epsilon)) std::cerr << "n/a";
    else std::cerr << blowup->epsilon;
    std::cerr << ", t " << blowup->t << ": " << blowup->what << '\n';
    return kBlowUp;
  }
  return code;
}

}  // namespace cmbo::cli
