#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "cmbo/error.hpp"
#include "cmbo/harness.hpp"

#ifndef CMBO_VERSION
#define CMBO_VERSION "0.0.0"
#endif

namespace cmbo::harness {

using nlohmann::json;

namespace {

const char* policy_name(CutoffPolicy p) {
  switch (p) {
    case CutoffPolicy::HalfRing: return "half_ring";
    case CutoffPolicy::ZetaTail: return "zeta_tail";
    case CutoffPolicy::Fixed: return "fixed";
  }
  return "half_ring";
}

CutoffPolicy policy_from(const std::string& s) {
  if (s == "half_ring") return CutoffPolicy::HalfRing;
  if (s == "zeta_tail") return CutoffPolicy::ZetaTail;
  if (s == "fixed") return CutoffPolicy::Fixed;
  throw ConfigError("config: unknown lattice.cutoff_policy '" + s + "'");
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("config: unknown field '" + where + key + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& dst, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: field '" + where + key + "' has the wrong type");
  }
}

json to_json(const ValidationConfig& c) {
  return json{
      {"alphas", c.alphas},
      {"epsilons", c.epsilons},
      {"tau0", c.tau0},
      {"bo", {{"n", c.bo_n}, {"dtau", c.bo_dtau}, {"dealias_fraction", c.dealias_fraction}}},
      {"lattice",
       {{"dt", c.lattice_dt},
        {"cutoff_policy", policy_name(c.cutoff_policy)},
        {"cutoff", c.cutoff},
        {"tail_correction", c.tail_correction}}},
      {"profile",
       {{"amplitude", c.profile.amplitude}, {"width", c.profile.width}, {"period", c.profile.period}}},
      {"checkpoints", c.checkpoints},
      {"bidirectional", c.bidirectional},
      {"output", c.output},
  };
}

json report_to_json(const ScalingReport& r) {
  json pairs = json::array();
  for (const auto& [e, v] : r.pairs) pairs.push_back({e, v});
  return json{{"slope", r.slope},
              {"intercept", r.intercept},
              {"r_squared", r.r_squared},
              {"target_exponent", r.target_exponent},
              {"pairs", pairs}};
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

ValidationConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(j, {"alpha", "alphas", "epsilons", "tau0", "bo", "lattice", "profile", "checkpoints",
                     "bidirectional", "output"}, "");
  ValidationConfig c;
  if (j.contains("alpha")) {
    if (j["alpha"].is_array()) {
      read(j, "alpha", c.alphas, "");
    } else {
      double a = 0;
      read(j, "alpha", a, "");
      c.alphas = {a};
    }
  }
  read(j, "alphas", c.alphas, "");
  read(j, "epsilons", c.epsilons, "");
  read(j, "tau0", c.tau0, "");
  read(j, "checkpoints", c.checkpoints, "");
  read(j, "bidirectional", c.bidirectional, "");
  read(j, "output", c.output, "");
  if (j.contains("bo")) {
    const auto& b = j["bo"];
    reject_unknown(b, {"n", "dtau", "dealias_fraction"}, "bo.");
    read(b, "n", c.bo_n, "bo.");
    read(b, "dtau", c.bo_dtau, "bo.");
    read(b, "dealias_fraction", c.dealias_fraction, "bo.");
  }
  if (j.contains("lattice")) {
    const auto& l = j["lattice"];
    reject_unknown(l, {"dt", "cutoff_policy", "cutoff", "tail_correction"}, "lattice.");
    read(l, "dt", c.lattice_dt, "lattice.");
    std::string policy = policy_name(c.cutoff_policy);
    read(l, "cutoff_policy", policy, "lattice.");
    c.cutoff_policy = policy_from(policy);
    read(l, "cutoff", c.cutoff, "lattice.");
    read(l, "tail_correction", c.tail_correction, "lattice.");
  }
  if (j.contains("profile")) {
    const auto& p = j["profile"];
    reject_unknown(p, {"amplitude", "width", "period"}, "profile.");
    read(p, "amplitude", c.profile.amplitude, "profile.");
    read(p, "width", c.profile.width, "profile.");
    read(p, "period", c.profile.period, "profile.");
  }
  validate(c);
  return c;
}

std::string config_to_json(const ValidationConfig& config, int indent) {
  return to_json(config).dump(indent);
}

static std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string config_hash(const ValidationConfig& config) {
  auto canonical = to_json(config);
  canonical.erase("output");  // where results go does not change them
  return fnv1a_hex(canonical.dump());
}

std::string plan_json(const ValidationConfig& config) {
  json runs = json::array();
  for (const auto& p : make_plan(config)) {
    runs.push_back({{"alpha", p.alpha},
                    {"epsilon_requested", p.epsilon_requested},
                    {"epsilon", p.epsilon},
                    {"N", p.sites},
                    {"M", p.cutoff},
                    {"dt", p.dt},
                    {"steps", p.steps},
                    {"steps_per_checkpoint", p.steps_per_checkpoint},
                    {"t_end", p.t_end}});
  }
  return json{{"config", to_json(config)}, {"config_hash", config_hash(config)}, {"runs", runs}}.dump(2);
}

void write_residual_csv(const std::vector<AlphaResidual>& sweep, const std::filesystem::path& path) {
  auto os = open_csv(path);
  os << "alpha,epsilon,t,l2\n";
  for (const auto& a : sweep) {
    for (const auto& per_eps : a.samples) {
      for (const auto& s : per_eps) {
        os << num(a.alpha) << ',' << num(s.epsilon) << ',' << num(s.t) << ',' << num(s.l2_norm) << '\n';
      }
    }
  }
}

void write_validation_csv(const std::vector<AlphaValidation>& runs, const std::filesystem::path& path) {
  auto os = open_csv(path);
  os << "alpha,epsilon,t,mu_l2,nu_l2\n";
  for (const auto& a : runs) {
    for (const auto& r : a.runs) {
      for (const auto& c : r.checkpoints) {
        os << num(a.alpha) << ',' << num(r.plan.epsilon) << ',' << num(c.t) << ',' << num(c.mu_l2)
           << ',' << num(c.nu_l2) << '\n';
      }
    }
  }
}

void write_energy_csv(const std::vector<AlphaValidation>& runs, const std::filesystem::path& path) {
  auto os = open_csv(path);
  os << "alpha,epsilon,t,H,sqrt_H,eta_l2,xi_l2,lower_ratio,upper_ratio,small,within_bounds\n";
  for (const auto& a : runs) {
    for (const auto& r : a.runs) {
      for (const auto& c : r.checkpoints) {
        const auto& e = c.energy;
        os << num(a.alpha) << ',' << num(r.plan.epsilon) << ',' << num(c.t) << ',' << num(e.energy) << ','
           << num(e.sqrt_energy) << ',' << num(e.eta_l2) << ',' << num(e.xi_l2) << ','
           << num(e.lower_ratio) << ',' << num(e.upper_ratio) << ',' << (e.small ? 1 : 0) << ','
           << (e.within_bounds ? 1 : 0) << '\n';
      }
    }
  }
}

void write_dat_mirror(const std::filesystem::path& csv, const std::filesystem::path& dat) {
  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot read " + csv.string());
  auto out = open_csv(dat);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    for (auto& ch : line) {
      if (ch == ',') ch = ' ';
    }
    out << (header ? "# " : "") << line << '\n';
    header = false;
  }
}

std::string report_json(const std::vector<AlphaResidual>* sweep, const std::vector<AlphaValidation>* runs) {
  json root = json::object();
  if (sweep) {
    json arr = json::array();
    for (const auto& a : *sweep) {
      json entry{{"alpha", a.alpha}};
      entry["residual"] = a.report ? report_to_json(*a.report) : json(nullptr);
      arr.push_back(entry);
    }
    root["residual"] = arr;
  }
  if (runs) {
    json arr = json::array();
    for (const auto& a : *runs) {
      json entry{{"alpha", a.alpha}};
      entry["mu"] = a.mu ? report_to_json(*a.mu) : json(nullptr);
      entry["nu"] = a.nu ? report_to_json(*a.nu) : json(nullptr);
      if (a.mu) entry["relative_mu_slope"] = a.mu->slope - (a.alpha - 0.5);
      json failures = json::array();
      bool small = true, bounds = true;
      for (const auto& r : a.runs) {
        if (r.failed) {
          failures.push_back({{"epsilon", r.plan.epsilon}, {"t", r.failure_time}, {"message", r.failure}});
        }
        for (const auto& c : r.checkpoints) {
          small = small && c.energy.small;
          bounds = bounds && c.energy.within_bounds;
        }
      }
      entry["failures"] = failures;
      entry["energy_smallness_held"] = small;
      entry["energy_bounds_held"] = bounds;
      arr.push_back(entry);
    }
    root["validation"] = arr;
  }
  return root.dump(2);
}

namespace {

void write_manifest_json(const json& config, const std::string& hash, const std::filesystem::path& dir,
                         const std::vector<std::filesystem::path>& outputs, const std::string& command) {
  json files = json::array();
  for (const auto& p : outputs) files.push_back(p.filename().string());
  const json manifest{{"config_hash", hash},
                      {"version", CMBO_VERSION},
                      {"command", command},
                      {"created_utc", utc_now()},
                      {"config", config},
                      {"outputs", files}};
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / "manifest.json", std::ios::trunc);
  if (!os) throw ConfigError("cannot write manifest in " + dir.string());
  os << manifest.dump(2) << '\n';
}

}  // namespace

void write_manifest(const ValidationConfig& config, const std::filesystem::path& dir,
                    const std::vector<std::filesystem::path>& outputs, const std::string& command) {
  write_manifest_json(to_json(config), config_hash(config), dir, outputs, command);
}

void write_manifest(const std::string& parameters_json, const std::filesystem::path& dir,
                    const std::vector<std::filesystem::path>& outputs, const std::string& command) {
  json params;
  try {
    params = json::parse(parameters_json);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest parameters: ") + e.what());
  }
  write_manifest_json(params, fnv1a_hex(params.dump()), dir, outputs, command);
}

}  // namespace cmbo::harness
