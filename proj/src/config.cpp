#include "netbd/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace netbd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid value for '" + key + "': '" + value + "'");
  }
  return out;
}

const char* kind_name(PowerConstraint::Kind k) {
  switch (k) {
    case PowerConstraint::Kind::PerAntenna: return "per_antenna";
    case PowerConstraint::Kind::PerBaseStation: return "per_bs";
    case PowerConstraint::Kind::Sum: return "sum";
  }
  return "per_antenna";
}

}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Conventional: return "conventional";
    case Scheme::OptimalPerAntenna: return "optimal_per_antenna";
    case Scheme::OptimalPerBs: return "optimal_per_bs";
    case Scheme::OptimalSum: return "optimal_sum";
  }
  return "conventional";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "conventional") return Scheme::Conventional;
  if (name == "optimal_per_antenna") return Scheme::OptimalPerAntenna;
  if (name == "optimal_per_bs") return Scheme::OptimalPerBs;
  if (name == "optimal_sum") return Scheme::OptimalSum;
  throw ConfigError("schemes: unknown scheme '" + name + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  using Setter = std::function<void(const std::string& key, const std::string& value)>;
  const std::map<std::string, Setter> setters = {
      {"cluster_sizes",
       [&](auto& k, auto& v) {
         c.cluster_sizes.clear();
         for (const auto& item : split_list(v)) c.cluster_sizes.push_back(parse_number<int>(k, item));
       }},
      {"n_t", [&](auto& k, auto& v) { c.n_t = parse_number<int>(k, v); }},
      {"n_r", [&](auto& k, auto& v) { c.n_r = parse_number<int>(k, v); }},
      {"users_per_cell", [&](auto& k, auto& v) { c.users_per_cell = parse_number<int>(k, v); }},
      {"constraint",
       [&](auto& k, auto& v) {
         if (v == "per_antenna") c.constraint = PowerConstraint::Kind::PerAntenna;
         else if (v == "per_bs") c.constraint = PowerConstraint::Kind::PerBaseStation;
         else if (v == "sum") c.constraint = PowerConstraint::Kind::Sum;
         else throw ConfigError("invalid value for '" + k + "': '" + v + "'");
       }},
      {"bs_power", [&](auto& k, auto& v) { c.bs_power = parse_number<double>(k, v); }},
      {"scheduler",
       [&](auto& k, auto& v) {
         if (v == "msr") c.scheduler = SchedulerKind::MaxSumRate;
         else if (v == "pf") c.scheduler = SchedulerKind::ProportionalFair;
         else throw ConfigError("invalid value for '" + k + "': '" + v + "'");
       }},
      {"pf_window", [&](auto& k, auto& v) { c.pf_window = parse_number<double>(k, v); }},
      {"slots", [&](auto& k, auto& v) { c.slots = parse_number<int>(k, v); }},
      {"schemes",
       [&](auto&, auto& v) {
         c.schemes.clear();
         for (const auto& item : split_list(v)) c.schemes.push_back(parse_scheme(item));
       }},
      {"selection",
       [&](auto& k, auto& v) {
         if (v == "conventional") c.selection = SelectionEvaluator::Conventional;
         else if (v == "optimal") c.selection = SelectionEvaluator::Optimal;
         else throw ConfigError("invalid value for '" + k + "': '" + v + "'");
       }},
      {"drops", [&](auto& k, auto& v) { c.drops = parse_number<int>(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"workers", [&](auto& k, auto& v) { c.workers = parse_number<int>(k, v); }},
      {"max_iter", [&](auto& k, auto& v) { c.solver.max_iter = parse_number<int>(k, v); }},
      {"tol_kkt", [&](auto& k, auto& v) { c.solver.tol_kkt = parse_number<double>(k, v); }},
      {"tol_gap", [&](auto& k, auto& v) { c.solver.tol_gap = parse_number<double>(k, v); }},
      {"path_loss_exponent",
       [&](auto& k, auto& v) { c.fading.path_loss_exponent = parse_number<double>(k, v); }},
      {"shadowing_std_db",
       [&](auto& k, auto& v) { c.fading.shadowing_std_db = parse_number<double>(k, v); }},
      {"reference_snr_db",
       [&](auto& k, auto& v) { c.fading.reference_snr_db = parse_number<double>(k, v); }},
      {"cell_radius_km",
       [&](auto& k, auto& v) { c.fading.cell_radius_km = parse_number<double>(k, v); }},
      {"min_distance_km",
       [&](auto& k, auto& v) { c.fading.min_distance_km = parse_number<double>(k, v); }},
      {"output_dir", [&](auto&, auto& v) { c.output_dir = v; }},
  };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    it->second(key, value);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void ExperimentConfig::validate() const {
  if (cluster_sizes.empty()) throw ConfigError("cluster_sizes: at least one size required");
  for (int b : cluster_sizes) {
    if (b != 1 && b != 3 && b != 7) throw ConfigError("cluster_sizes: must be 1, 3 or 7");
  }
  if (n_t < 1) throw ConfigError("n_t: must be >= 1");
  if (n_r < 1) throw ConfigError("n_r: must be >= 1");
  if (n_r > n_t * *std::min_element(cluster_sizes.begin(), cluster_sizes.end())) {
    throw ConfigError("n_r: must not exceed the cluster's transmit antenna count");
  }
  if (users_per_cell < 1) throw ConfigError("users_per_cell: must be >= 1");
  if (!(bs_power > 0.0)) throw ConfigError("bs_power: must be > 0");
  if (!(pf_window >= 1.0)) throw ConfigError("pf_window: must be >= 1");
  if (slots < 1) throw ConfigError("slots: must be >= 1");
  if (schemes.empty()) throw ConfigError("schemes: at least one scheme required");
  if (drops < 1) throw ConfigError("drops: must be >= 1");
  if (workers < 1) throw ConfigError("workers: must be >= 1");
  if (solver.max_iter < 1) throw ConfigError("max_iter: must be >= 1");
  if (!(solver.tol_kkt > 0.0)) throw ConfigError("tol_kkt: must be > 0");
  if (!(solver.tol_gap > 0.0)) throw ConfigError("tol_gap: must be > 0");
  if (!(fading.path_loss_exponent > 2.0)) throw ConfigError("path_loss_exponent: must be > 2");
  if (!(fading.shadowing_std_db >= 0.0)) throw ConfigError("shadowing_std_db: must be >= 0");
  if (!(fading.cell_radius_km > 0.0)) throw ConfigError("cell_radius_km: must be > 0");
  if (!(fading.min_distance_km > 0.0)) throw ConfigError("min_distance_km: must be > 0");
}

RVector ExperimentConfig::per_antenna_budget() const {
  return RVector::Constant(n_t, bs_power / n_t);
}

PowerConstraint ExperimentConfig::make_constraint(PowerConstraint::Kind kind,
                                                  int cluster_size) const {
  const int total = cluster_size * n_t;
  switch (kind) {
    case PowerConstraint::Kind::PerAntenna:
      return PowerConstraint::per_antenna(RVector::Constant(total, bs_power / n_t));
    case PowerConstraint::Kind::PerBaseStation:
      return PowerConstraint::per_base_station(RVector::Constant(cluster_size, bs_power), n_t);
    case PowerConstraint::Kind::Sum:
      return PowerConstraint::sum(bs_power * cluster_size, total);
  }
  throw ConfigError("constraint: unknown kind");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["cluster_sizes"] = cluster_sizes;
  j["n_t"] = n_t;
  j["n_r"] = n_r;
  j["users_per_cell"] = users_per_cell;
  j["constraint"] = kind_name(constraint);
  j["bs_power"] = bs_power;
  j["scheduler"] = scheduler == SchedulerKind::MaxSumRate ? "msr" : "pf";
  j["pf_window"] = pf_window;
  j["slots"] = slots;
  std::vector<std::string> names;
  for (Scheme s : schemes) names.push_back(scheme_name(s));
  j["schemes"] = names;
  j["selection"] = selection == SelectionEvaluator::Conventional ? "conventional" : "optimal";
  j["drops"] = drops;
  j["seed"] = seed;
  j["workers"] = workers;
  j["max_iter"] = solver.max_iter;
  j["tol_kkt"] = solver.tol_kkt;
  j["tol_gap"] = solver.tol_gap;
  j["path_loss_exponent"] = fading.path_loss_exponent;
  j["shadowing_std_db"] = fading.shadowing_std_db;
  j["reference_snr_db"] = fading.reference_snr_db;
  j["cell_radius_km"] = fading.cell_radius_km;
  j["min_distance_km"] = fading.min_distance_km;
  j["output_dir"] = output_dir;
  return j;
}

}  // namespace netbd
