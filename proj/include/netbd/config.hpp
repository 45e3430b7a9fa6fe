#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "netbd/bd_core.hpp"
#include "netbd/channel_model.hpp"
#include "netbd/dual_optimizer.hpp"

namespace netbd {

enum class Scheme { Conventional, OptimalPerAntenna, OptimalPerBs, OptimalSum };
enum class SchedulerKind { MaxSumRate, ProportionalFair };
enum class SelectionEvaluator { Conventional, Optimal };

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

/// Flat key/value experiment description. See README for the key list.
struct ExperimentConfig {
  std::vector<int> cluster_sizes{1};
  int n_t = 4;
  int n_r = 2;
  int users_per_cell = 10;
  PowerConstraint::Kind constraint = PowerConstraint::Kind::PerAntenna;
  double bs_power = 1.0;  // per base station, noise-normalized
  SchedulerKind scheduler = SchedulerKind::MaxSumRate;
  double pf_window = 10.0;
  int slots = 1;
  std::vector<Scheme> schemes{Scheme::OptimalPerAntenna, Scheme::Conventional};
  SelectionEvaluator selection = SelectionEvaluator::Conventional;
  int drops = 10;
  std::uint64_t seed = 1;
  int workers = 1;
  SolveOptions solver;
  FadingParams fading;
  std::string output_dir;  // empty: NETBD_OUT_DIR, then "results"

  /// Throws ConfigError naming the offending key.
  void validate() const;

  /// Budgets of the given kind, all derived from bs_power so the totals match.
  [[nodiscard]] PowerConstraint make_constraint(PowerConstraint::Kind kind,
                                                int cluster_size) const;
  [[nodiscard]] RVector per_antenna_budget() const;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and
/// malformed values throw ConfigError. The result is not validated.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config(const std::string& path);

}  // namespace netbd
