#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netbd/config.hpp"
#include "netbd/dual_optimizer.hpp"

namespace netbd {

/// One (cluster size, drop, scheme) outcome, averaged over the drop's slots.
struct DropRecord {
  int cluster_size = 1;
  int drop = 0;
  std::string scheme;
  double normalized_sum_rate = 0.0;  // cluster sum rate / B, bits/s/Hz
  double sum_rate = 0.0;
  int solves = 0;
  int nonconverged = 0;
  int max_iterations = 0;
  double worst_interference = 0.0;  // max ||H_j W_k|| / (||H_j|| ||W_k||)
  double worst_slack = 0.0;         // min over groups of budget - usage
  double worst_relative_gap = 0.0;
  double worst_kkt = 0.0;
  double worst_complementarity = 0.0;  // max |lambda_g (usage_g - budget_g)|
};

struct UserMeanRate {
  int cluster_size = 1;
  int drop = 0;
  int user = 0;
  std::string scheme;
  double mean_rate = 0.0;
};

struct ConvergenceTrace {
  int cluster_size = 1;
  int drop = 0;
  std::string scheme;
  double final_dual = 0.0;
  double final_primal = 0.0;
  std::vector<TraceRecord> trace;
};

struct SchemeSummary {
  std::string scheme;
  int cluster_size = 1;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  int drops = 0;
  int excluded = 0;
};

struct ExperimentResult {
  std::vector<DropRecord> drops;
  std::vector<UserMeanRate> user_rates;  // PF runs only, converged drops only
  std::vector<ConvergenceTrace> traces;
  bool proportional_fair = false;
  int degenerate_slots = 0;

  [[nodiscard]] int nonconverged_solves() const;
  /// Groups by (scheme, B) in first-appearance order; drops with any
  /// nonconverged solve are excluded and counted.
  [[nodiscard]] std::vector<SchemeSummary> summarize() const;
};

/// Derived per-task seed; independent of how tasks are spread over workers.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace netbd
