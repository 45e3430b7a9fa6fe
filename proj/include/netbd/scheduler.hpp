#pragma once

#include <functional>
#include <span>
#include <vector>

#include "netbd/bd_core.hpp"
#include "netbd/types.hpp"

namespace netbd {

/// Per-user rates (bits/s/Hz, in subset order) obtained by serving `subset`.
/// May throw DegenerateChannelError for subsets that cannot be block-diagonalized.
using SubsetEvaluator = std::function<RVector(std::span<const int> subset)>;

/// Greedy weighted sum-rate user selection. Starting from the empty set,
/// repeatedly adds the user with the largest weighted sum-rate objective
/// until no candidate improves it or max_users is reached. Ties go to the
/// lowest index.
std::vector<int> greedy_select(int pool_size, int max_users, const SubsetEvaluator& evaluator,
                               const RVector& weights);

/// Exponentially averaged throughput for proportional-fair weighting.
struct ScheduleState {
  double window = 10.0;         // tau, in slots
  double throughput_floor = 1e-6;
  RVector throughput;           // T_k
  RVector weights;              // 1 / max(T_k, floor)
  long slot = 0;

  static ScheduleState create(int users, double window);
};

/// T <- (1 - 1/tau) T + r / tau, then refresh the weights.
ScheduleState pf_update(const ScheduleState& state, const RVector& slot_rates);

/// Conventional-BD evaluator over a fixed pool: water-filling at the
/// constraint's total budget, then uniform scaling to the constraint (as in
/// conventional_bd_scaled). Backed by the pool's Gram matrix so each
/// candidate costs one small Cholesky solve.
class GramEvaluator {
 public:
  GramEvaluator(const std::vector<CMatrix>& pool_channels, PowerConstraint constraint);
  // Sum-power shorthand.
  GramEvaluator(const std::vector<CMatrix>& pool_channels, double sum_budget);

  RVector operator()(std::span<const int> subset) const;

 private:
  CMatrix stacked_;
  CMatrix gram_;
  int n_r_;
  PowerConstraint constraint_;
};

}  // namespace netbd
