#include "netbd/scheduler.hpp"

#include <algorithm>
#include <limits>

#include "netbd/bd_core.hpp"

namespace netbd {

std::vector<int> greedy_select(int pool_size, int max_users, const SubsetEvaluator& evaluator,
                               const RVector& weights) {
  std::vector<int> selected;
  if (pool_size <= 0 || max_users <= 0) return selected;
  if (weights.size() != pool_size) throw std::invalid_argument("greedy_select: weights size");

  std::vector<bool> taken(pool_size, false);
  double current = 0.0;
  while (static_cast<int>(selected.size()) < max_users) {
    int best_user = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<int> trial = selected;
    trial.push_back(-1);
    for (int u = 0; u < pool_size; ++u) {
      if (taken[u]) continue;
      trial.back() = u;
      RVector rates;
      try {
        rates = evaluator(trial);
      } catch (const DegenerateChannelError&) {
        continue;
      }
      double value = 0.0;
      for (std::size_t i = 0; i < trial.size(); ++i) value += weights(trial[i]) * rates(i);
      if (value > best_value) {
        best_value = value;
        best_user = u;
      }
    }
    if (best_user < 0 || !(best_value > current)) break;
    selected.push_back(best_user);
    taken[best_user] = true;
    current = best_value;
  }
  return selected;
}

ScheduleState ScheduleState::create(int users, double window) {
  if (!(window >= 1.0)) throw ConfigError("pf window must be >= 1 slot");
  ScheduleState s;
  s.window = window;
  s.throughput = RVector::Zero(users);
  s.weights = RVector::Constant(users, 1.0 / s.throughput_floor);
  return s;
}

ScheduleState pf_update(const ScheduleState& state, const RVector& slot_rates) {
  if ((slot_rates.array() < 0.0).any()) throw std::invalid_argument("pf_update: negative rate");
  ScheduleState next = state;
  const double a = 1.0 / state.window;
  next.throughput = (1.0 - a) * state.throughput + a * slot_rates;
  next.weights = next.throughput.cwiseMax(state.throughput_floor).cwiseInverse();
  ++next.slot;
  return next;
}

namespace {

CMatrix stack_rows(const std::vector<CMatrix>& channels) {
  if (channels.empty()) return {};
  const auto n_r = channels.front().rows();
  CMatrix out(static_cast<Eigen::Index>(channels.size()) * n_r, channels.front().cols());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    out.middleRows(static_cast<Eigen::Index>(k) * n_r, n_r) = channels[k];
  }
  return out;
}

int total_tx_of(const std::vector<CMatrix>& channels) {
  return channels.empty() ? 1 : static_cast<int>(channels.front().cols());
}

}  // namespace

GramEvaluator::GramEvaluator(const std::vector<CMatrix>& pool_channels, PowerConstraint constraint)
    : stacked_(stack_rows(pool_channels)),
      gram_(stacked_ * stacked_.adjoint()),
      n_r_(pool_channels.empty() ? 1 : static_cast<int>(pool_channels.front().rows())),
      constraint_(std::move(constraint)) {
  if (!pool_channels.empty() && constraint_.total_tx() != stacked_.cols()) {
    throw ConfigError("GramEvaluator: constraint and channels disagree on the antenna count");
  }
}

GramEvaluator::GramEvaluator(const std::vector<CMatrix>& pool_channels, double sum_budget)
    : GramEvaluator(pool_channels, PowerConstraint::sum(sum_budget, total_tx_of(pool_channels))) {}

RVector GramEvaluator::operator()(std::span<const int> subset) const {
  const auto n = static_cast<Eigen::Index>(n_r_);
  const auto dim = static_cast<Eigen::Index>(subset.size()) * n;
  CMatrix sub(dim, dim);
  CMatrix rows(dim, stacked_.cols());
  for (std::size_t a = 0; a < subset.size(); ++a) {
    const auto ia = static_cast<Eigen::Index>(a) * n;
    rows.middleRows(ia, n) = stacked_.middleRows(subset[a] * n, n);
    for (std::size_t b = 0; b < subset.size(); ++b) {
      sub.block(ia, static_cast<Eigen::Index>(b) * n, n, n) =
          gram_.block(subset[a] * n, subset[b] * n, n, n);
    }
  }
  return conventional_bd_scaled_rates(rows, sub, n_r_, constraint_);
}

}  // namespace netbd
