#include "netbd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "netbd/bd_core.hpp"
#include "netbd/channel_model.hpp"
#include "netbd/scheduler.hpp"

namespace netbd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Task {
  int cluster_size;
  int drop;
};

struct TaskOutput {
  std::vector<DropRecord> drops;
  std::vector<UserMeanRate> user_rates;
  std::vector<ConvergenceTrace> traces;
  int degenerate_slots = 0;
};

PowerConstraint::Kind scheme_kind(Scheme s, PowerConstraint::Kind active) {
  switch (s) {
    case Scheme::Conventional: return active;
    case Scheme::OptimalPerAntenna: return PowerConstraint::Kind::PerAntenna;
    case Scheme::OptimalPerBs: return PowerConstraint::Kind::PerBaseStation;
    case Scheme::OptimalSum: return PowerConstraint::Kind::Sum;
  }
  return active;
}

std::vector<CMatrix> pick(const std::vector<CMatrix>& all, std::span<const int> subset) {
  std::vector<CMatrix> out;
  out.reserve(subset.size());
  for (int u : subset) out.push_back(all[u]);
  return out;
}

TaskOutput run_task(const ExperimentConfig& cfg, const CellLayout& layout, const Task& task) {
  const int b = task.cluster_size;
  const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(b),
                                         static_cast<std::uint64_t>(task.drop));
  const UserDrop drop = drop_users(layout, cfg.users_per_cell, derive_seed(seed, 1, 0));
  std::mt19937_64 rng(derive_seed(seed, 2, 0));
  const LargeScaleGains gains = draw_large_scale(layout, drop, cfg.fading, rng);

  const int pool = drop.num_users();
  const int total_tx = b * cfg.n_t;
  const int max_users = total_tx / cfg.n_r;
  const PowerConstraint active = cfg.make_constraint(cfg.constraint, b);
  const RVector whitening_budget = cfg.per_antenna_budget();
  const bool pf = cfg.scheduler == SchedulerKind::ProportionalFair;
  const DualSolver solver(cfg.solver);

  const auto n_schemes = cfg.schemes.size();
  std::vector<DropRecord> records(n_schemes);
  std::vector<RVector> user_totals(n_schemes, RVector::Zero(pool));
  for (std::size_t s = 0; s < n_schemes; ++s) {
    records[s].cluster_size = b;
    records[s].drop = task.drop;
    records[s].scheme = scheme_name(cfg.schemes[s]);
    records[s].worst_slack = std::numeric_limits<double>::infinity();
  }

  TaskOutput out;
  ScheduleState pf_state = ScheduleState::create(pool, cfg.pf_window);
  const RVector unit_weights = RVector::Ones(pool);

  for (int slot = 0; slot < cfg.slots; ++slot) {
    const ChannelSet raw = draw_small_scale(layout, gains, cfg.n_t, cfg.n_r, rng);
    const ChannelSet ch = whiten_interference(raw, whitening_budget);
    const RVector& weights = pf ? pf_state.weights : unit_weights;

    SubsetEvaluator evaluator;
    if (cfg.selection == SelectionEvaluator::Conventional) {
      evaluator = GramEvaluator(ch.aggregate, active);
    } else {
      evaluator = [&](std::span<const int> subset) {
        const NullSpaceDecomp d = effective_channels(pick(ch.aggregate, subset));
        return solver.solve(d, active).precoders.user_rate;
      };
    }
    const std::vector<int> selected = greedy_select(pool, max_users, evaluator, weights);
    RVector driving_rates = RVector::Zero(pool);
    if (selected.empty()) {
      ++out.degenerate_slots;
      if (pf) pf_state = pf_update(pf_state, driving_rates);
      continue;
    }
    const std::vector<CMatrix> served = pick(ch.aggregate, selected);
    NullSpaceDecomp decomp;
    try {
      decomp = effective_channels(served);
    } catch (const DegenerateChannelError&) {
      ++out.degenerate_slots;
      if (pf) pf_state = pf_update(pf_state, driving_rates);
      continue;
    }

    for (std::size_t s = 0; s < n_schemes; ++s) {
      const Scheme scheme = cfg.schemes[s];
      const PowerConstraint constraint = cfg.make_constraint(scheme_kind(scheme, cfg.constraint), b);
      DropRecord& rec = records[s];
      PrecoderSet pre;
      if (scheme == Scheme::Conventional) {
        pre = conventional_bd_scaled(decomp, constraint);
      } else {
        SolveReport rep;
        ++rec.solves;
        try {
          rep = solver.solve(decomp, constraint);
        } catch (const ConvergenceQualityError&) {
          ++rec.nonconverged;
          continue;
        } catch (const DomainError&) {
          ++rec.nonconverged;
          continue;
        }
        if (!rep.converged) ++rec.nonconverged;
        rec.max_iterations = std::max(rec.max_iterations, rep.iterations);
        rec.worst_relative_gap = std::max(rec.worst_relative_gap, rep.relative_gap);
        rec.worst_kkt = std::max(rec.worst_kkt, rep.kkt_residual);
        const RVector usage = constraint.reduce(antenna_powers(rep.precoders.W));
        for (int g = 0; g < constraint.num_groups(); ++g) {
          rec.worst_complementarity =
              std::max(rec.worst_complementarity,
                       std::abs(rep.lambda(g) * (usage(g) - constraint.budgets()(g))));
        }
        if (slot == 0) {
          out.traces.push_back(
              {b, task.drop, rec.scheme, rep.dual_value, rep.primal_rate, std::move(rep.trace)});
        }
        pre = std::move(rep.precoders);
      }
      sum_rate(served, pre);
      rec.sum_rate += pre.sum_rate / cfg.slots;
      rec.worst_interference =
          std::max(rec.worst_interference, max_interference_ratio(served, pre.W));
      rec.worst_slack = std::min(rec.worst_slack, constraint.slack(pre.antenna_power).minCoeff());
      for (std::size_t i = 0; i < selected.size(); ++i) {
        user_totals[s](selected[i]) += pre.user_rate(static_cast<Eigen::Index>(i));
      }
      if (s == 0) {
        for (std::size_t i = 0; i < selected.size(); ++i) {
          driving_rates(selected[i]) = pre.user_rate(static_cast<Eigen::Index>(i));
        }
      }
    }
    if (pf) pf_state = pf_update(pf_state, driving_rates);
  }

  for (std::size_t s = 0; s < n_schemes; ++s) {
    DropRecord& rec = records[s];
    rec.normalized_sum_rate = rec.sum_rate / b;
    if (!std::isfinite(rec.worst_slack)) rec.worst_slack = 0.0;
    out.drops.push_back(rec);
    // Users of a drop with a nonconverged solve are excluded like its summary row.
    if (pf && rec.nonconverged == 0) {
      for (int u = 0; u < pool; ++u) {
        out.user_rates.push_back({b, task.drop, u, rec.scheme, user_totals[s](u) / cfg.slots});
      }
    }
  }
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

int ExperimentResult::nonconverged_solves() const {
  int n = 0;
  for (const auto& d : drops) n += d.nonconverged;
  return n;
}

std::vector<SchemeSummary> ExperimentResult::summarize() const {
  std::vector<SchemeSummary> out;
  std::map<std::pair<std::string, int>, std::vector<double>> values;
  std::map<std::pair<std::string, int>, int> excluded;
  for (const auto& d : drops) {
    const auto key = std::make_pair(d.scheme, d.cluster_size);
    if (!values.contains(key)) {
      out.push_back({d.scheme, d.cluster_size});
      values[key];
      excluded[key] = 0;
    }
    if (d.nonconverged > 0) ++excluded[key];
    else values[key].push_back(d.normalized_sum_rate);
  }
  for (auto& s : out) {
    const auto& v = values[{s.scheme, s.cluster_size}];
    s.drops = static_cast<int>(v.size());
    s.excluded = excluded[{s.scheme, s.cluster_size}];
    if (v.empty()) continue;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    s.mean = mean;
    s.stddev = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::map<int, CellLayout> layouts;
  std::vector<Task> tasks;
  for (int b : config.cluster_sizes) {
    layouts.emplace(b, build_layout(b, config.fading.cell_radius_km));
    for (int d = 0; d < config.drops; ++d) tasks.push_back({b, d});
  }

  std::vector<TaskOutput> outputs(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        outputs[i] = run_task(config, layouts.at(tasks[i].cluster_size), tasks[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n_workers = std::min<int>(config.workers, static_cast<int>(tasks.size()));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  result.proportional_fair = config.scheduler == SchedulerKind::ProportionalFair;
  for (auto& o : outputs) {
    std::move(o.drops.begin(), o.drops.end(), std::back_inserter(result.drops));
    std::move(o.user_rates.begin(), o.user_rates.end(), std::back_inserter(result.user_rates));
    std::move(o.traces.begin(), o.traces.end(), std::back_inserter(result.traces));
    result.degenerate_slots += o.degenerate_slots;
  }
  return result;
}

}  // namespace netbd
