// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "netbd/bd_core.hpp"
#include "netbd/config.hpp"
#include "netbd/diagnostics.hpp"
#include "netbd/dual_optimizer.hpp"
#include "netbd/experiment.hpp"

using namespace netbd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Worst ZF / feasibility / complementarity numbers over emitted precoders.
struct EmittedChecks {
  double interference = 0.0;
  double slack = 1e300;
  double complementarity = 0.0;
  int sets = 0;

  void add(const std::vector<CMatrix>& h, const PrecoderSet& p, const PowerConstraint& pc) {
    interference = std::max(interference, max_interference_ratio(h, p.W));
    slack = std::min(slack, pc.slack(antenna_powers(p.W)).minCoeff());
    ++sets;
  }
  void add_solve(const std::vector<CMatrix>& h, const SolveReport& rep, const PowerConstraint& pc) {
    add(h, rep.precoders, pc);
    if (!rep.converged) return;
    const RVector usage = pc.reduce(antenna_powers(rep.precoders.W));
    for (int g = 0; g < pc.num_groups(); ++g) {
      complementarity =
          std::max(complementarity, std::abs(rep.lambda(g) * (usage(g) - pc.budgets()(g))));
    }
  }
};

EmittedChecks emitted;

PowerConstraint per_antenna(int b, int n_t) {
  return PowerConstraint::per_antenna(RVector::Constant(b * n_t, 1.0 / n_t));
}

void criterion_duality_gap() {
  const auto t0 = Clock::now();
  const DualSolver solver;
  int converged = 0, violations = 0;
  double worst_gap = -1e300;
  const int instances = 200;
  for (int i = 0; i < instances; ++i) {
    const int b = i % 2 ? 3 : 1;
    const int n_t = (i / 2) % 2 ? 4 : 2;
    const int n_r = (i / 4) % 2 ? 2 : 1;
    const int k_max = b * n_t / n_r;
    const int users = std::max(1, k_max - (i / 8) % 2 * (1 + (i / 16) % std::max(1, k_max - 1)));
    const auto h = random_scheduled_channels(b, n_t, n_r, users, 1000 + static_cast<std::uint64_t>(i));
    const NullSpaceDecomp d = effective_channels(h);
    const auto pc = per_antenna(b, n_t);
    const SolveReport rep = solver.solve(d, pc);
    emitted.add_solve(h, rep, pc);
    if (!rep.converged) continue;
    ++converged;
    worst_gap = std::max(worst_gap, rep.relative_gap);
    if (rep.relative_gap > 1e-5 || rep.relative_gap < -1e-7) ++violations;
  }
  const double secs = seconds_since(t0);
  const bool pass = violations == 0 && converged >= 0.99 * instances && secs <= 120.0;
  report(1, pass,
         fmt("duality gap: %d/%d converged, worst relative gap %.2e (<= 1e-5), %.1f s (<= 120 s)",
             converged, instances, worst_gap, secs));
}

// Grid plus shrinking-box refinement over (phi_1, phi_2) for N_t = 2,
// K = 2, n_r = 1 under per-antenna budgets.
double brute_force_two_user(const NullSpaceDecomp& d, const RVector& p) {
  double a[2][2], g[2];
  for (int k = 0; k < 2; ++k) {
    g[k] = std::norm(d.G[k](0, 0));
    for (int i = 0; i < 2; ++i) a[k][i] = std::norm(d.V[k](i, 0));
  }
  auto feasible = [&](double x, double y) {
    if (x < 0 || y < 0) return false;
    for (int i = 0; i < 2; ++i) {
      if (a[0][i] * x + a[1][i] * y > p(i)) return false;
    }
    return true;
  };
  auto rate = [&](double x, double y) { return std::log2(1 + g[0] * x) + std::log2(1 + g[1] * y); };
  double xmax = 1e300, ymax = 1e300;
  for (int i = 0; i < 2; ++i) {
    if (a[0][i] > 0) xmax = std::min(xmax, p(i) / a[0][i]);
    if (a[1][i] > 0) ymax = std::min(ymax, p(i) / a[1][i]);
  }
  double best = 0, bx = 0, by = 0, cx = xmax / 2, cy = ymax / 2, wx = xmax, wy = ymax;
  const int n = 400;
  for (int round = 0; round < 40; ++round) {
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const double x = cx + wx * (static_cast<double>(i) / n - 0.5);
        const double y = cy + wy * (static_cast<double>(j) / n - 0.5);
        if (!feasible(x, y)) continue;
        const double r = rate(x, y);
        if (r > best) {
          best = r;
          bx = x;
          by = y;
        }
      }
    }
    cx = bx;
    cy = by;
    wx *= 0.2;
    wy *= 0.2;
  }
  return best;
}

void criterion_brute_force() {
  const auto t0 = Clock::now();
  const DualSolver solver;
  double worst = 0.0;
  int converged = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto h = random_scheduled_channels(1, 2, 1, 2, 2000 + seed);
    const NullSpaceDecomp d = effective_channels(h);
    const auto pc = per_antenna(1, 2);
    const SolveReport rep = solver.solve(d, pc);
    emitted.add_solve(h, rep, pc);
    converged += rep.converged;
    const double oracle = brute_force_two_user(d, pc.budgets());
    worst = std::max(worst, std::abs(rep.primal_rate - oracle) / oracle);
  }
  const double secs = seconds_since(t0);
  report(2, worst <= 1e-4 && converged == 20 && secs <= 60.0,
         fmt("brute-force oracle: worst relative difference %.2e (<= 1e-4) over 20 seeds, "
             "%d converged, %.1f s (<= 60 s)",
             worst, converged, secs));
}

void criterion_gradient() {
  double worst = 0.0;
  int points = 0;
  for (int i = 0; i < 50; ++i) {
    const int b = i % 2 ? 3 : 1;
    const int n_t = (i / 2) % 2 ? 4 : 2;
    const int n_r = (i / 4) % 2 ? 2 : 1;
    const int users = std::max(1, b * n_t / n_r - (i / 8) % 2);
    const auto h = random_scheduled_channels(b, n_t, n_r, users, 3000 + static_cast<std::uint64_t>(i));
    const NullSpaceDecomp d = effective_channels(h);
    const std::vector<PowerConstraint> kinds = {
        per_antenna(b, n_t), PowerConstraint::per_base_station(RVector::Ones(b), n_t),
        PowerConstraint::sum(b, b * n_t)};
    for (const auto& pc : kinds) {
      const RVector lam = generic_dual_point(d, pc, 4000 + static_cast<std::uint64_t>(i));
      const RVector analytic = dual_gradient(lam, d, pc);
      const double eps = 1e-6;
      for (int g = 0; g < pc.num_groups(); ++g) {
        RVector up = lam, dn = lam;
        up(g) += eps;
        dn(g) -= eps;
        const double fd = (dual_value(up, d, pc) - dual_value(dn, d, pc)) / (2 * eps);
        worst = std::max(worst, std::abs(fd - analytic(g)) / (1 + std::abs(analytic(g))));
      }
      ++points;
    }
  }
  report(3, worst <= 1e-5 && points == 150,
         fmt("gradient: max relative FD error %.2e (<= 1e-5) over %d points (50 x 3 kinds)", worst,
             points));
}

void criterion_sum_power() {
  const DualSolver solver;
  double worst = 0.0;
  int converged = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const int b = seed % 2 ? 3 : 1;
    const int users = 2 * b - static_cast<int>(seed % 3 == 0);
    const auto h = random_scheduled_channels(b, 4, 2, users, 5000 + seed);
    const NullSpaceDecomp d = effective_channels(h);
    const auto pc = PowerConstraint::sum(b, 4 * b);
    const SolveReport rep = solver.solve(d, pc);
    emitted.add_solve(h, rep, pc);
    converged += rep.converged;
    PrecoderSet conv = conventional_bd(d, b);
    sum_rate(h, conv);
    emitted.add(h, conv, pc);
    worst = std::max(worst, std::abs(rep.primal_rate - conv.sum_rate) / conv.sum_rate);
  }
  report(4, worst <= 1e-5 && converged == 50,
         fmt("sum-power equivalence: worst relative difference %.2e (<= 1e-5), %d/50 converged",
             worst, converged));
}

void criterion_zero_forcing() {
  // Per-BS solves and scaled conventional BD add to the precoders collected
  // by the other criteria.
  const DualSolver solver;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const int b = seed % 2 ? 3 : 1;
    const auto h = random_scheduled_channels(b, 4, 2, 2 * b - static_cast<int>(seed % 4 == 0), 6000 + seed);
    const NullSpaceDecomp d = effective_channels(h);
    const auto bs = PowerConstraint::per_base_station(RVector::Ones(b), 4);
    emitted.add_solve(h, solver.solve(d, bs), bs);
    const auto ant = per_antenna(b, 4);
    PrecoderSet conv = conventional_bd_scaled(d, ant);
    emitted.add(h, conv, ant);
  }
  const bool pass = emitted.interference <= 1e-8 && emitted.slack >= -1e-8 &&
                    emitted.complementarity <= 1e-6;
  report(5, pass,
         fmt("zero forcing / feasibility over %d precoder sets: max ||H_j W_k|| ratio %.2e (<= 1e-8), "
             "min slack %.2e (>= -1e-8), max complementarity %.2e (<= 1e-6)",
             emitted.sets, emitted.interference, emitted.slack, emitted.complementarity));
}

ExperimentConfig base_config() {
  ExperimentConfig c;
  c.n_t = 4;
  c.n_r = 2;
  c.constraint = PowerConstraint::Kind::PerAntenna;
  c.bs_power = 1.0;
  c.seed = 1;
  c.workers = 1;
  return c;
}

void criterion_fig7() {
  const auto t0 = Clock::now();
  ExperimentConfig c = base_config();
  c.cluster_sizes = {3};
  c.users_per_cell = 8;
  c.drops = 20;
  c.schemes = {Scheme::OptimalPerAntenna};
  const ExperimentResult r = run_experiment(c);
  int within = 0;
  for (const auto& t : r.traces) {
    const double at10 = t.trace.size() > 10 ? t.trace[10].primal : t.trace.back().primal;
    if (std::abs(at10 - t.final_primal) <= 0.01 * t.final_primal) ++within;
  }
  const double secs = seconds_since(t0);
  report(6, within >= 18 && r.traces.size() == 20 && secs <= 300.0,
         fmt("convergence: iterate-10 rate within 1%% of converged on %d/%zu drops (>= 18/20), %.1f s",
             within, r.traces.size(), secs));
}

struct Means {
  double optimal = 0.0;
  double conventional = 0.0;
  int excluded = 0;
};

Means fig1_means(int users_per_cell) {
  ExperimentConfig c = base_config();
  c.cluster_sizes = {1};
  c.n_t = 12;
  c.users_per_cell = users_per_cell;
  c.drops = 100;
  c.schemes = {Scheme::OptimalPerAntenna, Scheme::Conventional};
  Means m;
  for (const auto& s : run_experiment(c).summarize()) {
    (s.scheme == "conventional" ? m.conventional : m.optimal) = s.mean;
    m.excluded += s.excluded;
  }
  return m;
}

void criterion_fig1() {
  const Means two = fig1_means(2);
  const Means ten = fig1_means(10);
  const double gap2 = two.optimal - two.conventional;
  const double gap10 = ten.optimal - ten.conventional;
  report(7, gap2 > 0 && gap10 > 0 && gap10 > gap2,
         fmt("optimal vs scaled conventional (B=1, N_t=12): gap %.3f at 2 users/cell, %.3f at 10 "
             "users/cell (must be > 0 and increasing); excluded drops %d",
             gap2, gap10, two.excluded + ten.excluded));
}

void criterion_fig3() {
  ExperimentConfig c = base_config();
  c.cluster_sizes = {1, 3, 7};
  c.users_per_cell = 10;
  c.drops = 200;
  c.schemes = {Scheme::OptimalPerAntenna};
  const auto summary = run_experiment(c).summarize();
  double mean[3], var[3];
  int excluded = 0;
  for (int i = 0; i < 3; ++i) {
    mean[i] = summary[i].mean;
    var[i] = summary[i].stddev * summary[i].stddev;
    excluded += summary[i].excluded;
  }
  const bool pass = mean[0] < mean[1] && mean[1] < mean[2] && var[2] < var[0];
  report(8, pass,
         fmt("cluster sizes 1/3/7: mean normalized rate %.3f / %.3f / %.3f (increasing), "
             "variance %.2f / %.2f / %.2f (B=7 below B=1); excluded drops %d",
             mean[0], mean[1], mean[2], var[0], var[1], var[2], excluded));
}

void criterion_fig6() {
  const auto t0 = Clock::now();
  ExperimentConfig c = base_config();
  c.cluster_sizes = {1, 3, 7};
  c.users_per_cell = 10;
  c.scheduler = SchedulerKind::ProportionalFair;
  c.pf_window = 10;
  c.slots = 100;
  c.drops = 50;
  c.schemes = {Scheme::OptimalPerAntenna};
  const ExperimentResult r = run_experiment(c);
  double frac[3];
  const int sizes[3] = {1, 3, 7};
  for (int i = 0; i < 3; ++i) {
    int above = 0, total = 0;
    for (const auto& u : r.user_rates) {
      if (u.cluster_size != sizes[i]) continue;
      ++total;
      above += u.mean_rate > 1.0;
    }
    frac[i] = total ? static_cast<double>(above) / total : 0.0;
  }
  const bool pass = frac[1] >= frac[0] + 0.10 && frac[2] >= frac[0] + 0.10;
  report(9, pass,
         fmt("proportional fair: users above 1 bit/s/Hz %.1f%% / %.1f%% / %.1f%% for B=1/3/7 "
             "(B=3 and B=7 must exceed B=1 by >= 10 points); nonconverged solves %d, %.1f s",
             100 * frac[0], 100 * frac[1], 100 * frac[2], r.nonconverged_solves(),
             seconds_since(t0)));
}

void criterion_nesting() {
  SolveOptions tight;
  tight.tol_kkt = 1e-8;
  tight.tol_gap = 1e-8;
  tight.max_iter = 5000;
  const DualSolver solver(tight);
  double worst = 0.0;  // largest ordering violation
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const int b = seed % 2 ? 3 : 1;
    const int users = 2 * b - static_cast<int>(seed % 3 == 0);
    const auto h = random_scheduled_channels(b, 4, 2, users, 7000 + seed);
    const NullSpaceDecomp d = effective_channels(h);
    const double ant = solver.solve(d, per_antenna(b, 4)).primal_rate;
    const double bs = solver.solve(d, PowerConstraint::per_base_station(RVector::Ones(b), 4)).primal_rate;
    const double sum = solver.solve(d, PowerConstraint::sum(b, 4 * b)).primal_rate;
    worst = std::max({worst, bs - sum, ant - bs});
  }
  report(10, worst <= 1e-7,
         fmt("constraint nesting: largest violation of sum >= per-BS >= per-antenna %.2e (<= 1e-7) "
             "over 50 seeds",
             std::max(worst, 0.0)));
}

}  // namespace

// Optional arguments select criteria by number.
int main(int argc, char** argv) {
  const auto t0 = Clock::now();
  const std::vector<std::function<void()>> criteria = {
      criterion_duality_gap, criterion_brute_force, criterion_gradient, criterion_sum_power,
      criterion_zero_forcing, criterion_fig7, criterion_fig1, criterion_fig3, criterion_fig6,
      criterion_nesting};
  std::vector<bool> enabled(criteria.size(), argc <= 1);
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id >= 1 && id <= static_cast<int>(criteria.size())) enabled[id - 1] = true;
  }
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!enabled[i]) continue;
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      std::printf("[FAIL] exception: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d criteria failed, total %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
