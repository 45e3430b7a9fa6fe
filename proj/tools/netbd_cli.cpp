// Command-line front end: runs configured Monte Carlo experiments, solves
// single random instances and checks the dual gradient.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "netbd/config.hpp"
#include "netbd/diagnostics.hpp"
#include "netbd/dual_optimizer.hpp"
#include "netbd/experiment.hpp"
#include "netbd/output.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitNonconverged = 3;

std::string resolve_output_dir(const std::string& flag, const std::string& from_config) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv("NETBD_OUT_DIR"); env && *env) return env;
  return "results";
}

netbd::PowerConstraint::Kind parse_kind(const std::string& s) {
  if (s == "per_antenna") return netbd::PowerConstraint::Kind::PerAntenna;
  if (s == "per_bs") return netbd::PowerConstraint::Kind::PerBaseStation;
  if (s == "sum") return netbd::PowerConstraint::Kind::Sum;
  throw netbd::ConfigError("constraint: expected per_antenna, per_bs or sum");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal block-diagonalization precoding for coordinated multi-cell MIMO"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  int drops = -1;
  int workers = -1;
  auto* run = app.add_subcommand("run", "Run a Monte Carlo experiment from a config file");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--seed", seed, "Override master seed");
  run->add_option("--drops", drops, "Override drop count");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--workers", workers, "Worker threads");

  auto* validate = app.add_subcommand("validate-config", "Parse and validate a config file");
  validate->add_option("--config", config_path, "Config file")->required();

  int cluster = 3;
  int n_t = 4;
  int n_r = 2;
  int users = 0;
  std::string constraint = "per_antenna";
  double bs_power = 1.0;
  netbd::SolveOptions solve_opts;
  bool show_trace = false;
  auto* solve_one = app.add_subcommand("solve-one", "Solve one random instance");
  solve_one->add_option("--seed", seed, "Instance seed");
  solve_one->add_option("--cluster-size", cluster, "B (1, 3 or 7)");
  solve_one->add_option("--n-t", n_t, "Antennas per base station");
  solve_one->add_option("--n-r", n_r, "Antennas per user");
  solve_one->add_option("--users", users, "Scheduled users (default: floor(N_t/n_r))");
  solve_one->add_option("--constraint", constraint, "per_antenna | per_bs | sum");
  solve_one->add_option("--bs-power", bs_power, "Power budget per base station");
  solve_one->add_option("--max-iter", solve_opts.max_iter, "Iteration limit");
  solve_one->add_option("--tol-kkt", solve_opts.tol_kkt, "KKT residual tolerance");
  solve_one->add_option("--tol-gap", solve_opts.tol_gap, "Relative duality gap tolerance");
  solve_one->add_flag("--trace", show_trace, "Print every iteration");

  int points = 50;
  auto* grad = app.add_subcommand("gradient-check", "Finite-difference check of the dual gradient");
  grad->add_option("--seed", seed, "Seed");
  grad->add_option("--points", points, "Generic points per constraint kind");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*validate) {
      netbd::ExperimentConfig cfg = netbd::load_config(config_path);
      cfg.validate();
      std::cout << "config OK: " << config_path << "\n";
      return kExitOk;
    }

    if (*run) {
      netbd::ExperimentConfig cfg = netbd::load_config(config_path);
      if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
      if (drops != -1) cfg.drops = drops;
      if (workers != -1) cfg.workers = workers;
      cfg.output_dir = resolve_output_dir(out_dir, cfg.output_dir);
      cfg.validate();
      const netbd::ExperimentResult result = netbd::run_experiment(cfg);
      netbd::emit_outputs(result, cfg, cfg.output_dir);
      for (const auto& s : result.summarize()) {
        std::cout << std::left << std::setw(22) << s.scheme << " B=" << s.cluster_size
                  << "  mean=" << s.mean << "  std=" << s.stddev << "  drops=" << s.drops;
        if (s.excluded) std::cout << "  excluded=" << s.excluded;
        std::cout << "\n";
      }
      const int bad = result.nonconverged_solves();
      int solves = 0;
      for (const auto& d : result.drops) solves += d.solves;
      if (solves > 0 && bad * 100 > solves) {
        std::cerr << "warning: " << bad << " of " << solves << " solves did not converge\n";
      }
      if (result.degenerate_slots > 0) {
        std::cerr << "note: " << result.degenerate_slots << " slots had degenerate channels\n";
      }
      std::cout << "results written to " << cfg.output_dir << "\n";
      return bad > 0 ? kExitNonconverged : kExitOk;
    }

    if (*solve_one) {
      const int total = cluster * n_t;
      if (n_r < 1 || n_t < 1 || n_r > total) throw netbd::ConfigError("n_r: must be in [1, N_t]");
      if (users <= 0) users = total / n_r;
      if (users * n_r > total) throw netbd::ConfigError("users: K*n_r must not exceed N_t");
      netbd::ExperimentConfig cfg;
      cfg.n_t = n_t;
      cfg.n_r = n_r;
      cfg.bs_power = bs_power;
      const auto kind = parse_kind(constraint);
      const auto pc = cfg.make_constraint(kind, cluster);
      const auto channels = netbd::random_scheduled_channels(
          cluster, n_t, n_r, users, static_cast<std::uint64_t>(seed < 0 ? 1 : seed));
      const auto decomp = netbd::effective_channels(channels);
      const netbd::DualSolver solver(solve_opts);
      netbd::TraceSink sink;
      if (show_trace) {
        sink = [](const netbd::TraceRecord& r) {
          std::cout << "iter " << r.iteration << "  g=" << r.dual_value << "  primal=" << r.primal
                    << "  gap=" << r.gap << "  step=" << r.step << "  kkt=" << r.residual << "\n";
        };
      }
      const auto rep = solver.solve(decomp, pc, sink);
      auto conv = netbd::conventional_bd_scaled(decomp, pc);
      netbd::sum_rate(channels, conv);
      std::cout << std::setprecision(10) << "users=" << users << " N_t=" << total
                << " m_r=" << decomp.m_r << " constraint=" << pc.kind_name() << "\n"
                << "converged=" << (rep.converged ? "yes" : "no")
                << " iterations=" << rep.iterations << "\n"
                << "sum_rate_bits=" << rep.primal_rate << "\n"
                << "dual_value_bits=" << rep.dual_value << "\n"
                << "relative_gap=" << rep.relative_gap << "\n"
                << "kkt_residual=" << rep.kkt_residual << "\n"
                << "lambda=" << rep.lambda.transpose() << "\n"
                << "antenna_power=" << rep.precoders.antenna_power.transpose() << "\n"
                << conv.scheme << "_sum_rate_bits=" << conv.sum_rate << "\n";
      return rep.converged ? kExitOk : kExitNonconverged;
    }

    if (*grad) {
      const auto res = netbd::gradient_check(static_cast<std::uint64_t>(seed < 0 ? 7 : seed), points);
      std::cout << "points=" << res.points << " max_relative_error=" << std::scientific
                << res.max_relative_error << "\n";
      return res.max_relative_error <= 1e-5 ? kExitOk : kExitNonconverged;
    }
  } catch (const netbd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const netbd::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonconverged;
  }
  return kExitOk;
}
