#include "netbd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "netbd/dual_optimizer.hpp"

namespace netbd {

std::vector<CMatrix> random_scheduled_channels(int cluster_size, int n_t, int n_r, int users,
                                               std::uint64_t seed) {
  const CellLayout layout = build_layout(cluster_size);
  const int per_cell = std::max(1, (users + cluster_size - 1) / cluster_size);
  std::mt19937_64 rng(seed);
  const UserDrop drop = drop_users(layout, per_cell, rng());
  const ChannelSet raw = generate_channels(layout, drop, FadingParams{}, n_t, n_r, rng());
  const ChannelSet ch = whiten_interference(raw, RVector::Constant(n_t, 1.0 / n_t));
  std::vector<int> idx(ch.num_users());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<CMatrix> out;
  for (int i = 0; i < users; ++i) out.push_back(ch.aggregate[idx[i]]);
  return out;
}

RVector generic_dual_point(const NullSpaceDecomp& decomp, const PowerConstraint& constraint,
                           std::uint64_t seed, double margin) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const RVector base = DualSolver::initial_lambda(decomp, constraint);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    RVector lambda(base.size());
    for (Eigen::Index i = 0; i < base.size(); ++i) lambda(i) = base(i) * std::exp(u(rng));
    try {
      const DualState st = evaluate_dual(lambda, decomp, constraint);
      bool smooth = true;
      for (const RVector& s : st.sigma) {
        for (Eigen::Index j = 0; j < s.size(); ++j) {
          if (std::abs(s(j) - 1.0) < margin) smooth = false;
        }
      }
      if (smooth) return lambda;
    } catch (const DomainError&) {
    }
  }
  throw std::runtime_error("generic_dual_point: no smooth point found");
}

RVector finite_difference_gradient(const RVector& lambda, const NullSpaceDecomp& decomp,
                                   const PowerConstraint& constraint, double eps) {
  RVector fd(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    RVector up = lambda;
    RVector down = lambda;
    up(i) += eps;
    down(i) -= eps;
    fd(i) = (dual_value(up, decomp, constraint) - dual_value(down, decomp, constraint)) / (2 * eps);
  }
  return fd;
}

GradientCheckResult gradient_check(std::uint64_t seed, int points) {
  GradientCheckResult res;
  std::mt19937_64 rng(seed);
  const int clusters[] = {1, 3};
  const int tx[] = {2, 4};
  const int rx[] = {1, 2};
  for (int p = 0; p < points; ++p) {
    const int b = clusters[p % 2];
    const int n_t = tx[(p / 2) % 2];
    const int n_r = rx[(p / 4) % 2];
    const int total = b * n_t;
    const int k_max = total / n_r;
    const int users = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(k_max));
    NullSpaceDecomp decomp;
    try {
      decomp = effective_channels(random_scheduled_channels(b, n_t, n_r, users, rng()));
    } catch (const DegenerateChannelError&) {
      --p;
      continue;
    }
    const double bs_power = 1.0;
    const PowerConstraint kinds[] = {
        PowerConstraint::per_antenna(RVector::Constant(total, bs_power / n_t)),
        PowerConstraint::per_base_station(RVector::Constant(b, bs_power), n_t),
        PowerConstraint::sum(bs_power * b, total)};
    for (const PowerConstraint& c : kinds) {
      const RVector lambda = generic_dual_point(decomp, c, rng());
      const RVector analytic = dual_gradient(lambda, decomp, c);
      const RVector fd = finite_difference_gradient(lambda, decomp, c);
      for (Eigen::Index i = 0; i < fd.size(); ++i) {
        res.max_relative_error = std::max(
            res.max_relative_error, std::abs(fd(i) - analytic(i)) / (1.0 + std::abs(analytic(i))));
      }
      ++res.points;
    }
  }
  return res;
}

}  // namespace netbd
