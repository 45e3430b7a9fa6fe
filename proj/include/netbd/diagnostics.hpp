#pragma once

#include <cstdint>
#include <vector>

#include "netbd/bd_core.hpp"
#include "netbd/channel_model.hpp"

namespace netbd {

/// Whitened channels of `users` randomly chosen users from one cellular drop
/// (default fading parameters), ready for effective_channels().
std::vector<CMatrix> random_scheduled_channels(int cluster_size, int n_t, int n_r, int users,
                                               std::uint64_t seed);

/// Random dual point around the solver's starting value whose eigenvalues
/// all stay at least `margin` (relative) away from 1, so g is smooth nearby.
RVector generic_dual_point(const NullSpaceDecomp& decomp, const PowerConstraint& constraint,
                           std::uint64_t seed, double margin = 1e-3);

/// Central finite differences of dual_value, one group at a time.
RVector finite_difference_gradient(const RVector& lambda, const NullSpaceDecomp& decomp,
                                   const PowerConstraint& constraint, double eps = 1e-6);

struct GradientCheckResult {
  int points = 0;
  double max_relative_error = 0.0;  // max |fd - analytic| / (1 + |analytic|)
};

/// Compares dual_gradient with central differences at `points` generic
/// points for each of the three constraint kinds.
GradientCheckResult gradient_check(std::uint64_t seed, int points);

}  // namespace netbd
