#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "netbd/bd_core.hpp"
#include "netbd/types.hpp"

namespace netbd {

/// Lagrange dual of the block-diagonalization throughput problem, evaluated
/// at one multiplier vector.
///
/// `lambda` holds one multiplier per constraint group; the antenna-level
/// diagonal is constraint.expand(lambda). For each user the Hermitian
/// eigendecomposition Q_k^H Lambda Q_k = U_k diag(sigma_k) U_k^H gives the
/// slack matrix Omega_k = U_k [sigma_k - 1]_+ U_k^H, so that
/// M_k = Q_k^H Lambda Q_k - Omega_k has eigenvalues min(sigma, 1).
struct DualState {
  RVector lambda;
  std::vector<CMatrix> U;       // eigenvectors of Q_k^H Lambda Q_k
  std::vector<RVector> sigma;   // eigenvalues, ascending
  std::vector<CMatrix> Omega;
  double value = 0.0;           // g(Lambda), nats
  RVector gradient;             // one entry per group
  RVector antenna_power;        // diag(sum_k Q_k S_k Q_k^H) at S_k = M_k^{-1} - I
  double kkt_residual = 0.0;
};

/// Throws DomainError unless every Q_k^H Lambda Q_k is positive definite.
DualState evaluate_dual(const RVector& lambda, const NullSpaceDecomp& decomp,
                        const PowerConstraint& constraint);

double dual_value(const RVector& lambda, const NullSpaceDecomp& decomp,
                  const PowerConstraint& constraint);

/// Gradient of g with respect to the per-group multipliers: budgets plus
/// sum_k diag(Q_k Q_k^H) minus sum_k diag(Q_k M_k^{-1} Q_k^H), reduced per group.
RVector dual_gradient(const RVector& lambda, const NullSpaceDecomp& decomp,
                      const PowerConstraint& constraint);

/// max(max_g(-grad_g, 0), max_g |lambda_g grad_g|) / (1 + total budget).
double kkt_residual(const RVector& lambda, const RVector& gradient,
                    const PowerConstraint& constraint);
double kkt_residual(const RVector& lambda, const NullSpaceDecomp& decomp,
                    const PowerConstraint& constraint);

/// Precoders W_k = V_k Psi_k with Psi_k Psi_k^H = G_k^+ S_k (G_k^+)^H and
/// S_k = M_k^{-1} - I. A final uniform down-scaling removes any residual
/// budget overshoot left by the stopping tolerance.
PrecoderSet recover_precoders(const RVector& lambda, const NullSpaceDecomp& decomp,
                              const PowerConstraint& constraint);

struct SolveOptions {
  int max_iter = 500;
  double tol_kkt = 1e-6;
  double tol_gap = 1e-5;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_perturbations = 3;
  std::uint64_t perturbation_seed = 0x5eed;
};

/// One projected-gradient iteration. Rates in bits/s/Hz; `primal` is the
/// rate of the precoders recovered at the iterate after uniform scaling
/// into the feasible set.
struct TraceRecord {
  int iteration = 0;
  double dual_value = 0.0;
  double primal = 0.0;
  double gap = 0.0;
  double step = 0.0;
  double residual = 0.0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

struct SolveReport {
  RVector lambda;
  PrecoderSet precoders;
  double primal_rate = 0.0;  // bits
  double dual_value = 0.0;   // bits
  double gap = 0.0;          // bits
  double relative_gap = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  int perturbations = 0;
  bool converged = false;
  std::vector<TraceRecord> trace;
};

/// Projected gradient descent on g over the nonnegative orthant.
class DualSolver {
 public:
  explicit DualSolver(SolveOptions options = {}) : options_(options) {}

  [[nodiscard]] const SolveOptions& options() const { return options_; }

  SolveReport solve(const NullSpaceDecomp& decomp, const PowerConstraint& constraint,
                    const TraceSink& sink = {}) const;

  static RVector initial_lambda(const NullSpaceDecomp& decomp, const PowerConstraint& constraint);

 private:
  SolveOptions options_;
};

/// Achievable rate (bits) at the dual iterate after uniform scaling into the
/// feasible set, computed from the cached eigenvalues.
double feasible_rate(const DualState& state, const NullSpaceDecomp& decomp,
                     const PowerConstraint& constraint);

}  // namespace netbd
