#include "netbd/dual_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "netbd/linalg.hpp"

namespace netbd {

namespace {

void check_shapes(const RVector& lambda, const NullSpaceDecomp& decomp,
                  const PowerConstraint& constraint) {
  if (lambda.size() != constraint.num_groups()) {
    throw std::invalid_argument("dual variable has the wrong number of entries");
  }
  if (constraint.total_tx() != decomp.total_tx) {
    throw ConfigError("power constraint and channels disagree on the antenna count");
  }
}

double relative_gap(double dual, double primal) { return (dual - primal) / (1.0 + primal); }

// max_g |lambda_g (usage_g - p_g)| with usage taken after the same uniform
// down-scaling recover_precoders applies.
double complementarity(const DualState& st, const PowerConstraint& constraint) {
  const RVector usage = constraint.reduce(st.antenna_power);
  const RVector& p = constraint.budgets();
  double c = 1.0;
  for (int g = 0; g < constraint.num_groups(); ++g) {
    if (usage(g) > p(g)) c = std::min(c, p(g) / usage(g));
  }
  return (st.lambda.array() * (c * usage - p).array()).abs().maxCoeff();
}

}  // namespace

DualState evaluate_dual(const RVector& lambda, const NullSpaceDecomp& decomp,
                        const PowerConstraint& constraint) {
  check_shapes(lambda, decomp, constraint);
  if ((lambda.array() < 0.0).any() || !lambda.allFinite()) {
    throw DomainError("dual variable must be finite and nonnegative");
  }
  const RVector lambda_ant = constraint.expand(lambda);
  const int n_r = decomp.n_r;

  DualState st;
  st.lambda = lambda;
  st.antenna_power = RVector::Zero(decomp.total_tx);
  double value = 0.0;
  for (int k = 0; k < decomp.num_users(); ++k) {
    const CMatrix& q = decomp.Q[k];
    const CMatrix a = linalg::hermitian_part(q.adjoint() * lambda_ant.asDiagonal() * q);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    const RVector& sigma = es.eigenvalues();
    if (!(sigma(0) > 0.0)) {
      throw DomainError("Q_k^H Lambda Q_k is not positive definite");
    }
    RVector excess(n_r);   // [sigma - 1]_+
    RVector s_eig(n_r);    // eigenvalues of S_k = M_k^{-1} - I
    for (int j = 0; j < n_r; ++j) {
      const double m = std::min(sigma(j), 1.0);
      excess(j) = sigma(j) - m;
      s_eig(j) = 1.0 / m - 1.0;
      // -log m - 1 + m, the per-eigenvalue share of -log|M| - n_r + tr M.
      value += m - 1.0 - std::log(m);
    }
    const CMatrix qu = q * es.eigenvectors();
    st.antenna_power += qu.cwiseAbs2() * s_eig;
    st.Omega.push_back(es.eigenvectors() * excess.asDiagonal() * es.eigenvectors().adjoint());
    st.U.push_back(es.eigenvectors());
    st.sigma.push_back(sigma);
  }
  st.value = value + lambda.dot(constraint.budgets());
  st.gradient = constraint.slack(st.antenna_power);
  st.kkt_residual = kkt_residual(lambda, st.gradient, constraint);
  if (!std::isfinite(st.value)) throw DomainError("dual value is not finite");
  return st;
}

double dual_value(const RVector& lambda, const NullSpaceDecomp& decomp,
                  const PowerConstraint& constraint) {
  return evaluate_dual(lambda, decomp, constraint).value;
}

RVector dual_gradient(const RVector& lambda, const NullSpaceDecomp& decomp,
                      const PowerConstraint& constraint) {
  return evaluate_dual(lambda, decomp, constraint).gradient;
}

double kkt_residual(const RVector& lambda, const RVector& gradient,
                    const PowerConstraint& constraint) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < gradient.size(); ++i) {
    r = std::max(r, std::max(-gradient(i), 0.0));
    r = std::max(r, std::abs(lambda(i) * gradient(i)));
  }
  return r / (1.0 + constraint.total_budget());
}

double kkt_residual(const RVector& lambda, const NullSpaceDecomp& decomp,
                    const PowerConstraint& constraint) {
  return evaluate_dual(lambda, decomp, constraint).kkt_residual;
}

double feasible_rate(const DualState& state, const NullSpaceDecomp& decomp,
                     const PowerConstraint& constraint) {
  const RVector usage = constraint.reduce(state.antenna_power);
  double c = 1.0;
  for (int g = 0; g < constraint.num_groups(); ++g) {
    if (usage(g) > constraint.budgets()(g)) c = std::min(c, constraint.budgets()(g) / usage(g));
  }
  double rate = 0.0;
  for (int k = 0; k < decomp.num_users(); ++k) {
    for (Eigen::Index j = 0; j < state.sigma[k].size(); ++j) {
      const double s = 1.0 / std::min(state.sigma[k](j), 1.0) - 1.0;
      rate += std::log1p(c * s);
    }
  }
  return nats_to_bits(rate);
}

PrecoderSet recover_precoders(const RVector& lambda, const NullSpaceDecomp& decomp,
                              const PowerConstraint& constraint) {
  const DualState st = evaluate_dual(lambda, decomp, constraint);
  const int n_r = decomp.n_r;
  PrecoderSet out;
  out.scheme = "optimal_" + constraint.kind_name();
  for (int k = 0; k < decomp.num_users(); ++k) {
    RVector s_eig(n_r);
    for (int j = 0; j < n_r; ++j) s_eig(j) = 1.0 / std::min(st.sigma[k](j), 1.0) - 1.0;
    const CMatrix s = st.U[k] * s_eig.asDiagonal() * st.U[k].adjoint();
    const CMatrix phi =
        linalg::hermitian_part(decomp.G_pinv[k] * s * decomp.G_pinv[k].adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(phi);
    const RVector& ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < ev.size(); ++j) {
      if (ev(j) < -1e-6 * scale) {
        throw ConvergenceQualityError("recovered covariance is not positive semidefinite");
      }
    }
    // rank(Phi_k) <= n_r: keep the n_r dominant eigenpairs (ascending order).
    RVector root = ev.tail(n_r).cwiseMax(0.0).cwiseSqrt();
    out.W.push_back(decomp.V[k] * es.eigenvectors().rightCols(n_r) * root.asDiagonal());
  }
  scale_to_constraint(out.W, constraint, false);
  return out;
}

RVector DualSolver::initial_lambda(const NullSpaceDecomp& decomp,
                                   const PowerConstraint& constraint) {
  const double v =
      static_cast<double>(decomp.num_users() * decomp.n_r) / constraint.total_budget();
  return RVector::Constant(constraint.num_groups(), v);
}

SolveReport DualSolver::solve(const NullSpaceDecomp& decomp, const PowerConstraint& constraint,
                              const TraceSink& sink) const {
  if (decomp.num_users() == 0) throw ConfigError("solve: no scheduled users");
  if (options_.max_iter < 1) throw ConfigError("max_iter must be >= 1");

  std::mt19937_64 rng(options_.perturbation_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SolveReport rep;
  RVector lambda = initial_lambda(decomp, constraint);
  DualState st = evaluate_dual(lambda, decomp, constraint);

  RVector prev_lambda;
  RVector prev_grad;
  double step = 1.0 / std::max(st.gradient.cwiseAbs().maxCoeff(), 1e-12) *
                std::max(lambda.maxCoeff(), 1e-12);
  double last_step = 0.0;

  for (int it = 0;; ++it) {
    const double primal = feasible_rate(st, decomp, constraint);
    const double dual_bits = nats_to_bits(st.value);
    TraceRecord rec{it, dual_bits, primal, dual_bits - primal, last_step, st.kkt_residual};
    rep.trace.push_back(rec);
    if (sink) sink(rec);
    rep.iterations = it;

    if (st.kkt_residual <= options_.tol_kkt &&
        complementarity(st, constraint) <= options_.tol_kkt &&
        relative_gap(dual_bits, primal) <= options_.tol_gap) {
      rep.converged = true;
      break;
    }
    if (it >= options_.max_iter) break;

    // Barzilai-Borwein trial step, then projected Armijo backtracking.
    if (prev_lambda.size() > 0) {
      const RVector s = lambda - prev_lambda;
      const RVector y = st.gradient - prev_grad;
      const double sy = s.dot(y);
      if (sy > 0.0) step = (it % 2 == 0) ? s.squaredNorm() / sy : sy / y.squaredNorm();
      else step *= 2.0;
    }
    step = std::clamp(step, 1e-20, 1e20);

    bool accepted = false;
    DualState next;
    RVector trial;
    for (int bt = 0; bt < 200; ++bt) {
      trial = (lambda - step * st.gradient).cwiseMax(0.0);
      const double move = (trial - lambda).cwiseAbs().maxCoeff();
      if (move <= 1e-15 * (1.0 + lambda.cwiseAbs().maxCoeff())) break;
      try {
        next = evaluate_dual(trial, decomp, constraint);
      } catch (const DomainError&) {
        step *= options_.shrink;
        continue;
      }
      if (next.value <= st.value + options_.armijo * st.gradient.dot(trial - lambda)) {
        accepted = true;
        break;
      }
      step *= options_.shrink;
    }

    if (!accepted) {
      if (rep.perturbations >= options_.max_perturbations) break;
      ++rep.perturbations;
      RVector bumped = lambda;
      for (Eigen::Index i = 0; i < bumped.size(); ++i) {
        bumped(i) += 1e-8 * unit(rng) * (1.0 + lambda(i));
      }
      try {
        next = evaluate_dual(bumped, decomp, constraint);
      } catch (const DomainError&) {
        break;
      }
      trial = bumped;
      prev_lambda.resize(0);
      step = 1.0 / std::max(next.gradient.cwiseAbs().maxCoeff(), 1e-12) *
             std::max(trial.maxCoeff(), 1e-12);
    } else {
      prev_lambda = lambda;
      prev_grad = st.gradient;
    }
    last_step = step;
    lambda = trial;
    st = std::move(next);
  }

  rep.lambda = lambda;
  rep.kkt_residual = st.kkt_residual;
  rep.precoders = recover_precoders(lambda, decomp, constraint);
  // Rates are recomputed from G_k because the scheduled channels are not
  // part of the decomposition; H_k V_k = G_k and V_k^H W_k carries Psi_k.
  PrecoderSet& pre = rep.precoders;
  pre.user_rate = RVector::Zero(decomp.num_users());
  for (int k = 0; k < decomp.num_users(); ++k) {
    const CMatrix hw = decomp.G[k] * (decomp.V[k].adjoint() * pre.W[k]);
    const CMatrix m = CMatrix::Identity(hw.rows(), hw.rows()) + hw * hw.adjoint();
    pre.user_rate(k) = nats_to_bits(linalg::log_det_pd(m));
  }
  pre.sum_rate = pre.user_rate.sum();
  pre.antenna_power = antenna_powers(pre.W);
  rep.primal_rate = pre.sum_rate;
  rep.dual_value = nats_to_bits(st.value);
  rep.gap = rep.dual_value - rep.primal_rate;
  rep.relative_gap = relative_gap(rep.dual_value, rep.primal_rate);
  return rep;
}

}  // namespace netbd
