#include "netbd/bd_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "netbd/linalg.hpp"

namespace netbd {

// ---------------------------------------------------------------------------
// PowerConstraint

PowerConstraint::PowerConstraint(Kind kind, RVector budgets, int group_width, int total_tx)
    : kind_(kind), budgets_(std::move(budgets)), group_width_(group_width), total_tx_(total_tx) {
  if (budgets_.size() == 0) throw ConfigError("power constraint needs at least one budget");
  if ((budgets_.array() <= 0.0).any() || !budgets_.allFinite()) {
    throw ConfigError("power budgets must be positive and finite");
  }
}

PowerConstraint PowerConstraint::per_antenna(RVector budgets) {
  const int n = static_cast<int>(budgets.size());
  return PowerConstraint(Kind::PerAntenna, std::move(budgets), 1, n);
}

PowerConstraint PowerConstraint::per_base_station(RVector budgets, int antennas_per_bs) {
  if (antennas_per_bs < 1) throw ConfigError("antennas_per_bs must be >= 1");
  const int n = static_cast<int>(budgets.size()) * antennas_per_bs;
  return PowerConstraint(Kind::PerBaseStation, std::move(budgets), antennas_per_bs, n);
}

PowerConstraint PowerConstraint::sum(double budget, int total_tx) {
  if (total_tx < 1) throw ConfigError("total_tx must be >= 1");
  RVector b(1);
  b(0) = budget;
  return PowerConstraint(Kind::Sum, std::move(b), total_tx, total_tx);
}

int PowerConstraint::group_of(int antenna) const { return antenna / group_width_; }

RVector PowerConstraint::reduce(const RVector& per_antenna) const {
  RVector out = RVector::Zero(num_groups());
  for (int i = 0; i < total_tx_; ++i) out(group_of(i)) += per_antenna(i);
  return out;
}

RVector PowerConstraint::expand(const RVector& per_group) const {
  RVector out(total_tx_);
  for (int i = 0; i < total_tx_; ++i) out(i) = per_group(group_of(i));
  return out;
}

RVector PowerConstraint::slack(const RVector& antenna_power) const {
  return budgets_ - reduce(antenna_power);
}

std::string PowerConstraint::kind_name() const {
  switch (kind_) {
    case Kind::PerAntenna: return "per_antenna";
    case Kind::PerBaseStation: return "per_bs";
    case Kind::Sum: return "sum";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Null spaces

NullSpaceBasis null_space_basis(const std::vector<CMatrix>& channels, int k) {
  const int users = static_cast<int>(channels.size());
  if (k < 0 || k >= users) throw std::out_of_range("null_space_basis: user index");
  const auto n_t = channels[k].cols();
  const auto n_r = channels[k].rows();
  if (users * n_r > n_t) {
    throw ConfigError("block diagonalization needs K*n_r <= N_t");
  }
  NullSpaceBasis out;
  if (users == 1) {
    out.V = CMatrix::Identity(n_t, n_t);
    out.m_r = static_cast<int>(n_t);
    return out;
  }
  CMatrix others((users - 1) * n_r, n_t);
  for (int j = 0, row = 0; j < users; ++j) {
    if (j == k) continue;
    others.middleRows(row, n_r) = channels[j];
    row += static_cast<int>(n_r);
  }
  Eigen::JacobiSVD<CMatrix> svd(others, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const auto expected_rank = others.rows();
  if (s(0) == 0.0 || s(expected_rank - 1) <= kRankTolerance * s(0)) {
    throw DegenerateChannelError("stacked channel of the other users is rank deficient");
  }
  out.m_r = static_cast<int>(n_t - expected_rank);
  out.V = svd.matrixV().rightCols(out.m_r);
  return out;
}

NullSpaceDecomp effective_channels(const std::vector<CMatrix>& channels) {
  if (channels.empty()) throw ConfigError("no scheduled users");
  NullSpaceDecomp d;
  d.total_tx = static_cast<int>(channels.front().cols());
  d.n_r = static_cast<int>(channels.front().rows());
  for (int k = 0; k < static_cast<int>(channels.size()); ++k) {
    NullSpaceBasis basis = null_space_basis(channels, k);
    d.m_r = basis.m_r;
    CMatrix g = channels[k] * basis.V;
    Eigen::JacobiSVD<CMatrix> svd(g);
    const RVector& s = svd.singularValues();
    if (s(0) == 0.0 || s(d.n_r - 1) <= kRankTolerance * s(0)) {
      throw DegenerateChannelError("effective channel H_k V_k is row-rank deficient");
    }
    CMatrix gram = g * g.adjoint();
    CMatrix g_pinv = g.adjoint() * gram.llt().solve(CMatrix::Identity(d.n_r, d.n_r));
    d.Q.push_back(basis.V * g_pinv);
    d.V.push_back(std::move(basis.V));
    d.G.push_back(std::move(g));
    d.G_pinv.push_back(std::move(g_pinv));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Water-filling

double water_level(const RVector& gains, double budget) {
  const auto n = gains.size();
  if (n == 0) return 0.0;
  std::vector<double> inv(n);
  for (Eigen::Index i = 0; i < n; ++i) inv[i] = 1.0 / gains(i);
  std::sort(inv.begin(), inv.end());
  double prefix = std::accumulate(inv.begin(), inv.end(), 0.0);
  // Shrink the active set from the weakest channel until the level clears it.
  for (auto active = n; active >= 1; --active) {
    const double mu = (budget + prefix) / static_cast<double>(active);
    if (active == 1 || mu > inv[active - 1]) return mu;
    prefix -= inv[active - 1];
  }
  return 0.0;
}

RVector waterfill(const RVector& gains, double budget) {
  if ((gains.array() <= 0.0).any()) throw std::invalid_argument("waterfill: gains must be > 0");
  if (!(budget > 0.0)) throw std::invalid_argument("waterfill: budget must be > 0");
  const double mu = water_level(gains, budget);
  RVector q(gains.size());
  for (Eigen::Index i = 0; i < gains.size(); ++i) q(i) = std::max(0.0, mu - 1.0 / gains(i));
  return q;
}

// ---------------------------------------------------------------------------
// Conventional BD

PrecoderSet conventional_bd(const NullSpaceDecomp& decomp, double sum_budget) {
  const int users = decomp.num_users();
  std::vector<RVector> sv(users);
  std::vector<CMatrix> right(users);
  std::vector<double> all_gains;
  for (int k = 0; k < users; ++k) {
    Eigen::JacobiSVD<CMatrix> svd(decomp.G[k], Eigen::ComputeThinV);
    sv[k] = svd.singularValues();
    right[k] = svd.matrixV().leftCols(decomp.n_r);
    for (Eigen::Index j = 0; j < sv[k].size(); ++j) all_gains.push_back(sv[k](j) * sv[k](j));
  }
  const RVector q = waterfill(Eigen::Map<RVector>(all_gains.data(), all_gains.size()), sum_budget);

  PrecoderSet out;
  out.scheme = "conventional";
  for (int k = 0, idx = 0; k < users; ++k) {
    RVector theta_sqrt = q.segment(idx, decomp.n_r).cwiseSqrt();
    idx += decomp.n_r;
    out.W.push_back(decomp.V[k] * right[k] * theta_sqrt.asDiagonal());
  }
  return out;
}

PrecoderSet conventional_bd_scaled(const NullSpaceDecomp& decomp,
                                   const PowerConstraint& constraint) {
  PrecoderSet out = conventional_bd(decomp, constraint.total_budget());
  if (constraint.kind() != PowerConstraint::Kind::Sum) {
    scale_to_constraint(out.W, constraint, true);
    out.scheme = "conventional_scaled";
  }
  return out;
}

namespace {

CMatrix checked_gram_inverse(const CMatrix& gram) {
  const auto dim = gram.rows();
  Eigen::LLT<CMatrix> llt(linalg::hermitian_part(gram));
  if (llt.info() != Eigen::Success) {
    throw DegenerateChannelError("stacked channel Gram matrix is not positive definite");
  }
  // Squared pivots relative to the largest diagonal entry; the Gram matrix
  // squares the channel's condition number.
  const double diag_max = gram.diagonal().real().maxCoeff();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double pivot = llt.matrixLLT()(i, i).real();
    if (pivot * pivot <= 1e-14 * diag_max) {
      throw DegenerateChannelError("stacked channel Gram matrix is nearly singular");
    }
  }
  return llt.solve(CMatrix::Identity(dim, dim));
}

}  // namespace

RVector conventional_bd_rates_from_gram(const CMatrix& gram, int n_r, double sum_budget) {
  const auto dim = gram.rows();
  const auto users = dim / n_r;
  const CMatrix inv = checked_gram_inverse(gram);
  RVector gains(dim);
  for (Eigen::Index k = 0; k < users; ++k) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(
        linalg::hermitian_part(inv.block(k * n_r, k * n_r, n_r, n_r)), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      throw DegenerateChannelError("stacked channel Gram matrix is not positive definite");
    }
    gains.segment(k * n_r, n_r) = es.eigenvalues().cwiseInverse();
  }
  const RVector q = waterfill(gains, sum_budget);
  RVector rates = RVector::Zero(users);
  for (Eigen::Index i = 0; i < dim; ++i) rates(i / n_r) += std::log2(1.0 + gains(i) * q(i));
  return rates;
}

RVector conventional_bd_scaled_rates(const CMatrix& stacked, const CMatrix& gram, int n_r,
                                     const PowerConstraint& constraint) {
  const auto dim = gram.rows();
  const auto users = dim / n_r;
  const CMatrix inv = checked_gram_inverse(gram);
  // Columns of H^H (H H^H)^{-1} for user k span the others' null space and
  // satisfy H_k T_k = I, so unit-power beams are T_k E_k diag(e_k)^{-1/2}.
  const CMatrix t = stacked.adjoint() * inv;
  RVector gains(dim);
  RMatrix beam_power(stacked.cols(), dim);
  for (Eigen::Index k = 0; k < users; ++k) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(
        linalg::hermitian_part(inv.block(k * n_r, k * n_r, n_r, n_r)));
    const RVector& e = es.eigenvalues();
    if (e.minCoeff() <= 0.0) {
      throw DegenerateChannelError("stacked channel Gram matrix is not positive definite");
    }
    gains.segment(k * n_r, n_r) = e.cwiseInverse();
    const CMatrix beams = t.middleCols(k * n_r, n_r) * es.eigenvectors() *
                          e.cwiseInverse().cwiseSqrt().asDiagonal();
    beam_power.middleCols(k * n_r, n_r) = beams.cwiseAbs2();
  }
  const RVector q = waterfill(gains, constraint.total_budget());
  const RVector usage = constraint.reduce(beam_power * q);
  double c = std::numeric_limits<double>::infinity();
  for (int g = 0; g < constraint.num_groups(); ++g) {
    if (usage(g) > 0.0) c = std::min(c, constraint.budgets()(g) / usage(g));
  }
  if (!std::isfinite(c)) c = 1.0;
  RVector rates = RVector::Zero(users);
  for (Eigen::Index i = 0; i < dim; ++i) rates(i / n_r) += std::log2(1.0 + c * gains(i) * q(i));
  return rates;
}

// ---------------------------------------------------------------------------
// Evaluation

RVector antenna_powers(const std::vector<CMatrix>& precoders) {
  if (precoders.empty()) return {};
  RVector p = RVector::Zero(precoders.front().rows());
  for (const CMatrix& w : precoders) p += w.rowwise().squaredNorm();
  return p;
}

double sum_rate(const std::vector<CMatrix>& channels, PrecoderSet& precoders) {
  const auto users = precoders.W.size();
  precoders.user_rate = RVector::Zero(static_cast<Eigen::Index>(users));
  for (std::size_t k = 0; k < users; ++k) {
    const CMatrix hw = channels[k] * precoders.W[k];
    const CMatrix m = CMatrix::Identity(hw.rows(), hw.rows()) + hw * hw.adjoint();
    precoders.user_rate(static_cast<Eigen::Index>(k)) = nats_to_bits(linalg::log_det_pd(m));
  }
  precoders.antenna_power = antenna_powers(precoders.W);
  precoders.sum_rate = precoders.user_rate.sum();
  return precoders.sum_rate;
}

double max_interference_ratio(const std::vector<CMatrix>& channels,
                              const std::vector<CMatrix>& precoders) {
  double worst = 0.0;
  for (std::size_t j = 0; j < channels.size(); ++j) {
    for (std::size_t k = 0; k < precoders.size(); ++k) {
      if (j == k) continue;
      const double denom = channels[j].norm() * precoders[k].norm();
      if (denom == 0.0) continue;
      worst = std::max(worst, (channels[j] * precoders[k]).norm() / denom);
    }
  }
  return worst;
}

void scale_to_constraint(std::vector<CMatrix>& precoders, const PowerConstraint& constraint,
                         bool allow_increase) {
  const RVector usage = constraint.reduce(antenna_powers(precoders));
  double factor = std::numeric_limits<double>::infinity();
  for (int g = 0; g < constraint.num_groups(); ++g) {
    if (usage(g) > 0.0) factor = std::min(factor, constraint.budgets()(g) / usage(g));
  }
  if (!std::isfinite(factor)) return;
  if (!allow_increase) factor = std::min(factor, 1.0);
  const double s = std::sqrt(factor);
  for (CMatrix& w : precoders) w *= s;
}

}  // namespace netbd
