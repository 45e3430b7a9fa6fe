#pragma once

#include <string>
#include <vector>

#include "netbd/types.hpp"

namespace netbd {

/// Linear transmit power limits on the coordinated antenna array.
///
/// Every supported kind partitions the N_t antennas into groups with one
/// budget each: one group per antenna, one per base station (n_t contiguous
/// antennas), or a single group for the sum constraint. The dual variable
/// carries one multiplier per group.
class PowerConstraint {
 public:
  enum class Kind { PerAntenna, PerBaseStation, Sum };

  static PowerConstraint per_antenna(RVector budgets);
  static PowerConstraint per_base_station(RVector budgets, int antennas_per_bs);
  static PowerConstraint sum(double budget, int total_tx);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const RVector& budgets() const { return budgets_; }
  [[nodiscard]] int total_tx() const { return total_tx_; }
  [[nodiscard]] int num_groups() const { return static_cast<int>(budgets_.size()); }
  [[nodiscard]] int group_of(int antenna) const;
  [[nodiscard]] double total_budget() const { return budgets_.sum(); }

  // Sums per-antenna quantities within each group.
  [[nodiscard]] RVector reduce(const RVector& per_antenna) const;
  // Per-group values broadcast back onto the antennas.
  [[nodiscard]] RVector expand(const RVector& per_group) const;

  // budget - usage for each group; negative entries are violations.
  [[nodiscard]] RVector slack(const RVector& antenna_power) const;

  [[nodiscard]] std::string kind_name() const;

 private:
  PowerConstraint(Kind kind, RVector budgets, int group_width, int total_tx);

  Kind kind_;
  RVector budgets_;
  int group_width_;
  int total_tx_;
};

/// Block-diagonalization factors for one scheduled user set.
struct NullSpaceDecomp {
  int total_tx = 0;
  int n_r = 0;
  int m_r = 0;
  std::vector<CMatrix> V;       // N_t x m_r, orthonormal basis of the others' null space
  std::vector<CMatrix> G;       // n_r x m_r effective channel H_k V_k
  std::vector<CMatrix> G_pinv;  // m_r x n_r right pseudo-inverse
  std::vector<CMatrix> Q;       // N_t x n_r, V_k G_k^+

  [[nodiscard]] int num_users() const { return static_cast<int>(V.size()); }
};

struct NullSpaceBasis {
  CMatrix V;
  int m_r = 0;
};

struct PrecoderSet {
  std::vector<CMatrix> W;  // N_t x n_r per user
  RVector antenna_power;
  RVector user_rate;       // bits/s/Hz
  double sum_rate = 0.0;   // bits/s/Hz
  std::string scheme;
};

/// Orthonormal basis of the null space of all scheduled channels except
/// channels[k], from the trailing right singular vectors.
NullSpaceBasis null_space_basis(const std::vector<CMatrix>& channels, int k);

NullSpaceDecomp effective_channels(const std::vector<CMatrix>& channels);

/// q_i = max(0, mu - 1/g_i) with sum q_i = budget.
RVector waterfill(const RVector& gains, double budget);

/// Water level mu of the allocation returned by waterfill.
double water_level(const RVector& gains, double budget);

/// Water-filling BD under a sum power budget.
PrecoderSet conventional_bd(const NullSpaceDecomp& decomp, double sum_budget);

/// Conventional BD at sum budget constraint.total_budget(), then a single
/// uniform scale factor so that the tightest group meets its budget.
PrecoderSet conventional_bd_scaled(const NullSpaceDecomp& decomp,
                                   const PowerConstraint& constraint);

/// Per-user conventional BD rates (bits) straight from the Gram matrix
/// H H^H of the stacked scheduled channels, without forming null spaces.
/// Uses H_k P_k H_k^H = ([(H H^H)^{-1}]_kk)^{-1}.
RVector conventional_bd_rates_from_gram(const CMatrix& gram, int n_r, double sum_budget);

/// Per-user rates (bits) of conventional_bd_scaled for the stacked channel
/// `stacked` with Gram matrix `gram`, via H^H (H H^H)^{-1} instead of SVDs.
RVector conventional_bd_scaled_rates(const CMatrix& stacked, const CMatrix& gram, int n_r,
                                     const PowerConstraint& constraint);

RVector antenna_powers(const std::vector<CMatrix>& precoders);

/// Fills antenna_power, user_rate and sum_rate from the precoders.
double sum_rate(const std::vector<CMatrix>& channels, PrecoderSet& precoders);

/// max_{j != k} ||H_j W_k||_F / (||H_j||_F ||W_k||_F); 0 when nothing to compare.
double max_interference_ratio(const std::vector<CMatrix>& channels,
                              const std::vector<CMatrix>& precoders);

/// Multiplies all precoders by sqrt(c) where c = min_g budget_g / usage_g.
/// With allow_increase == false, c is capped at 1.
void scale_to_constraint(std::vector<CMatrix>& precoders, const PowerConstraint& constraint,
                         bool allow_increase);

}  // namespace netbd
