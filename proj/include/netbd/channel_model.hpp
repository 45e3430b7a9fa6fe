#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "netbd/types.hpp"

namespace netbd {

using Point = std::array<double, 2>;  // km

/// Large-scale propagation parameters. Gains are expressed in the
/// noise-normalized domain, so the reference SNR carries the transmit power
/// scale.
struct FadingParams {
  double path_loss_exponent = 3.8;
  double shadowing_std_db = 8.0;
  double reference_snr_db = 20.0;
  double cell_radius_km = 1.0;
  double min_distance_km = 0.035;

  void validate() const;
};

/// Flat-top hexagonal cells. Cells [0, cluster_size) form the analyzed
/// cluster, whose centroid sits at the origin; every other cell is an
/// interferer transmitting at full power.
struct CellLayout {
  int cluster_size = 1;
  double cell_radius_km = 1.0;
  std::vector<Point> cell_centers;
  std::vector<int> cluster_of_cell;  // 0 for the analyzed cluster
  std::vector<int> interferer_cells;

  [[nodiscard]] int num_cells() const { return static_cast<int>(cell_centers.size()); }
};

struct UserDrop {
  std::vector<Point> positions;
  std::vector<int> home_cell;
  std::uint64_t seed = 0;

  [[nodiscard]] int num_users() const { return static_cast<int>(positions.size()); }
};

/// Per-user channels. aggregate[k] is n_r x (B n_t), the concatenation of the
/// per-BS blocks of the analyzed cluster. interferers[k][j] is the n_r x n_t
/// channel from layout.interferer_cells[j]. After whitening, aggregate holds
/// R_k^{-1/2} H_k and interferers is empty.
struct ChannelSet {
  int cluster_size = 1;
  int n_t = 1;
  int n_r = 1;
  std::vector<CMatrix> aggregate;
  std::vector<std::vector<CMatrix>> interferers;
  bool whitened = false;

  [[nodiscard]] int total_tx() const { return cluster_size * n_t; }
  [[nodiscard]] int num_users() const { return static_cast<int>(aggregate.size()); }
  [[nodiscard]] CMatrix block(int user, int bs) const {
    return aggregate[user].middleCols(bs * n_t, n_t);
  }
};

/// Mean channel power per antenna pair, (user, cell) -> rho * (d/d0)^-beta * Gamma.
/// Drawn once per drop; the small-scale Rayleigh term is redrawn per slot.
struct LargeScaleGains {
  RMatrix gain;  // users x layout cells
};

CellLayout build_layout(int cluster_size, double cell_radius_km = 1.0);

bool inside_hexagon(const Point& p, const Point& center, double radius_km);

UserDrop drop_users(const CellLayout& layout, int users_per_cell, std::uint64_t seed);

double distance_km(const Point& a, const Point& b);

LargeScaleGains draw_large_scale(const CellLayout& layout, const UserDrop& drop,
                                 const FadingParams& fading, std::mt19937_64& rng);

ChannelSet draw_small_scale(const CellLayout& layout, const LargeScaleGains& gains, int n_t,
                            int n_r, std::mt19937_64& rng);

ChannelSet generate_channels(const CellLayout& layout, const UserDrop& drop,
                             const FadingParams& fading, int n_t, int n_r, std::uint64_t seed);

/// Worst-case inter-cluster whitening: every interfering BS transmits with
/// diag(per_antenna_budget) (length n_t).
ChannelSet whiten_interference(const ChannelSet& channels, const RVector& per_antenna_budget);

}  // namespace netbd
