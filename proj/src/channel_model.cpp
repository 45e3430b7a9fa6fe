#include "netbd/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netbd/linalg.hpp"

namespace netbd {

namespace {

struct Axial {
  int q;
  int r;
  bool operator==(const Axial&) const = default;
};

int hex_distance(Axial a, Axial b) {
  const int dq = a.q - b.q;
  const int dr = a.r - b.r;
  return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) / 2;
}

Point axial_to_point(Axial a, double radius) {
  return {1.5 * radius * a.q, std::sqrt(3.0) * radius * (a.r + 0.5 * a.q)};
}

std::vector<Axial> hex_ball(Axial center, int radius) {
  std::vector<Axial> out;
  for (int dq = -radius; dq <= radius; ++dq) {
    for (int dr = -radius; dr <= radius; ++dr) {
      const Axial c{center.q + dq, center.r + dr};
      if (hex_distance(c, center) <= radius) out.push_back(c);
    }
  }
  return out;
}

bool contains(const std::vector<Axial>& cells, Axial a) {
  return std::find(cells.begin(), cells.end(), a) != cells.end();
}

// Cells within `tiers` rings of any cluster cell, excluding the cluster.
std::vector<Axial> surrounding_tiers(const std::vector<Axial>& cluster, int tiers) {
  std::vector<Axial> out;
  for (const Axial& c : cluster) {
    for (const Axial& n : hex_ball(c, tiers)) {
      if (!contains(cluster, n) && !contains(out, n)) out.push_back(n);
    }
  }
  return out;
}

std::complex<double> complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace

void FadingParams::validate() const {
  if (!(path_loss_exponent > 2.0)) {
    throw ConfigError("path_loss_exponent must be > 2");
  }
  if (!(shadowing_std_db >= 0.0)) throw ConfigError("shadowing_std_db must be >= 0");
  if (!(cell_radius_km > 0.0)) throw ConfigError("cell_radius_km must be > 0");
  if (!(min_distance_km > 0.0)) throw ConfigError("min_distance_km must be > 0");
}

CellLayout build_layout(int cluster_size, double cell_radius_km) {
  if (cluster_size != 1 && cluster_size != 3 && cluster_size != 7) {
    throw ConfigError("cluster_size must be 1, 3 or 7 (got " + std::to_string(cluster_size) +
                      ")");
  }
  if (!(cell_radius_km > 0.0)) throw ConfigError("cell_radius_km must be > 0");

  std::vector<Axial> cells;
  std::vector<int> cluster_ids;
  if (cluster_size == 7) {
    const std::vector<Axial> cluster = hex_ball({0, 0}, 1);
    cells = cluster;
    cluster_ids.assign(cells.size(), 0);
    // Cluster centers of the 7-cell tiling, one wrap-around ring.
    Axial shift{2, 1};
    for (int c = 1; c <= 6; ++c) {
      for (const Axial& a : hex_ball(shift, 1)) {
        cells.push_back(a);
        cluster_ids.push_back(c);
      }
      shift = Axial{-shift.r, shift.q + shift.r};  // rotate by 60 degrees
    }
  } else {
    const std::vector<Axial> cluster =
        cluster_size == 1 ? std::vector<Axial>{{0, 0}} : std::vector<Axial>{{0, 0}, {1, 0}, {0, 1}};
    cells = cluster;
    cluster_ids.assign(cells.size(), 0);
    int next = 1;
    for (const Axial& a : surrounding_tiers(cluster, 2)) {
      cells.push_back(a);
      cluster_ids.push_back(next++);
    }
  }

  CellLayout layout;
  layout.cluster_size = cluster_size;
  layout.cell_radius_km = cell_radius_km;
  Point centroid{0.0, 0.0};
  for (int i = 0; i < cluster_size; ++i) {
    const Point p = axial_to_point(cells[i], cell_radius_km);
    centroid[0] += p[0] / cluster_size;
    centroid[1] += p[1] / cluster_size;
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Point p = axial_to_point(cells[i], cell_radius_km);
    layout.cell_centers.push_back({p[0] - centroid[0], p[1] - centroid[1]});
    layout.cluster_of_cell.push_back(cluster_ids[i]);
    if (cluster_ids[i] != 0) layout.interferer_cells.push_back(static_cast<int>(i));
  }
  return layout;
}

bool inside_hexagon(const Point& p, const Point& center, double radius_km) {
  const double x = std::abs(p[0] - center[0]);
  const double y = std::abs(p[1] - center[1]);
  const double s3 = std::sqrt(3.0);
  return y <= 0.5 * s3 * radius_km && s3 * x + y <= s3 * radius_km;
}

UserDrop drop_users(const CellLayout& layout, int users_per_cell, std::uint64_t seed) {
  if (users_per_cell < 1) throw ConfigError("users_per_cell must be >= 1");
  UserDrop drop;
  drop.seed = seed;
  std::mt19937_64 rng(seed);
  const double r = layout.cell_radius_km;
  std::uniform_real_distribution<double> ux(-r, r);
  std::uniform_real_distribution<double> uy(-0.5 * std::sqrt(3.0) * r, 0.5 * std::sqrt(3.0) * r);
  for (int cell = 0; cell < layout.cluster_size; ++cell) {
    const Point& c = layout.cell_centers[cell];
    for (int u = 0; u < users_per_cell; ++u) {
      Point p;
      do {
        p = {c[0] + ux(rng), c[1] + uy(rng)};
      } while (!inside_hexagon(p, c, r));
      drop.positions.push_back(p);
      drop.home_cell.push_back(cell);
    }
  }
  return drop;
}

double distance_km(const Point& a, const Point& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

LargeScaleGains draw_large_scale(const CellLayout& layout, const UserDrop& drop,
                                 const FadingParams& fading, std::mt19937_64& rng) {
  fading.validate();
  std::normal_distribution<double> shadow_db(0.0, fading.shadowing_std_db);
  const double gamma = std::pow(10.0, fading.reference_snr_db / 10.0);
  LargeScaleGains out;
  out.gain.resize(drop.num_users(), layout.num_cells());
  for (int k = 0; k < drop.num_users(); ++k) {
    for (int b = 0; b < layout.num_cells(); ++b) {
      const double d =
          std::max(distance_km(drop.positions[k], layout.cell_centers[b]), fading.min_distance_km);
      const double rho =
          fading.shadowing_std_db > 0.0 ? std::pow(10.0, shadow_db(rng) / 10.0) : 1.0;
      out.gain(k, b) =
          rho * std::pow(d / fading.cell_radius_km, -fading.path_loss_exponent) * gamma;
    }
  }
  return out;
}

ChannelSet draw_small_scale(const CellLayout& layout, const LargeScaleGains& gains, int n_t,
                            int n_r, std::mt19937_64& rng) {
  if (n_t < 1 || n_r < 1) throw ConfigError("antenna counts must be >= 1");
  ChannelSet cs;
  cs.cluster_size = layout.cluster_size;
  cs.n_t = n_t;
  cs.n_r = n_r;
  const int users = static_cast<int>(gains.gain.rows());
  auto draw_block = [&](int k, int b) {
    CMatrix h(n_r, n_t);
    const double amp = std::sqrt(gains.gain(k, b));
    for (int t = 0; t < n_t; ++t) {
      for (int r = 0; r < n_r; ++r) h(r, t) = complex_gaussian(rng) * amp;
    }
    return h;
  };
  for (int k = 0; k < users; ++k) {
    CMatrix agg(n_r, cs.total_tx());
    for (int b = 0; b < layout.cluster_size; ++b) agg.middleCols(b * n_t, n_t) = draw_block(k, b);
    cs.aggregate.push_back(std::move(agg));
    std::vector<CMatrix> interf;
    interf.reserve(layout.interferer_cells.size());
    for (int cell : layout.interferer_cells) interf.push_back(draw_block(k, cell));
    cs.interferers.push_back(std::move(interf));
  }
  return cs;
}

ChannelSet generate_channels(const CellLayout& layout, const UserDrop& drop,
                             const FadingParams& fading, int n_t, int n_r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const LargeScaleGains gains = draw_large_scale(layout, drop, fading, rng);
  return draw_small_scale(layout, gains, n_t, n_r, rng);
}

ChannelSet whiten_interference(const ChannelSet& channels, const RVector& per_antenna_budget) {
  if (per_antenna_budget.size() != channels.n_t) {
    throw ConfigError("whitening budget must have one entry per BS antenna");
  }
  if ((per_antenna_budget.array() <= 0.0).any()) {
    throw ConfigError("whitening budgets must be positive");
  }
  ChannelSet out = channels;
  out.interferers.clear();
  out.whitened = true;
  if (channels.interferers.empty()) return out;
  for (int k = 0; k < channels.num_users(); ++k) {
    CMatrix r = CMatrix::Identity(channels.n_r, channels.n_r);
    for (const CMatrix& h : channels.interferers[k]) {
      r.noalias() += h * per_antenna_budget.asDiagonal() * h.adjoint();
    }
    out.aggregate[k] = linalg::inverse_sqrt_pd(r) * channels.aggregate[k];
  }
  return out;
}

}  // namespace netbd
