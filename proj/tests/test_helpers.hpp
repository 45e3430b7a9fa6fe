#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "netbd/types.hpp"

namespace netbd::testing {

// i.i.d. CN(0, 1) matrix.
inline CMatrix random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = {n(rng), n(rng)};
  }
  return m;
}

inline std::vector<CMatrix> random_channels(int users, int n_r, int total_tx, std::uint64_t seed,
                                            double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::vector<CMatrix> out;
  for (int k = 0; k < users; ++k) out.push_back(scale * random_complex(n_r, total_tx, rng));
  return out;
}

// Random Hermitian PSD matrix of the given rank.
inline CMatrix random_psd(Eigen::Index dim, Eigen::Index rank, std::mt19937_64& rng) {
  const CMatrix a = random_complex(dim, rank, rng);
  return a * a.adjoint();
}

}  // namespace netbd::testing
