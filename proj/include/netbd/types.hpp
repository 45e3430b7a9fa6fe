#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace netbd {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Singular values at or below this fraction of the largest one count as zero.
inline constexpr double kRankTolerance = 1e-10;

inline constexpr double kLn2 = 0.69314718055994530942;

inline double nats_to_bits(double nats) { return nats / kLn2; }

/// Invalid experiment or solver configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A channel matrix that should be full rank is not (within kRankTolerance).
class DegenerateChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dual variable outside the domain where Q_k^H Lambda Q_k is positive definite.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Recovered transmit covariance has a clearly negative eigenvalue.
class ConvergenceQualityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace netbd
