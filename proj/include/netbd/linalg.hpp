#pragma once

#include "netbd/types.hpp"

namespace netbd::linalg {

// Hermitian part (A + A^H) / 2; removes round-off asymmetry before eigensolves.
CMatrix hermitian_part(const CMatrix& a);

// Principal square root of a Hermitian PSD matrix. Eigenvalues in
// [-clip, 0) are treated as zero; anything more negative throws
// ConvergenceQualityError.
CMatrix psd_sqrt(const CMatrix& a, double clip = 1e-6);

// A^{-1/2} for Hermitian positive definite A.
CMatrix inverse_sqrt_pd(const CMatrix& a);

// log det of a Hermitian positive definite matrix (natural log).
double log_det_pd(const CMatrix& a);

// Numerical rank using the relative singular value tolerance.
Eigen::Index numerical_rank(const CMatrix& a, double rel_tol = kRankTolerance);

}  // namespace netbd::linalg
