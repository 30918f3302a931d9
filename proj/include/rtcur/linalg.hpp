#pragma once

#include "rtcur/tensor.hpp"

namespace rtcur {

/// Rank-r truncated singular value decomposition M ~ left * diag(singulars) * right^T.
struct TruncatedSvd {
  Matrix left;       // m x r, orthonormal columns
  Vector singulars;  // r values, nonincreasing
  Matrix right;      // p x r, orthonormal columns

  Eigen::Index rank() const { return singulars.size(); }
  Eigen::Index rows() const { return left.rows(); }
  Eigen::Index cols() const { return right.rows(); }
  Matrix reconstruct() const;
};

TruncatedSvd truncated_svd(const Matrix& m, Eigen::Index r);

/// max(rows, cols) * machine epsilon.
double default_pinv_tolerance(Eigen::Index rows, Eigen::Index cols);

/// right * diag(1/sigma_j) * left^T, keeping only sigma_j > tol * sigma_1.
/// All-zero spectra give the zero matrix.
Matrix pinv_from_svd(const TruncatedSvd& svd, double tol);
Matrix pinv_from_svd(const TruncatedSvd& svd);

struct ThinQr {
  Matrix q;  // m x n, orthonormal columns
  Matrix r;  // n x n, upper triangular
};

/// Householder thin QR; requires rows >= cols.
ThinQr thin_qr(const Matrix& m);

}  // namespace rtcur
