#include "rtcur/linalg.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "rtcur/error.hpp"

namespace rtcur {

Matrix TruncatedSvd::reconstruct() const {
  return left * singulars.asDiagonal() * right.transpose();
}

TruncatedSvd truncated_svd(const Matrix& m, Eigen::Index r) {
  const Eigen::Index min_dim = std::min(m.rows(), m.cols());
  if (r < 1 || r > min_dim) {
    throw RankError("requested rank " + std::to_string(r) + " outside [1, " +
                    std::to_string(min_dim) + "]");
  }
  TruncatedSvd out;
  // Strongly rectangular input: SVD of the square triangular QR factor.
  if (m.cols() > 2 * m.rows() || m.rows() > 2 * m.cols()) {
    const bool wide = m.cols() > m.rows();
    Eigen::HouseholderQR<Matrix> qr(wide ? Matrix(m.transpose()) : m);
    const Eigen::Index k = min_dim;
    const Matrix rt = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Eigen::BDCSVD<Matrix> small(rt, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.singulars = small.singularValues().head(r);
    Matrix lifted = Matrix::Zero(qr.rows(), r);
    lifted.topRows(k) = small.matrixU().leftCols(r);
    lifted.applyOnTheLeft(qr.householderQ());
    if (wide) {  // m = R^T Q^T = V_s S (Q U_s)^T
      out.left = small.matrixV().leftCols(r);
      out.right = std::move(lifted);
    } else {
      out.left = std::move(lifted);
      out.right = small.matrixV().leftCols(r);
    }
    return out;
  }
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.left = svd.matrixU().leftCols(r);
  out.singulars = svd.singularValues().head(r);
  out.right = svd.matrixV().leftCols(r);
  return out;
}

double default_pinv_tolerance(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

Matrix pinv_from_svd(const TruncatedSvd& svd, double tol) {
  Matrix out = Matrix::Zero(svd.cols(), svd.rows());
  if (svd.rank() == 0) return out;
  const double cutoff = tol * svd.singulars(0);
  for (Eigen::Index j = 0; j < svd.rank(); ++j) {
    const double s = svd.singulars(j);
    if (s > cutoff && s > 0.0) {
      out.noalias() += (svd.right.col(j) / s) * svd.left.col(j).transpose();
    }
  }
  return out;
}

Matrix pinv_from_svd(const TruncatedSvd& svd) {
  return pinv_from_svd(svd, default_pinv_tolerance(svd.rows(), svd.cols()));
}

ThinQr thin_qr(const Matrix& m) {
  if (m.rows() < m.cols()) {
    throw ShapeError("thin QR needs rows >= cols, got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
  Eigen::HouseholderQR<Matrix> qr(m);
  ThinQr out;
  out.q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  out.r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  return out;
}

}  // namespace rtcur
