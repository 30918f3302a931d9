#pragma once

// Hand-rolled generators and brute-force reference implementations shared by
// the unit and acceptance tests. Nothing here calls the library's own
// unfolding, product or decomposition code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "rtcur/tensor.hpp"

namespace testing {

using rtcur::DenseTensor;
using rtcur::Dims;
using rtcur::Matrix;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t size(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  double real(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double normal() { return std::normal_distribution<double>()(rng_); }
  // Small integers keep sums of products exact in double precision.
  double small_int() { return static_cast<double>(static_cast<int>(size(0, 14)) - 7); }

  Dims dims(std::size_t max_order, std::size_t max_dim) {
    Dims d(size(1, max_order));
    for (auto& v : d) v = size(1, max_dim);
    return d;
  }

  DenseTensor tensor(const Dims& dims) {
    DenseTensor t(dims);
    for (auto& v : t.data()) v = normal();
    return t;
  }
  DenseTensor int_tensor(const Dims& dims) {
    DenseTensor t(dims);
    for (auto& v : t.data()) v = small_int();
    return t;
  }

  Matrix matrix(std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = normal();
    }
    return m;
  }

  // Sorted distinct subset of [0, n) with `count` elements.
  std::vector<std::size_t> subset(std::size_t n, std::size_t count) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng_);
    all.resize(count);
    std::sort(all.begin(), all.end());
    return all;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Odometer over all multi-indices of `dims`, first index fastest.
inline std::vector<std::vector<std::size_t>> all_indices(const Dims& dims) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> idx(dims.size(), 0);
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  for (std::size_t e = 0; e < total; ++e) {
    out.push_back(idx);
    for (std::size_t m = 0; m < dims.size(); ++m) {
      if (++idx[m] < dims[m]) break;
      idx[m] = 0;
    }
  }
  return out;
}

inline std::size_t linear(const Dims& dims, const std::vector<std::size_t>& idx) {
  std::size_t pos = 0, stride = 1;
  for (std::size_t m = 0; m < dims.size(); ++m) {
    pos += idx[m] * stride;
    stride *= dims[m];
  }
  return pos;
}

// Column of (i_1..i_n) in the mode-k unfolding, straight from the formula.
inline std::size_t unfold_col(const Dims& dims, const std::vector<std::size_t>& idx, int mode) {
  const std::size_t k = static_cast<std::size_t>(mode - 1);
  std::size_t col = 0;
  for (std::size_t m = 0; m < dims.size(); ++m) {
    if (m == k) continue;
    std::size_t stride = 1;
    for (std::size_t l = 0; l < m; ++l) {
      if (l != k) stride *= dims[l];
    }
    col += idx[m] * stride;
  }
  return col;
}

inline Matrix naive_unfold(const DenseTensor& x, int mode) {
  const Dims& dims = x.dims();
  const std::size_t k = static_cast<std::size_t>(mode - 1);
  Matrix out(dims[k], x.size() / dims[k]);
  for (const auto& idx : all_indices(dims)) {
    out(idx[k], unfold_col(dims, idx, mode)) = x[linear(dims, idx)];
  }
  return out;
}

// Y(i_1..j..i_n) = sum_s A(j, s) X(i_1..s..i_n).
inline DenseTensor naive_mode_product(const DenseTensor& x, const Matrix& a, int mode) {
  const std::size_t k = static_cast<std::size_t>(mode - 1);
  Dims out_dims = x.dims();
  out_dims[k] = static_cast<std::size_t>(a.rows());
  DenseTensor y(out_dims);
  for (const auto& idx : all_indices(out_dims)) {
    double acc = 0.0;
    auto src = idx;
    for (std::size_t s = 0; s < x.dims()[k]; ++s) {
      src[k] = s;
      acc += a(idx[k], s) * x[linear(x.dims(), src)];
    }
    y[linear(out_dims, idx)] = acc;
  }
  return y;
}

inline DenseTensor naive_subtensor(const DenseTensor& x, const rtcur::IndexSets& sets) {
  Dims d;
  for (const auto& s : sets) d.push_back(s.size());
  DenseTensor out(d);
  for (const auto& a : all_indices(d)) {
    std::vector<std::size_t> src(a.size());
    for (std::size_t m = 0; m < a.size(); ++m) src[m] = sets[m][a[m]];
    out[linear(d, a)] = x[linear(x.dims(), src)];
  }
  return out;
}

// Tucker tensor core x_1 U_1 ... x_n U_n with Gaussian pieces, built with the
// naive product.
inline DenseTensor tucker(Gen& g, const Dims& dims, const std::vector<std::size_t>& ranks) {
  DenseTensor t = g.tensor(Dims(ranks.begin(), ranks.end()));
  for (std::size_t m = 0; m < dims.size(); ++m) {
    t = naive_mode_product(t, g.matrix(dims[m], ranks[m]), static_cast<int>(m + 1));
  }
  return t;
}

inline double rel_diff(const DenseTensor& a, const DenseTensor& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  const double den = b.norm();
  return den > 0.0 ? (a - b).norm() / den : (a - b).norm();
}

struct JacobiSvd {
  std::vector<double> singulars;  // descending
  Matrix u;                       // m x p, columns scaled to unit length
  Matrix v;                       // p x p
};

// One-sided Jacobi on the columns of a copy of M (rows >= cols required).
inline JacobiSvd jacobi_svd(Matrix a) {
  const Eigen::Index p = a.cols();
  Matrix v = Matrix::Identity(p, p);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i + 1 < p; ++i) {
      for (Eigen::Index j = i + 1; j < p; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
          alpha += a(r, i) * a(r, i);
          beta += a(r, j) * a(r, j);
          gamma += a(r, i) * a(r, j);
        }
        if (gamma == 0.0) continue;
        off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
          const double x = a(r, i), y = a(r, j);
          a(r, i) = c * x - s * y;
          a(r, j) = s * x + c * y;
        }
        for (Eigen::Index r = 0; r < p; ++r) {
          const double x = v(r, i), y = v(r, j);
          v(r, i) = c * x - s * y;
          v(r, j) = s * x + c * y;
        }
      }
    }
    if (off < 1e-15) break;
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::vector<double> norms(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) norms[static_cast<std::size_t>(j)] = a.col(j).norm();
  std::sort(order.begin(), order.end(), [&](auto x, auto y) {
    return norms[static_cast<std::size_t>(x)] > norms[static_cast<std::size_t>(y)];
  });
  JacobiSvd out{{}, Matrix(a.rows(), p), Matrix(p, p)};
  for (Eigen::Index c = 0; c < p; ++c) {
    const Eigen::Index j = order[static_cast<std::size_t>(c)];
    const double s = norms[static_cast<std::size_t>(j)];
    out.singulars.push_back(s);
    out.u.col(c) = s > 0.0 ? Matrix(a.col(j) / s) : Matrix(a.col(j));
    out.v.col(c) = v.col(j);
  }
  return out;
}

// Singular values of any matrix, via Jacobi on the taller orientation.
inline std::vector<double> singular_values(const Matrix& m) {
  return m.rows() >= m.cols() ? jacobi_svd(m).singulars : jacobi_svd(m.transpose()).singulars;
}

}  // namespace testing
