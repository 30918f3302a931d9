#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rtcur/tensor.hpp"

namespace rtcur {

struct TSparsity {
  bool sparse = true;
  std::vector<double> max_slice_occupancy;  // per mode, fraction of the slice size
};

struct MSparsity {
  bool sparse = true;
  double max_row_occupancy = 0.0;  // fraction of the row length
  double max_col_occupancy = 0.0;  // fraction of the column length
};

/// Every mode-j slice holds at most alpha * prod_{i!=j} d_i nonzeros. Here and
/// below the bound is evaluated exactly for the double `alpha`, without slack.
TSparsity check_t_sparsity(const DenseTensor& s, double alpha);

/// Every column holds at most alpha * rows nonzeros and every row at most
/// alpha * cols.
MSparsity check_m_sparsity(const Matrix& m, double alpha);

/// M-sparsity of the d_1..d_k x d_{k+1}..d_n unfolding, counted directly on
/// the tensor.
MSparsity check_m_sparsity_split(const DenseTensor& s, std::size_t k, double alpha);

struct SparsityReport {
  double alpha = 0.0;
  TSparsity t;
  std::vector<MSparsity> m;  // one per mode-k unfolding
};

SparsityReport sparsity_report(const DenseTensor& s, double alpha);

/// Monte-Carlo study of Bernoulli(alpha/2) tensors of size d^n: how often
/// they are alpha-T-sparse and how often their d^k x d^(n-k) unfoldings are
/// alpha-M-sparse, next to the analytic lower bounds.
struct BernoulliStudy {
  std::size_t d = 0;
  std::size_t n = 0;
  double alpha = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> splits;

  bool condition_holds = false;  // alpha d > 2 n ln d / (ln 4 - 1)
  double condition_lhs = 0.0;
  double condition_rhs = 0.0;
  double t_bound = 0.0;               // 1 - n d^(1 - n d^(n-2))
  std::vector<double> m_bounds;       // 1 - d^(k - n d^(n-k-1)) - d^(n-k - n d^(k-1))
  std::vector<bool> t_sparse;         // per trial
  std::vector<std::vector<bool>> m_sparse;  // per trial, per split
  double t_fraction = 0.0;
  std::vector<double> m_fractions;
};

BernoulliStudy bernoulli_sparsity_study(std::size_t d, std::size_t n, double alpha,
                                        std::size_t trials, std::uint64_t seed,
                                        std::vector<std::size_t> splits, std::size_t jobs = 1);

double t_sparsity_bound(std::size_t d, std::size_t n);
double m_sparsity_bound(std::size_t d, std::size_t n, std::size_t k);

/// One row per trial (trial, t_sparse, m_sparse_k...), then a "frequency"
/// row and a "bound" row ("NA" when the condition fails).
void write_study_csv(std::ostream& out, const BernoulliStudy& study);

}  // namespace rtcur
