#include "rtcur/sparsity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "rtcur/error.hpp"
#include "rtcur/synth.hpp"
#include "rtcur/sampling.hpp"

namespace rtcur {

namespace {

// Exact test of count <= alpha * extent: fma rounds once, so the sign of the
// difference is never lost.
bool within(std::size_t count, double alpha, std::size_t extent) {
  return std::fma(alpha, static_cast<double>(extent), -static_cast<double>(count)) >= 0.0;
}

}  // namespace

TSparsity check_t_sparsity(const DenseTensor& s, double alpha) {
  const Dims& dims = s.dims();
  const std::size_t n = dims.size();
  std::vector<std::vector<std::size_t>> counts(n);
  for (std::size_t m = 0; m < n; ++m) counts[m].assign(dims[m], 0);
  std::vector<std::size_t> counter(n, 0);
  const auto data = s.data();
  for (std::size_t e = 0; e < data.size(); ++e) {
    if (data[e] != 0.0) {
      for (std::size_t m = 0; m < n; ++m) ++counts[m][counter[m]];
    }
    for (std::size_t m = 0; m < n; ++m) {
      if (++counter[m] < dims[m]) break;
      counter[m] = 0;
    }
  }
  TSparsity out;
  const std::size_t total = s.size();
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t extent = total / dims[m];
    const std::size_t worst = *std::max_element(counts[m].begin(), counts[m].end());
    out.max_slice_occupancy.push_back(static_cast<double>(worst) / static_cast<double>(extent));
    out.sparse = out.sparse && within(worst, alpha, extent);
  }
  return out;
}

MSparsity check_m_sparsity(const Matrix& m, double alpha) {
  const auto rows = static_cast<std::size_t>(m.rows());
  const auto cols = static_cast<std::size_t>(m.cols());
  std::vector<std::size_t> row_counts(rows, 0);
  std::size_t worst_col = 0;
  for (std::size_t j = 0; j < cols; ++j) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0) {
        ++c;
        ++row_counts[i];
      }
    }
    worst_col = std::max(worst_col, c);
  }
  const std::size_t worst_row =
      rows ? *std::max_element(row_counts.begin(), row_counts.end()) : 0;
  MSparsity out;
  out.max_row_occupancy = cols ? static_cast<double>(worst_row) / static_cast<double>(cols) : 0.0;
  out.max_col_occupancy = rows ? static_cast<double>(worst_col) / static_cast<double>(rows) : 0.0;
  out.sparse = within(worst_row, alpha, cols) && within(worst_col, alpha, rows);
  return out;
}

MSparsity check_m_sparsity_split(const DenseTensor& s, std::size_t k, double alpha) {
  const Dims& dims = s.dims();
  if (k < 1 || k >= dims.size()) throw ModeError("split must lie in [1, n-1]");
  const std::size_t rows = product(std::span(dims).first(k));
  const std::size_t cols = s.size() / rows;
  std::vector<std::size_t> row_counts(rows, 0);
  std::vector<std::size_t> col_counts(cols, 0);
  const auto data = s.data();
  for (std::size_t e = 0; e < data.size(); ++e) {
    if (data[e] != 0.0) {
      ++row_counts[e % rows];
      ++col_counts[e / rows];
    }
  }
  const std::size_t worst_row = *std::max_element(row_counts.begin(), row_counts.end());
  const std::size_t worst_col = *std::max_element(col_counts.begin(), col_counts.end());
  MSparsity out;
  out.max_row_occupancy = static_cast<double>(worst_row) / static_cast<double>(cols);
  out.max_col_occupancy = static_cast<double>(worst_col) / static_cast<double>(rows);
  out.sparse = within(worst_row, alpha, cols) && within(worst_col, alpha, rows);
  return out;
}

SparsityReport sparsity_report(const DenseTensor& s, double alpha) {
  SparsityReport r{alpha, check_t_sparsity(s, alpha), {}};
  for (std::size_t m = 0; m < s.order(); ++m) {
    r.m.push_back(check_m_sparsity(unfold(s, static_cast<int>(m + 1)), alpha));
  }
  return r;
}

double t_sparsity_bound(std::size_t d, std::size_t n) {
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);
  const double exponent = 1.0 - nn * std::pow(dd, nn - 2.0);
  return 1.0 - nn * std::exp(exponent * std::log(dd));
}

double m_sparsity_bound(std::size_t d, std::size_t n, std::size_t k) {
  const double dd = static_cast<double>(d);
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  const double a = kk - nn * std::pow(dd, nn - kk - 1.0);
  const double b = nn - kk - nn * std::pow(dd, kk - 1.0);
  return 1.0 - std::exp(a * std::log(dd)) - std::exp(b * std::log(dd));
}

BernoulliStudy bernoulli_sparsity_study(std::size_t d, std::size_t n, double alpha,
                                        std::size_t trials, std::uint64_t seed,
                                        std::vector<std::size_t> splits, std::size_t jobs) {
  if (d < 1 || n < 1 || trials < 1) throw ConfigError("study needs d, n, trials >= 1");
  for (std::size_t k : splits) {
    if (k < 1 || k >= n) throw ConfigError("unfolding split must lie in [1, n-1]");
  }
  BernoulliStudy st;
  st.d = d;
  st.n = n;
  st.alpha = alpha;
  st.trials = trials;
  st.seed = seed;
  st.splits = std::move(splits);
  st.condition_lhs = alpha * static_cast<double>(d);
  st.condition_rhs =
      2.0 * static_cast<double>(n) * std::log(static_cast<double>(d)) / (std::log(4.0) - 1.0);
  st.condition_holds = st.condition_lhs > st.condition_rhs;
  st.t_bound = t_sparsity_bound(d, n);
  for (std::size_t k : st.splits) st.m_bounds.push_back(m_sparsity_bound(d, n, k));

  // Byte flags: std::vector<bool> cannot be written from several threads.
  const std::size_t ns = st.splits.size();
  std::vector<unsigned char> t_flags(trials, 0);
  std::vector<unsigned char> m_flags(trials * ns, 0);
  const Dims dims(n, d);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      const DenseTensor s = gen_bernoulli(dims, alpha, derive_seed(seed, t));
      t_flags[t] = check_t_sparsity(s, alpha).sparse;
      for (std::size_t a = 0; a < ns; ++a) {
        m_flags[t * ns + a] = check_m_sparsity_split(s, st.splits[a], alpha).sparse;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < std::max<std::size_t>(jobs, 1); ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (std::size_t t = 0; t < trials; ++t) {
    st.t_sparse.push_back(t_flags[t] != 0);
    st.m_sparse.emplace_back();
    for (std::size_t a = 0; a < ns; ++a) st.m_sparse[t].push_back(m_flags[t * ns + a] != 0);
  }

  const auto frac = [&](auto pred) {
    std::size_t c = 0;
    for (std::size_t t = 0; t < trials; ++t) c += pred(t) ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(trials);
  };
  st.t_fraction = frac([&](std::size_t t) { return st.t_sparse[t]; });
  for (std::size_t a = 0; a < st.splits.size(); ++a) {
    st.m_fractions.push_back(frac([&](std::size_t t) { return st.m_sparse[t][a]; }));
  }
  return st;
}

void write_study_csv(std::ostream& out, const BernoulliStudy& st) {
  const auto f = format_real;
  out << "# bernoulli sparsity study d=" << st.d << " n=" << st.n << " alpha=" << f(st.alpha)
      << " trials=" << st.trials << " seed=" << st.seed << " condition "
      << (st.condition_holds ? "holds" : "fails (bound not applicable)") << ": alpha*d="
      << f(st.condition_lhs) << " vs " << f(st.condition_rhs) << '\n';
  out << "trial,t_sparse";
  for (std::size_t k : st.splits) out << ",m_sparse_k" << k;
  out << '\n';
  for (std::size_t t = 0; t < st.trials; ++t) {
    out << t << ',' << int(st.t_sparse[t]);
    for (bool b : st.m_sparse[t]) out << ',' << int(b);
    out << '\n';
  }
  out << "frequency," << f(st.t_fraction);
  for (double v : st.m_fractions) out << ',' << f(v);
  out << '\n';
  out << "bound,";
  if (st.condition_holds) {
    out << f(st.t_bound);
    for (double b : st.m_bounds) out << ',' << f(b);
  } else {
    out << "NA";
    for (std::size_t a = 0; a < st.m_bounds.size(); ++a) out << ",NA";
  }
  out << '\n';
}

}  // namespace rtcur
