#include "rtcur/synth.hpp"

#include <cmath>
#include <random>

#include "rtcur/error.hpp"

namespace rtcur {

namespace {

Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

}  // namespace

DenseTensor gen_lowrank(const Dims& dims, const Ranks& ranks, std::uint64_t seed) {
  if (ranks.size() != dims.size()) throw ConfigError("rank vector length must equal the order");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (ranks[i] < 1 || ranks[i] > dims[i]) throw ConfigError("ranks must satisfy 1 <= r_i <= d_i");
  }
  std::mt19937_64 rng(derive_seed(seed, 0x10));
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseTensor core{Dims(ranks.begin(), ranks.end())};
  for (double& v : core.data()) v = normal(rng);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const Matrix factor = normal_matrix(static_cast<Eigen::Index>(dims[i]),
                                        static_cast<Eigen::Index>(ranks[i]), rng);
    core = mode_product(core, factor, static_cast<int>(i + 1));
  }
  return core;
}

DenseTensor gen_outliers(const Dims& dims, double alpha, double amplitude, std::uint64_t seed) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  DenseTensor s(dims);
  const std::size_t total = s.size();
  const auto count = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(total)));
  const auto support = sample_without_replacement(total, count, derive_seed(seed, 0x20));
  std::mt19937_64 rng(derive_seed(seed, 0x21));
  std::uniform_real_distribution<double> value(-amplitude, amplitude);
  for (std::size_t i : support) s[i] = value(rng);
  return s;
}

DenseTensor gen_bernoulli(const Dims& dims, double alpha, std::uint64_t seed) {
  if (!(alpha >= 0.0 && alpha <= 2.0)) throw ConfigError("alpha must lie in [0, 2]");
  DenseTensor s(dims);
  std::mt19937_64 rng(derive_seed(seed, 0x30));
  std::bernoulli_distribution coin(alpha / 2.0);
  for (double& v : s.data()) v = coin(rng) ? 1.0 : 0.0;
  return s;
}

double mean_abs(const DenseTensor& t) {
  double sum = 0.0;
  for (double v : t.data()) sum += std::abs(v);
  return sum / static_cast<double>(t.size());
}

std::size_t nnz(const DenseTensor& t) {
  std::size_t n = 0;
  for (double v : t.data()) n += v != 0.0;
  return n;
}

SyntheticInstance make_instance(const Dims& dims, const Ranks& ranks, double alpha,
                                std::uint64_t seed) {
  DenseTensor lstar = gen_lowrank(dims, ranks, derive_seed(seed, 1));
  DenseTensor sstar = gen_outliers(dims, alpha, mean_abs(lstar), derive_seed(seed, 2));
  DenseTensor x = lstar + sstar;
  // Store S* as X - L* so the decomposition holds exactly in floating point.
  sstar = x - lstar;
  return {std::move(x), std::move(lstar), std::move(sstar), ranks, alpha, seed};
}

}  // namespace rtcur
