#pragma once

#include <cstdint>

#include "rtcur/sampling.hpp"
#include "rtcur/tensor.hpp"

namespace rtcur {

/// Y x_1 Y_1 ... x_n Y_n with a standard normal r_1 x ... x r_n core Y and
/// standard normal d_i x r_i factors.
DenseTensor gen_lowrank(const Dims& dims, const Ranks& ranks, std::uint64_t seed);

/// floor(alpha * prod d_i) entries chosen uniformly without replacement,
/// each uniform on [-amplitude, amplitude].
DenseTensor gen_outliers(const Dims& dims, double alpha, double amplitude, std::uint64_t seed);

/// Independent Bernoulli(alpha / 2) entries.
DenseTensor gen_bernoulli(const Dims& dims, double alpha, std::uint64_t seed);

double mean_abs(const DenseTensor& t);
std::size_t nnz(const DenseTensor& t);

struct SyntheticInstance {
  DenseTensor x;
  DenseTensor lstar;
  DenseTensor sstar;
  Ranks ranks;
  double alpha = 0.0;
  std::uint64_t seed = 0;
};

/// X = L* + S* with the outlier amplitude set to the mean magnitude of L*.
SyntheticInstance make_instance(const Dims& dims, const Ranks& ranks, double alpha,
                                std::uint64_t seed);

}  // namespace rtcur
