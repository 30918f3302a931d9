#include "rtcur/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <random>

#include "rtcur/error.hpp"

namespace rtcur {

std::string to_string(Strategy s) { return s == Strategy::Fiber ? "fiber" : "chidori"; }

Strategy parse_strategy(const std::string& s) {
  if (s == "fiber") return Strategy::Fiber;
  if (s == "chidori") return Strategy::Chidori;
  throw ConfigError("unknown sampling strategy '" + s + "'");
}

namespace {

std::size_t clamped_size(double upsilon, std::size_t rank, double log_extent, std::size_t extent) {
  const double raw = std::ceil(upsilon * static_cast<double>(rank) * log_extent);
  const double lo = static_cast<double>(rank);
  const double hi = static_cast<double>(extent);
  return static_cast<std::size_t>(std::clamp(raw, std::min(lo, hi), hi));
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ull));
}

SampleSizes sample_sizes(const Dims& dims, const Ranks& ranks, double upsilon,
                         Strategy strategy) {
  if (ranks.size() != dims.size()) throw ConfigError("rank vector length must equal the order");
  if (!(upsilon > 0.0)) throw ConfigError("sampling constant must be positive");
  const std::size_t n = dims.size();
  SampleSizes sizes;
  sizes.rows.resize(n);
  sizes.cols.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sizes.rows[i] =
        clamped_size(upsilon, ranks[i], std::log(static_cast<double>(dims[i])), dims[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t extent = 1;
    std::size_t chidori = 1;
    double log_extent = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      extent *= dims[j];
      chidori *= sizes.rows[j];
      log_extent += std::log(static_cast<double>(dims[j]));
    }
    sizes.cols[i] = strategy == Strategy::Chidori
                        ? chidori
                        : clamped_size(upsilon, ranks[i], log_extent, extent);
  }
  return sizes;
}

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count,
                                                    std::uint64_t seed) {
  if (count > population) throw ConfigError("sample larger than population");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> out;
  out.reserve(count);
  // Selection sampling over a forward range keeps the output sorted.
  std::vector<std::size_t> all(population);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::sample(all.begin(), all.end(), std::back_inserter(out), count, rng);
  return out;
}

std::vector<std::size_t> chidori_columns(const IndexSets& rows, int mode, const Dims& dims) {
  check_mode(dims.size(), mode);
  if (rows.size() != dims.size()) throw IndexError("expected one row set per mode");
  const std::size_t k = static_cast<std::size_t>(mode - 1);
  std::vector<std::size_t> others;
  std::vector<std::size_t> strides;
  std::size_t stride = 1;
  std::size_t total = 1;
  for (std::size_t m = 0; m < dims.size(); ++m) {
    if (m == k) continue;
    others.push_back(m);
    strides.push_back(stride);
    stride *= dims[m];
    total *= rows[m].size();
  }
  std::vector<std::size_t> cols;
  cols.reserve(total);
  if (total == 0) return cols;
  std::vector<std::size_t> counter(others.size(), 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t col = 0;
    for (std::size_t a = 0; a < others.size(); ++a) col += rows[others[a]][counter[a]] * strides[a];
    cols.push_back(col);
    for (std::size_t a = 0; a < others.size(); ++a) {
      if (++counter[a] < rows[others[a]].size()) break;
      counter[a] = 0;
    }
  }
  // Sorted row sets make the odometer order ascending already.
  return cols;
}

SampleIndices draw_indices(const SamplingConfig& config, const Dims& dims, std::uint64_t stream) {
  const SampleSizes sizes = sample_sizes(dims, config.ranks, config.upsilon, config.strategy);
  const std::size_t n = dims.size();
  SampleIndices idx;
  idx.strategy = config.strategy;
  idx.rows.resize(n);
  idx.cols.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    idx.rows[i] = sample_without_replacement(dims[i], sizes.rows[i],
                                             derive_seed(config.seed, stream, 2 * i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (config.strategy == Strategy::Chidori) {
      idx.cols[i] = chidori_columns(idx.rows, static_cast<int>(i + 1), dims);
    } else {
      const std::size_t extent = product(dims) / dims[i];
      idx.cols[i] = sample_without_replacement(extent, sizes.cols[i],
                                               derive_seed(config.seed, stream, 2 * i + 1));
    }
  }
  return idx;
}

void validate(const SampleIndices& idx, const Dims& dims) {
  const std::size_t n = dims.size();
  if (idx.rows.size() != n || idx.cols.size() != n) {
    throw IndexError("sample indices have the wrong number of modes");
  }
  const std::size_t total = product(dims);
  auto check = [](const std::vector<std::size_t>& set, std::size_t extent, const char* what,
                  std::size_t mode) {
    if (set.empty()) {
      throw IndexError(std::string("empty ") + what + " set for mode " + std::to_string(mode));
    }
    for (std::size_t a = 0; a < set.size(); ++a) {
      if (set[a] >= extent) {
        throw IndexError(std::string(what) + " index out of range in mode " +
                         std::to_string(mode));
      }
      if (a > 0 && set[a] <= set[a - 1]) {
        throw IndexError(std::string(what) + " set not strictly increasing in mode " +
                         std::to_string(mode));
      }
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    check(idx.rows[i], dims[i], "row", i + 1);
    check(idx.cols[i], total / dims[i], "column", i + 1);
  }
  if (idx.strategy == Strategy::Chidori) {
    for (std::size_t i = 0; i < n; ++i) {
      if (idx.cols[i] != chidori_columns(idx.rows, static_cast<int>(i + 1), dims)) {
        throw IndexError("Chidori column set of mode " + std::to_string(i + 1) +
                         " does not match the row sets");
      }
    }
  }
}

}  // namespace rtcur
