#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtcur/tensor.hpp"

namespace rtcur {

using Ranks = std::vector<std::size_t>;

enum class Strategy { Fiber, Chidori };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);

/// Per-mode row sets I_i (subsets of [d_i]) and column sets J_i (columns of
/// the mode-i unfolding). All indices are zero-based, sorted and unique.
struct SampleIndices {
  IndexSets rows;
  IndexSets cols;
  Strategy strategy = Strategy::Fiber;

  std::size_t order() const { return rows.size(); }
  friend bool operator==(const SampleIndices&, const SampleIndices&) = default;
};

struct SamplingConfig {
  double upsilon = 3.0;
  Ranks ranks;
  Strategy strategy = Strategy::Fiber;
  bool resample = false;
  std::uint64_t seed = 0;
};

struct SampleSizes {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};

/// |I_i| = clamp(ceil(upsilon r_i ln d_i), r_i, d_i). Fiber:
/// |J_i| = clamp(ceil(upsilon r_i ln prod_{j!=i} d_j), r_i, prod_{j!=i} d_j).
/// Chidori: |J_i| = prod_{j!=i} |I_j|.
SampleSizes sample_sizes(const Dims& dims, const Ranks& ranks, double upsilon, Strategy strategy);

/// Uniform draws without replacement. `stream` selects an independent
/// substream of the configured seed (e.g. one per iteration).
SampleIndices draw_indices(const SamplingConfig& config, const Dims& dims,
                           std::uint64_t stream = 0);

/// Unfolding columns of mode `mode` that correspond to all combinations of
/// the other modes' row sets, in ascending order.
std::vector<std::size_t> chidori_columns(const IndexSets& rows, int mode, const Dims& dims);

/// Throws IndexError if the sets are out of range, unsorted or duplicated,
/// or if Chidori columns do not match the row sets.
void validate(const SampleIndices& idx, const Dims& dims);

/// SplitMix64-style mixing of a base seed with two stream coordinates.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Sorted uniform sample of `count` distinct values from [0, population).
std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t count,
                                                    std::uint64_t seed);

}  // namespace rtcur
