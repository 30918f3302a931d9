#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtcur/cur.hpp"
#include "rtcur/sampling.hpp"
#include "rtcur/tensor.hpp"

namespace rtcur {

/// FF/FC keep the first draw of indices, RF/RC redraw every iteration; the
/// second letter selects Fiber or Chidori sampling.
enum class Variant { FF, RF, FC, RC };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);
Strategy strategy_of(Variant v);
bool resamples(Variant v);

struct SolverConfig {
  Ranks ranks;
  Variant variant = Variant::FF;
  double upsilon = 3.0;
  std::optional<double> zeta0;  // empty: max magnitude over the sampled entries
  double gamma = 0.7;
  double eps = 1e-5;
  std::size_t max_iters = 200;
  std::uint64_t seed = 0;
};

/// Single-line description, used in CSV comment lines.
std::string describe(const SolverConfig& cfg);

/// Read-only access to the observed tensor. The solver only ever reads the
/// sampled blocks through this interface.
class TensorAccess {
 public:
  virtual ~TensorAccess() = default;
  virtual const Dims& dims() const = 0;
  virtual double entry(std::size_t linear) const = 0;

  virtual DenseTensor read_core(const IndexSets& rows) const;
  virtual Matrix read_fibers(int mode, std::span<const std::size_t> cols) const;
};

class DenseAccess final : public TensorAccess {
 public:
  explicit DenseAccess(const DenseTensor& x) : x_(x) {}
  const Dims& dims() const override { return x_.dims(); }
  double entry(std::size_t linear) const override { return x_[linear]; }
  DenseTensor read_core(const IndexSets& rows) const override;
  Matrix read_fibers(int mode, std::span<const std::size_t> cols) const override;

 private:
  const DenseTensor& x_;
};

/// The sampled pieces of one tensor: T(I_1..I_n) and T_(i)(:, J_i) per mode.
struct Blocks {
  DenseTensor core;
  std::vector<Matrix> fibers;

  std::size_t entry_count() const;
};

Blocks read_blocks(const TensorAccess& x, const SampleIndices& idx);
Blocks eval_blocks(const CurModel& model, const SampleIndices& idx);
Blocks operator-(const Blocks& a, const Blocks& b);

DenseTensor hard_threshold(const DenseTensor& t, double zeta);
Matrix hard_threshold(const Matrix& m, double zeta);

/// HT_zeta(x - l) on every block.
Blocks sparse_update(const Blocks& x, const Blocks& l, double zeta);

/// (||E core||_F + sum_i ||E fibers_i||_F) / (same for X). Empty when the
/// observed blocks are all zero.
std::optional<double> relative_error(const Blocks& residual, const Blocks& observed);

double zeta0_auto(const Blocks& observed);
double zeta0_auto(const DenseTensor& x, const SampleIndices& idx);

struct IterationRecord {
  std::size_t k = 0;
  double error = 0.0;
  double zeta = 0.0;
  double millis = 0.0;
  bool rank_deficient = false;
};

enum class Termination { Converged, MaxIters };

struct SolverTrace {
  std::vector<IterationRecord> records;  // records[0] is the initial state
  Termination termination = Termination::MaxIters;
  std::vector<std::string> warnings;

  std::size_t iterations() const { return records.empty() ? 0 : records.back().k; }
  double final_error() const { return records.empty() ? 1.0 : records.back().error; }
};

/// Columns k, e_k, zeta_k, millis after a "# <comment>" line. With
/// `timing` false the millis column is written as 0 so reruns are
/// byte-identical.
void write_trace_csv(std::ostream& out, const SolverTrace& trace, const std::string& comment,
                     bool timing = true);

struct SolveResult {
  CurModel model;
  Blocks sparse;  // S on the final sampled blocks
  SolverTrace trace;
  std::size_t entries_read = 0;  // sum of block sizes read from X
};

/// Alternating hard thresholding on the sampled blocks and tensor CUR
/// updates of the low-rank part. Iterations can be driven one at a time;
/// solve() runs to termination.
class Solver {
 public:
  Solver(const TensorAccess& x, SolverConfig cfg);

  bool finished() const;
  void step();
  void run();

  std::size_t iteration() const { return iter_; }
  double zeta() const { return zeta_; }
  double error() const { return error_; }
  const SampleIndices& indices() const { return idx_; }
  const CurModel& model() const { return model_; }
  const Blocks& sparse() const { return sparse_; }
  const Blocks& observed() const { return observed_; }
  const SolverTrace& trace() const { return trace_; }
  std::size_t entries_read() const { return entries_read_; }

  SolveResult result() &&;

 private:
  void read_observed();
  std::optional<double> current_error() const;

  const TensorAccess& x_;
  SolverConfig cfg_;
  SamplingConfig sampling_;
  SampleIndices idx_;
  CurModel model_;
  Blocks observed_;
  Blocks lowrank_;
  Blocks sparse_;
  double zeta_ = 0.0;
  double error_ = 1.0;
  std::size_t iter_ = 0;
  std::size_t entries_read_ = 0;
  SolverTrace trace_;
};

SolveResult solve(const TensorAccess& x, const SolverConfig& cfg);
SolveResult solve(const DenseTensor& x, const SolverConfig& cfg);

/// HT_zeta(X - L) over the whole tensor. Diagnostic only; it reads every entry.
DenseTensor full_sparse(const DenseTensor& x, const CurModel& model, double zeta);

}  // namespace rtcur
