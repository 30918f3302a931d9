#include "rtcur/solver.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "rtcur/error.hpp"

namespace rtcur {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::FF: return "ff";
    case Variant::RF: return "rf";
    case Variant::FC: return "fc";
    case Variant::RC: return "rc";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "ff" || s == "FF") return Variant::FF;
  if (s == "rf" || s == "RF") return Variant::RF;
  if (s == "fc" || s == "FC") return Variant::FC;
  if (s == "rc" || s == "RC") return Variant::RC;
  throw ConfigError("unknown variant '" + s + "' (expected ff, rf, fc or rc)");
}

Strategy strategy_of(Variant v) {
  return (v == Variant::FF || v == Variant::RF) ? Strategy::Fiber : Strategy::Chidori;
}

bool resamples(Variant v) { return v == Variant::RF || v == Variant::RC; }

std::string describe(const SolverConfig& cfg) {
  std::ostringstream out;
  out << "variant=" << to_string(cfg.variant) << " ranks=";
  for (std::size_t i = 0; i < cfg.ranks.size(); ++i) out << (i ? "," : "") << cfg.ranks[i];
  out << " upsilon=" << format_real(cfg.upsilon) << " zeta0=";
  if (cfg.zeta0) {
    out << format_real(*cfg.zeta0);
  } else {
    out << "auto";
  }
  out << " gamma=" << format_real(cfg.gamma) << " eps=" << format_real(cfg.eps) << " max_iters=" << cfg.max_iters
      << " seed=" << cfg.seed;
  return out.str();
}

DenseTensor TensorAccess::read_core(const IndexSets& rows) const {
  const Dims& d = dims();
  Dims core_dims;
  for (const auto& r : rows) core_dims.push_back(r.size());
  DenseTensor out(core_dims);
  std::vector<std::size_t> strides(d.size());
  std::size_t acc = 1;
  for (std::size_t m = 0; m < d.size(); ++m) {
    strides[m] = acc;
    acc *= d[m];
  }
  std::vector<std::size_t> counter(d.size(), 0);
  for (std::size_t e = 0; e < out.size(); ++e) {
    std::size_t linear = 0;
    for (std::size_t m = 0; m < d.size(); ++m) linear += rows[m][counter[m]] * strides[m];
    out[e] = entry(linear);
    for (std::size_t m = 0; m < d.size(); ++m) {
      if (++counter[m] < core_dims[m]) break;
      counter[m] = 0;
    }
  }
  return out;
}

Matrix TensorAccess::read_fibers(int mode, std::span<const std::size_t> cols) const {
  const Dims& d = dims();
  const UnfoldingMap map(d, mode);
  const std::size_t k = static_cast<std::size_t>(mode - 1);
  std::size_t stride_k = 1;
  for (std::size_t m = 0; m < k; ++m) stride_k *= d[m];
  Matrix out(static_cast<Eigen::Index>(d[k]), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto index = map.column_index(cols[c]);
    std::size_t base = 0;
    std::size_t stride = 1;
    for (std::size_t m = 0; m < d.size(); ++m) {
      base += index[m] * stride;
      stride *= d[m];
    }
    for (std::size_t i = 0; i < d[k]; ++i) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = entry(base + i * stride_k);
    }
  }
  return out;
}

DenseTensor DenseAccess::read_core(const IndexSets& rows) const { return subtensor(x_, rows); }

Matrix DenseAccess::read_fibers(int mode, std::span<const std::size_t> cols) const {
  return unfolding_columns(x_, mode, cols);
}

std::size_t Blocks::entry_count() const {
  std::size_t n = core.size();
  for (const auto& f : fibers) n += static_cast<std::size_t>(f.size());
  return n;
}

Blocks read_blocks(const TensorAccess& x, const SampleIndices& idx) {
  Blocks b{x.read_core(idx.rows), {}};
  for (std::size_t i = 0; i < idx.order(); ++i) {
    b.fibers.push_back(x.read_fibers(static_cast<int>(i + 1), idx.cols[i]));
  }
  return b;
}

Blocks eval_blocks(const CurModel& model, const SampleIndices& idx) {
  Blocks b{cur_eval_core(model, idx.rows), {}};
  for (std::size_t i = 0; i < idx.order(); ++i) {
    b.fibers.push_back(cur_eval_fibers(model, static_cast<int>(i + 1), idx));
  }
  return b;
}

Blocks operator-(const Blocks& a, const Blocks& b) {
  if (a.fibers.size() != b.fibers.size()) throw DimensionError("block sets differ in order");
  Blocks out{a.core - b.core, {}};
  for (std::size_t i = 0; i < a.fibers.size(); ++i) {
    if (a.fibers[i].rows() != b.fibers[i].rows() || a.fibers[i].cols() != b.fibers[i].cols()) {
      throw DimensionError("fiber blocks differ in shape");
    }
    out.fibers.push_back(a.fibers[i] - b.fibers[i]);
  }
  return out;
}

DenseTensor hard_threshold(const DenseTensor& t, double zeta) {
  DenseTensor out(t.dims());
  auto o = out.data();
  const auto in = t.data();
  for (std::size_t i = 0; i < in.size(); ++i) o[i] = std::abs(in[i]) > zeta ? in[i] : 0.0;
  return out;
}

Matrix hard_threshold(const Matrix& m, double zeta) {
  return m.unaryExpr([zeta](double v) { return std::abs(v) > zeta ? v : 0.0; });
}

Blocks sparse_update(const Blocks& x, const Blocks& l, double zeta) {
  if (x.fibers.size() != l.fibers.size()) throw DimensionError("block sets differ in order");
  Blocks s{hard_threshold(x.core - l.core, zeta), {}};
  for (std::size_t i = 0; i < x.fibers.size(); ++i) {
    s.fibers.push_back(hard_threshold(Matrix(x.fibers[i] - l.fibers[i]), zeta));
  }
  return s;
}

namespace {

double norm_sum(const Blocks& b) {
  double total = fro_norm(b.core);
  for (const auto& f : b.fibers) total += f.norm();
  return total;
}

void check_finite(const Blocks& b) {
  for (double v : b.core.data()) {
    if (!std::isfinite(v)) throw InputError("observed tensor contains non-finite values");
  }
  for (const auto& f : b.fibers) {
    if (!f.allFinite()) throw InputError("observed tensor contains non-finite values");
  }
}

Blocks zero_blocks(const Dims& dims, const SampleIndices& idx) {
  Dims core_dims;
  for (const auto& r : idx.rows) core_dims.push_back(r.size());
  Blocks b{DenseTensor(core_dims), {}};
  for (std::size_t i = 0; i < idx.order(); ++i) {
    b.fibers.push_back(Matrix::Zero(static_cast<Eigen::Index>(dims[i]),
                                    static_cast<Eigen::Index>(idx.cols[i].size())));
  }
  return b;
}

CurModel zero_model(const Dims& dims, const Ranks& ranks, const SampleIndices& idx) {
  Blocks z = zero_blocks(dims, idx);
  return cur_from_blocks(dims, ranks, idx, std::move(z.core), std::move(z.fibers));
}

SampleIndices first_draw(const TensorAccess& x, const SolverConfig& cfg,
                         const SamplingConfig& sampling) {
  const Dims& dims = x.dims();
  if (cfg.ranks.size() != dims.size()) {
    throw ConfigError("rank vector has " + std::to_string(cfg.ranks.size()) +
                      " entries for a tensor of order " + std::to_string(dims.size()));
  }
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (!(cfg.eps > 0.0)) throw ConfigError("eps must be positive");
  if (cfg.zeta0 && !(*cfg.zeta0 > 0.0)) throw ConfigError("explicit zeta0 must be positive");
  if (cfg.max_iters == 0) throw ConfigError("max_iters must be positive");
  if (!(cfg.upsilon > 0.0)) throw ConfigError("upsilon must be positive");
  const SampleSizes sizes = sample_sizes(dims, cfg.ranks, cfg.upsilon, sampling.strategy);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const std::size_t r = cfg.ranks[i];
    if (r < 1 || r > dims[i] || r > sizes.rows[i] || r > sizes.cols[i]) {
      throw ConfigError("rank " + std::to_string(r) + " of mode " + std::to_string(i + 1) +
                        " is infeasible for |I| = " + std::to_string(sizes.rows[i]) +
                        ", |J| = " + std::to_string(sizes.cols[i]));
    }
  }
  return draw_indices(sampling, dims, 0);
}

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

std::optional<double> relative_error(const Blocks& residual, const Blocks& observed) {
  const double denom = norm_sum(observed);
  if (denom == 0.0) return std::nullopt;
  return norm_sum(residual) / denom;
}

double zeta0_auto(const Blocks& observed) {
  double m = inf_norm(observed.core);
  for (const auto& f : observed.fibers) {
    if (f.size() > 0) m = std::max(m, f.cwiseAbs().maxCoeff());
  }
  return m;
}

double zeta0_auto(const DenseTensor& x, const SampleIndices& idx) {
  return zeta0_auto(read_blocks(DenseAccess(x), idx));
}

Solver::Solver(const TensorAccess& x, SolverConfig cfg)
    : x_(x),
      cfg_(std::move(cfg)),
      sampling_{cfg_.upsilon, cfg_.ranks, strategy_of(cfg_.variant), resamples(cfg_.variant),
                cfg_.seed},
      idx_(first_draw(x_, cfg_, sampling_)),
      model_(zero_model(x_.dims(), cfg_.ranks, idx_)),
      observed_(zero_blocks(x_.dims(), idx_)),
      lowrank_(zero_blocks(x_.dims(), idx_)),
      sparse_(zero_blocks(x_.dims(), idx_)) {
  const auto t0 = Clock::now();
  read_observed();
  zeta_ = cfg_.zeta0 ? *cfg_.zeta0 : zeta0_auto(observed_);
  error_ = current_error().value_or(0.0);
  trace_.records.push_back({0, error_, zeta_, millis_since(t0), false});
  if (finished()) {
    trace_.termination = error_ <= cfg_.eps ? Termination::Converged : Termination::MaxIters;
  }
}

void Solver::read_observed() {
  observed_ = read_blocks(x_, idx_);
  entries_read_ += observed_.entry_count();
  check_finite(observed_);
}

std::optional<double> Solver::current_error() const {
  return relative_error(observed_ - lowrank_ - sparse_, observed_);
}

bool Solver::finished() const { return !(error_ > cfg_.eps) || iter_ >= cfg_.max_iters; }

void Solver::step() {
  if (finished()) return;
  const auto t0 = Clock::now();
  if (sampling_.resample) {
    idx_ = draw_indices(sampling_, x_.dims(), iter_ + 1);
    read_observed();
    lowrank_ = eval_blocks(model_, idx_);
  }

  // Outliers: threshold the residual on the sampled blocks only.
  zeta_ *= cfg_.gamma;
  sparse_ = sparse_update(observed_, lowrank_, zeta_);

  // Low-rank part: tensor CUR of (X - S) on the same blocks.
  Blocks cleaned = observed_ - sparse_;
  model_ = cur_from_blocks(x_.dims(), cfg_.ranks, idx_, std::move(cleaned.core),
                           std::move(cleaned.fibers));
  lowrank_ = eval_blocks(model_, idx_);

  ++iter_;
  const auto err = current_error();
  error_ = err.value_or(0.0);
  const bool deficient = model_.rank_deficient();
  if (deficient) {
    std::ostringstream w;
    w << "iteration " << iter_ << ": rank-deficient intersection in mode(s)";
    for (std::size_t i = 0; i < model_.deficient.size(); ++i) {
      if (model_.deficient[i]) w << ' ' << (i + 1);
    }
    trace_.warnings.push_back(w.str());
  }
  trace_.records.push_back({iter_, error_, zeta_, millis_since(t0), deficient});
  if (finished()) {
    trace_.termination = error_ <= cfg_.eps ? Termination::Converged : Termination::MaxIters;
  }
}

void Solver::run() {
  while (!finished()) step();
}

SolveResult Solver::result() && {
  return SolveResult{std::move(model_), std::move(sparse_), std::move(trace_), entries_read_};
}

SolveResult solve(const TensorAccess& x, const SolverConfig& cfg) {
  Solver solver(x, cfg);
  solver.run();
  return std::move(solver).result();
}

SolveResult solve(const DenseTensor& x, const SolverConfig& cfg) {
  return solve(DenseAccess(x), cfg);
}

DenseTensor full_sparse(const DenseTensor& x, const CurModel& model, double zeta) {
  return hard_threshold(x - cur_reconstruct(model), zeta);
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace, const std::string& comment,
                     bool timing) {
  out << "# " << comment << '\n';
  out << "k,e_k,zeta_k,millis\n";
  for (const auto& r : trace.records) {
    out << r.k << ',' << format_real(r.error) << ',' << format_real(r.zeta) << ',';
    if (timing) {
      out << std::setprecision(6) << r.millis;
    } else {
      out << 0;
    }
    out << '\n';
  }
}

}  // namespace rtcur
