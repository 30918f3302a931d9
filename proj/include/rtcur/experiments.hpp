#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "rtcur/solver.hpp"

namespace rtcur {

struct RecoverySpec {
  std::size_t d = 100;
  std::size_t n = 3;
  std::size_t r = 3;
  double alpha = 0.2;
  double upsilon = 4.0;
  Variant variant = Variant::RC;
  double gamma = 0.7;
  double eps = 1e-5;
  std::size_t max_iters = 200;
  double threshold = 1e-3;  // success iff ||L* - L||_F / ||L*||_F <= threshold
};

struct TrialOutcome {
  double alpha = 0.0;
  double upsilon = 0.0;
  std::size_t trial = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t solver_seed = 0;
  bool success = false;
  double recovery_error = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double millis = 0.0;
  double final_error = 0.0;
  std::vector<double> errors;  // e_k for k = 0..iterations
};

/// Generates one planted instance and solves it.
TrialOutcome run_recovery_trial(const RecoverySpec& spec, std::uint64_t instance_seed,
                                std::uint64_t solver_seed);

struct PhaseGridSpec {
  std::size_t d = 100;
  std::size_t n = 3;
  std::size_t r = 3;
  std::vector<double> alphas;
  std::vector<double> upsilons;
  std::size_t trials = 10;
  Variant variant = Variant::RC;
  double gamma = 0.7;
  double threshold = 1e-3;
  double eps = 1e-5;
  std::size_t max_iters = 200;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
};

/// One outcome per (alpha, upsilon, trial) in that nesting order. Trial t at
/// a given alpha uses the same instance for every upsilon. Results do not
/// depend on `jobs`.
std::vector<TrialOutcome> run_phase_grid(const PhaseGridSpec& spec);

/// Success fraction per (alpha, upsilon) cell.
std::map<std::pair<double, double>, double> success_rates(const std::vector<TrialOutcome>& rows);

void write_phase_csv(std::ostream& out, const PhaseGridSpec& spec,
                     const std::vector<TrialOutcome>& rows);

struct RuntimeSpec {
  std::vector<std::size_t> ds{100, 200, 400};
  std::size_t n = 3;
  std::size_t r = 3;
  double alpha = 0.2;
  double upsilon = 3.0;
  std::vector<Variant> variants{Variant::FF, Variant::RF, Variant::FC, Variant::RC};
  std::size_t trials = 5;
  double gamma = 0.7;
  double eps = 1e-5;
  std::size_t max_iters = 200;
  std::uint64_t seed = 1;
};

struct RuntimeRow {
  std::size_t d = 0;
  Variant variant = Variant::FF;
  std::size_t trials = 0;
  double mean_ms = 0.0;
  double std_ms = 0.0;
  double median_ms = 0.0;
  double mean_iter_ms = 0.0;
  double median_iter_ms = 0.0;
  double mean_iters = 0.0;
  std::size_t converged = 0;
  std::vector<double> total_ms;  // per trial
  std::vector<double> iter_ms;   // per trial, wall time per iteration
};

/// Sequential timing runs; every variant solves the same instances.
std::vector<RuntimeRow> run_runtime(const RuntimeSpec& spec);

void write_runtime_csv(std::ostream& out, const RuntimeSpec& spec,
                       const std::vector<RuntimeRow>& rows);

double median(std::vector<double> v);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rtcur
