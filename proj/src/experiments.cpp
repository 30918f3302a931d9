#include "rtcur/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <thread>

#include "rtcur/error.hpp"
#include "rtcur/synth.hpp"

namespace rtcur {

namespace {

using Clock = std::chrono::steady_clock;

SolverConfig solver_config(const RecoverySpec& spec, std::uint64_t seed) {
  SolverConfig cfg;
  cfg.ranks.assign(spec.n, spec.r);
  cfg.variant = spec.variant;
  cfg.upsilon = spec.upsilon;
  cfg.gamma = spec.gamma;
  cfg.eps = spec.eps;
  cfg.max_iters = spec.max_iters;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TrialOutcome run_recovery_trial(const RecoverySpec& spec, std::uint64_t instance_seed,
                                std::uint64_t solver_seed) {
  const Dims dims(spec.n, spec.d);
  const SyntheticInstance inst = make_instance(dims, Ranks(spec.n, spec.r), spec.alpha,
                                               instance_seed);
  const auto t0 = Clock::now();
  const SolveResult res = solve(inst.x, solver_config(spec, solver_seed));
  const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

  TrialOutcome out;
  out.alpha = spec.alpha;
  out.upsilon = spec.upsilon;
  out.instance_seed = instance_seed;
  out.solver_seed = solver_seed;
  out.recovery_error = fro_norm(inst.lstar - cur_reconstruct(res.model)) / fro_norm(inst.lstar);
  out.success = out.recovery_error <= spec.threshold;
  out.iterations = res.trace.iterations();
  out.converged = res.trace.termination == Termination::Converged;
  out.millis = ms;
  out.final_error = res.trace.final_error();
  for (const auto& rec : res.trace.records) out.errors.push_back(rec.error);
  return out;
}

std::vector<TrialOutcome> run_phase_grid(const PhaseGridSpec& spec) {
  if (spec.alphas.empty() || spec.upsilons.empty() || spec.trials < 1) {
    throw ConfigError("phase grid needs nonempty alpha and upsilon grids and trials >= 1");
  }
  const std::size_t na = spec.alphas.size();
  const std::size_t nu = spec.upsilons.size();
  const std::size_t total = na * nu * spec.trials;
  std::vector<TrialOutcome> rows(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t t = job % spec.trials;
      const std::size_t u = (job / spec.trials) % nu;
      const std::size_t a = job / (spec.trials * nu);
      RecoverySpec rs;
      rs.d = spec.d;
      rs.n = spec.n;
      rs.r = spec.r;
      rs.alpha = spec.alphas[a];
      rs.upsilon = spec.upsilons[u];
      rs.variant = spec.variant;
      rs.gamma = spec.gamma;
      rs.eps = spec.eps;
      rs.max_iters = spec.max_iters;
      rs.threshold = spec.threshold;
      TrialOutcome o = run_recovery_trial(rs, derive_seed(spec.seed, t, 2 * a),
                                          derive_seed(spec.seed, t, 2 * (a * nu + u) + 1));
      o.trial = t;
      rows[job] = std::move(o);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < std::max<std::size_t>(spec.jobs, 1); ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

std::map<std::pair<double, double>, double> success_rates(const std::vector<TrialOutcome>& rows) {
  std::map<std::pair<double, double>, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& r : rows) {
    auto& c = counts[{r.alpha, r.upsilon}];
    c.first += r.success ? 1 : 0;
    ++c.second;
  }
  std::map<std::pair<double, double>, double> out;
  for (const auto& [cell, c] : counts) {
    out[cell] = static_cast<double>(c.first) / static_cast<double>(c.second);
  }
  return out;
}

void write_phase_csv(std::ostream& out, const PhaseGridSpec& spec,
                     const std::vector<TrialOutcome>& rows) {
  const auto f = format_real;
  out << "# phase d=" << spec.d << " n=" << spec.n << " r=" << spec.r << " variant="
      << to_string(spec.variant) << " gamma=" << f(spec.gamma) << " eps=" << f(spec.eps)
      << " threshold=" << f(spec.threshold) << " max_iters=" << spec.max_iters
      << " trials=" << spec.trials << " seed=" << spec.seed << " zeta0=auto alphas=";
  for (std::size_t i = 0; i < spec.alphas.size(); ++i) out << (i ? ";" : "") << f(spec.alphas[i]);
  out << " upsilons=";
  for (std::size_t i = 0; i < spec.upsilons.size(); ++i) {
    out << (i ? ";" : "") << f(spec.upsilons[i]);
  }
  out << '\n';
  out << "alpha,upsilon,trial,instance_seed,solver_seed,success,recovery_error,iterations,"
         "converged,final_error\n";
  for (const auto& r : rows) {
    out << f(r.alpha) << ',' << f(r.upsilon) << ',' << r.trial << ',' << r.instance_seed << ','
        << r.solver_seed << ',' << int(r.success) << ',' << f(r.recovery_error) << ','
        << r.iterations << ',' << int(r.converged) << ',' << f(r.final_error) << '\n';
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope needs two or more points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::vector<RuntimeRow> run_runtime(const RuntimeSpec& spec) {
  if (spec.ds.empty() || spec.variants.empty() || spec.trials < 1) {
    throw ConfigError("runtime study needs dims, variants and trials >= 1");
  }
  std::vector<RuntimeRow> rows;
  for (std::size_t d : spec.ds) {
    std::vector<RuntimeRow> at_d(spec.variants.size());
    for (std::size_t t = 0; t < spec.trials; ++t) {
      const Dims dims(spec.n, d);
      const DenseTensor x = make_instance(dims, Ranks(spec.n, spec.r), spec.alpha,
                                          derive_seed(spec.seed, d, t)).x;
      for (std::size_t v = 0; v < spec.variants.size(); ++v) {
        SolverConfig cfg;
        cfg.ranks.assign(spec.n, spec.r);
        cfg.variant = spec.variants[v];
        cfg.upsilon = spec.upsilon;
        cfg.gamma = spec.gamma;
        cfg.eps = spec.eps;
        cfg.max_iters = spec.max_iters;
        cfg.seed = derive_seed(spec.seed, d, 1000 + t);
        const auto t0 = Clock::now();
        const SolveResult res = solve(x, cfg);
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        RuntimeRow& row = at_d[v];
        row.total_ms.push_back(ms);
        const std::size_t iters = std::max<std::size_t>(res.trace.iterations(), 1);
        row.iter_ms.push_back(ms / static_cast<double>(iters));
        row.mean_iters += static_cast<double>(res.trace.iterations());
        row.converged += res.trace.termination == Termination::Converged ? 1 : 0;
      }
    }
    for (std::size_t v = 0; v < spec.variants.size(); ++v) {
      RuntimeRow& row = at_d[v];
      row.d = d;
      row.variant = spec.variants[v];
      row.trials = spec.trials;
      const double nt = static_cast<double>(spec.trials);
      row.mean_iters /= nt;
      row.mean_ms = std::accumulate(row.total_ms.begin(), row.total_ms.end(), 0.0) / nt;
      double var = 0.0;
      for (double m : row.total_ms) var += (m - row.mean_ms) * (m - row.mean_ms);
      row.std_ms = spec.trials > 1 ? std::sqrt(var / (nt - 1.0)) : 0.0;
      row.median_ms = median(row.total_ms);
      row.mean_iter_ms = std::accumulate(row.iter_ms.begin(), row.iter_ms.end(), 0.0) / nt;
      row.median_iter_ms = median(row.iter_ms);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_runtime_csv(std::ostream& out, const RuntimeSpec& spec,
                       const std::vector<RuntimeRow>& rows) {
  out << std::setprecision(10);
  out << "# runtime n=" << spec.n << " r=" << spec.r << " alpha=" << format_real(spec.alpha)
      << " upsilon=" << format_real(spec.upsilon) << " gamma=" << format_real(spec.gamma)
      << " eps=" << format_real(spec.eps)
      << " max_iters=" << spec.max_iters << " trials=" << spec.trials << " seed=" << spec.seed
      << " zeta0=auto\n";
  out << "d,variant,trials,mean_ms,std_ms,median_ms,mean_iter_ms,median_iter_ms,mean_iters,"
         "converged\n";
  for (const auto& r : rows) {
    out << r.d << ',' << to_string(r.variant) << ',' << r.trials << ',' << r.mean_ms << ','
        << r.std_ms << ',' << r.median_ms << ',' << r.mean_iter_ms << ',' << r.median_iter_ms
        << ',' << r.mean_iters << ',' << r.converged << '\n';
  }
}

}  // namespace rtcur
