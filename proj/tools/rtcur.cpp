// rtcur: robust tensor CUR solver and synthetic experiment driver.
#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "rtcur/error.hpp"
#include "rtcur/experiments.hpp"
#include "rtcur/model_io.hpp"
#include "rtcur/rtt_io.hpp"
#include "rtcur/solver.hpp"
#include "rtcur/sparsity.hpp"
#include "rtcur/synth.hpp"

namespace fs = std::filesystem;
using namespace rtcur;

namespace {

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof()) {
      throw ConfigError(std::string("cannot parse ") + what + " list '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(std::string("empty ") + what + " list");
  return out;
}

// A single rank is repeated for every mode.
Ranks expand_ranks(const std::vector<std::size_t>& given, std::size_t order) {
  if (given.size() == 1) return Ranks(order, given[0]);
  if (given.size() != order) {
    throw ConfigError("--rank has " + std::to_string(given.size()) + " entries for a " +
                      std::to_string(order) + "-mode tensor");
  }
  return given;
}

std::optional<double> parse_zeta0(const std::string& text) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("--zeta0 must be 'auto' or a number, got '" + text + "'");
}

// Flags shared by solve, phase and runtime.
struct SolverFlags {
  std::string rank = "3";
  std::string variant = "ff";
  double upsilon = 3.0;
  double gamma = 0.7;
  std::string zeta0 = "auto";
  double eps = 1e-5;
  std::size_t max_iters = 200;
  std::uint64_t seed = 0;

  void add(CLI::App& app) {
    app.add_option("--rank", rank, "Tucker rank, one value or r1,r2,...");
    app.add_option("--variant", variant, "ff, rf, fc or rc");
    app.add_option("--upsilon", upsilon, "sampling constant");
    app.add_option("--gamma", gamma, "threshold decay factor");
    app.add_option("--zeta0", zeta0, "initial threshold, 'auto' or a value");
    app.add_option("--eps", eps, "stopping tolerance on the sampled relative error");
    app.add_option("--max-iters", max_iters, "iteration cap");
    app.add_option("--seed", seed, "random seed");
  }

  SolverConfig config(std::size_t order) const {
    SolverConfig cfg;
    cfg.ranks = expand_ranks(parse_list<std::size_t>(rank, "rank"), order);
    cfg.variant = parse_variant(variant);
    cfg.upsilon = upsilon;
    cfg.gamma = gamma;
    cfg.zeta0 = parse_zeta0(zeta0);
    cfg.eps = eps;
    cfg.max_iters = max_iters;
    cfg.seed = seed;
    return cfg;
  }
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  return out;
}

// Writes to `path`, or to stdout when it is empty.
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out = open_out(path);
  write(out);
  if (!out) throw IoError(path + ": write failed");
}

void cmd_solve(const std::string& input, const std::string& out_dir, const SolverFlags& flags,
               bool timing) {
  const DenseTensor x = read_rtt(fs::path(input));
  const SolverConfig cfg = flags.config(x.order());
  spdlog::info("solving {} ({})", input, describe(cfg));

  DenseAccess access(x);
  Solver solver(access, cfg);
  while (!solver.finished()) {
    solver.step();
    spdlog::debug("k={} e={:.3e} zeta={:.3e}", solver.iteration(), solver.error(), solver.zeta());
  }
  const SolverTrace& trace = solver.trace();
  for (const auto& w : trace.warnings) spdlog::warn("{}", w);

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  save_model(solver.model(), dir / "model");
  {
    std::ofstream csv = open_out(dir / "trace.csv");
    write_trace_csv(csv, trace, describe(cfg), timing);
  }
  std::ostringstream summary;
  summary << "variant " << to_string(cfg.variant) << '\n'
          << "iterations " << trace.iterations() << '\n'
          << "termination "
          << (trace.termination == Termination::Converged ? "converged" : "max_iters") << '\n'
          << "final_error " << format_real(trace.final_error()) << '\n'
          << "entries_accessed " << solver.entries_read() << '\n'
          << "entries_total " << x.size() << '\n'
          << "rank_deficient " << (solver.model().rank_deficient() ? 1 : 0) << '\n';
  {
    std::ofstream s = open_out(dir / "summary.txt");
    s << summary.str();
  }
  std::cout << summary.str();
}

void cmd_synth(const std::string& dims_text, const std::string& rank_text, double alpha,
               std::uint64_t seed, const std::string& out_dir) {
  const Dims dims = parse_list<std::size_t>(dims_text, "dims");
  const Ranks ranks = expand_ranks(parse_list<std::size_t>(rank_text, "rank"), dims.size());
  const SyntheticInstance inst = make_instance(dims, ranks, alpha, seed);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_rtt(dir / "x.rtt", inst.x);
  write_rtt(dir / "lstar.rtt", inst.lstar);
  write_rtt(dir / "sstar.rtt", inst.sstar);
  std::cout << "outliers " << nnz(inst.sstar) << " of " << inst.x.size() << '\n';
}

void cmd_convert(const std::string& model_dir, const std::string& out_dir) {
  const CurModel model = load_model(fs::path(model_dir));
  const HosvdModel h = cur_to_hosvd(model);
  const DenseTensor ref = cur_reconstruct(model);
  const double scale = fro_norm(ref);
  const double diff = fro_norm(ref - hosvd_reconstruct(h));
  const double rel = scale > 0.0 ? diff / scale : diff;
  if (!(rel <= 1e-9)) {
    std::ostringstream msg;
    msg << "HOSVD reconstruction differs from the CUR model by " << rel << " relative";
    throw ConversionError(msg.str());
  }
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_rtt(dir / "core.rtt", h.core);
  for (std::size_t i = 0; i < h.factors.size(); ++i) {
    write_rtt(dir / ("factor" + std::to_string(i + 1) + ".rtt"), as_tensor(h.factors[i]));
  }
  std::cout << "parity " << rel << '\n';
}

void print_error(const std::string& kind, std::string message) {
  for (char& c : message) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "error kind=" << kind << " message=" << std::quoted(message) << '\n';
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("rtcur");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::err);
  if (const char* env = std::getenv("RTCUR_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Robust tensor CUR decomposition"};
  app.require_subcommand(1);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Decompose an .rtt tensor into low-rank plus sparse");
  std::string solve_input, solve_out = "rtcur-out";
  bool no_timing = false;
  SolverFlags solve_flags;
  solve_flags.gamma = 0.8;  // synthetic studies below default to 0.7
  solve_cmd->add_option("input", solve_input, "observed tensor (.rtt)")->required();
  solve_cmd->add_option("--out", solve_out, "output directory");
  solve_cmd->add_flag("--no-timing", no_timing, "write 0 in the millis column of the trace");
  solve_flags.add(*solve_cmd);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a planted low-rank plus outlier instance");
  std::string synth_dims = "100,100,100", synth_rank = "3", synth_out = "synth";
  double synth_alpha = 0.2;
  std::uint64_t synth_seed = 0;
  synth_cmd->add_option("--dims", synth_dims, "d1,d2,...");
  synth_cmd->add_option("--rank", synth_rank, "Tucker rank, one value or r1,r2,...");
  synth_cmd->add_option("--alpha", synth_alpha, "outlier fraction");
  synth_cmd->add_option("--seed", synth_seed, "random seed");
  synth_cmd->add_option("--out", synth_out, "output directory");

  // phase
  auto* phase_cmd = app.add_subcommand("phase", "Success-rate grid over alpha and upsilon");
  PhaseGridSpec phase;
  std::string phase_alphas = "0.1,0.2,0.3,0.4,0.5", phase_upsilons = "1,2,3,4,5";
  std::string phase_out, phase_variant = "rc", phase_rank = "3";
  phase_cmd->add_option("--d", phase.d, "size of every mode");
  phase_cmd->add_option("--n", phase.n, "number of modes");
  phase_cmd->add_option("--rank", phase_rank, "Tucker rank of every mode");
  phase_cmd->add_option("--alphas", phase_alphas, "alpha grid");
  phase_cmd->add_option("--upsilons", phase_upsilons, "upsilon grid");
  phase_cmd->add_option("--trials", phase.trials, "trials per cell");
  phase_cmd->add_option("--variant", phase_variant, "ff, rf, fc or rc");
  phase_cmd->add_option("--gamma", phase.gamma, "threshold decay factor");
  phase_cmd->add_option("--threshold", phase.threshold, "success threshold on the recovery error");
  phase_cmd->add_option("--eps", phase.eps, "stopping tolerance");
  phase_cmd->add_option("--max-iters", phase.max_iters, "iteration cap");
  phase_cmd->add_option("--seed", phase.seed, "random seed");
  phase_cmd->add_option("--jobs", phase.jobs, "worker threads");
  phase_cmd->add_option("--out", phase_out, "CSV path, stdout when omitted");

  // runtime
  auto* runtime_cmd = app.add_subcommand("runtime", "Wall time against dimension per variant");
  RuntimeSpec rt;
  std::string rt_dims = "100,200,400", rt_variants = "ff,rf,fc,rc", rt_out, rt_rank = "3";
  runtime_cmd->add_option("--dims", rt_dims, "list of mode sizes d");
  runtime_cmd->add_option("--n", rt.n, "number of modes");
  runtime_cmd->add_option("--rank", rt_rank, "Tucker rank of every mode");
  runtime_cmd->add_option("--alpha", rt.alpha, "outlier fraction");
  runtime_cmd->add_option("--upsilon", rt.upsilon, "sampling constant");
  runtime_cmd->add_option("--variants", rt_variants, "variants to time");
  runtime_cmd->add_option("--trials", rt.trials, "instances per dimension");
  runtime_cmd->add_option("--gamma", rt.gamma, "threshold decay factor");
  runtime_cmd->add_option("--eps", rt.eps, "stopping tolerance");
  runtime_cmd->add_option("--max-iters", rt.max_iters, "iteration cap");
  runtime_cmd->add_option("--seed", rt.seed, "random seed");
  runtime_cmd->add_option("--out", rt_out, "CSV path, stdout when omitted");

  // convert
  auto* convert_cmd = app.add_subcommand("convert", "Turn a saved CUR model into HOSVD form");
  std::string convert_in, convert_out = "hosvd";
  convert_cmd->add_option("model", convert_in, "model directory")->required();
  convert_cmd->add_option("--out", convert_out, "output directory");

  // sparsity
  auto* sparsity_cmd =
      app.add_subcommand("sparsity", "Monte-Carlo sparsity study of Bernoulli outlier tensors");
  std::size_t sp_d = 200, sp_n = 3, sp_trials = 100, sp_jobs = 1;
  double sp_alpha = 0.5;
  std::uint64_t sp_seed = 0;
  std::string sp_splits = "1,2", sp_out;
  sparsity_cmd->add_option("--d", sp_d, "size of every mode");
  sparsity_cmd->add_option("--n", sp_n, "number of modes");
  sparsity_cmd->add_option("--alpha", sp_alpha, "sparsity level; entries are Bernoulli(alpha/2)");
  sparsity_cmd->add_option("--trials", sp_trials, "number of draws");
  sparsity_cmd->add_option("--splits", sp_splits, "unfolding splits k for the M-sparsity check");
  sparsity_cmd->add_option("--seed", sp_seed, "random seed");
  sparsity_cmd->add_option("--jobs", sp_jobs, "worker threads");
  sparsity_cmd->add_option("--out", sp_out, "CSV path, stdout when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*solve_cmd) {
      cmd_solve(solve_input, solve_out, solve_flags, !no_timing);
    } else if (*synth_cmd) {
      cmd_synth(synth_dims, synth_rank, synth_alpha, synth_seed, synth_out);
    } else if (*phase_cmd) {
      phase.alphas = parse_list<double>(phase_alphas, "alpha");
      phase.upsilons = parse_list<double>(phase_upsilons, "upsilon");
      phase.r = parse_list<std::size_t>(phase_rank, "rank").front();
      phase.variant = parse_variant(phase_variant);
      const auto rows = run_phase_grid(phase);
      emit(phase_out, [&](std::ostream& o) { write_phase_csv(o, phase, rows); });
      for (const auto& [cell, rate] : success_rates(rows)) {
        spdlog::info("alpha={} upsilon={} success={}", cell.first, cell.second, rate);
      }
    } else if (*runtime_cmd) {
      rt.ds = parse_list<std::size_t>(rt_dims, "dims");
      rt.r = parse_list<std::size_t>(rt_rank, "rank").front();
      rt.variants.clear();
      std::stringstream ss(rt_variants);
      for (std::string v; std::getline(ss, v, ',');) rt.variants.push_back(parse_variant(v));
      const auto rows = run_runtime(rt);
      emit(rt_out, [&](std::ostream& o) { write_runtime_csv(o, rt, rows); });
    } else if (*convert_cmd) {
      cmd_convert(convert_in, convert_out);
    } else if (*sparsity_cmd) {
      auto splits = parse_list<std::size_t>(sp_splits, "split");
      const auto study =
          bernoulli_sparsity_study(sp_d, sp_n, sp_alpha, sp_trials, sp_seed, splits, sp_jobs);
      emit(sp_out, [&](std::ostream& o) { write_study_csv(o, study); });
    }
  } catch (const Error& e) {
    print_error(e.kind(), e.what());
    return 1;
  } catch (const fs::filesystem_error& e) {
    print_error("io", e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 3;
  }
  return 0;
}
