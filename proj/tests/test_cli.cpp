#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rtcur/cur.hpp"
#include "rtcur/model_io.hpp"
#include "rtcur/rtt_io.hpp"
#include "rtcur/synth.hpp"

using namespace rtcur;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args, const std::string& env = "") {
  const fs::path out = fs::current_path() / "cli_stdout.txt";
  const fs::path err = fs::current_path() / "cli_stderr.txt";
  const std::string cmd = env + " \"" + std::string(RTCUR_CLI) + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

struct Workdir {
  fs::path path = fs::current_path() / "cli_work";
  Workdir() {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  std::string operator/(const std::string& s) const { return (path / s).string(); }
};

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("synth writes a consistent planted instance") {
  Workdir w;
  const Run r = run("synth --dims 10,10,10 --rank 2 --alpha 0.2 --seed 3 --out " + w / "s");
  REQUIRE(r.code == 0);
  const DenseTensor x = read_rtt(fs::path(w / "s/x.rtt"));
  const DenseTensor l = read_rtt(fs::path(w / "s/lstar.rtt"));
  const DenseTensor s = read_rtt(fs::path(w / "s/sstar.rtt"));
  CHECK(x - l - s == DenseTensor({10, 10, 10}));
  CHECK(nnz(s) == 200);
  REQUIRE(run("synth --dims 10,10,10 --rank 2 --alpha 0.2 --seed 3 --out " + w / "t").code == 0);
  CHECK(slurp(w / "s/x.rtt") == slurp(w / "t/x.rtt"));
}

TEST_CASE("solve and convert a clean tensor") {
  Workdir w;
  REQUIRE(run("synth --dims 30,30,30 --rank 3 --alpha 0 --seed 1 --out " + w / "s").code == 0);
  const Run r = run("solve " + w / "s/x.rtt" + " --rank 3 --variant ff --seed 7 --out " + w / "o");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("variant ff") != std::string::npos);
  CHECK(r.out.find("entries_accessed ") != std::string::npos);
  std::istringstream summary(slurp(w / "o/summary.txt"));
  double final_error = 1.0;
  for (std::string key; summary >> key;) {
    if (key == "final_error") summary >> final_error;
    else summary.ignore(1 << 20, '\n');
  }
  CHECK(final_error <= 1e-5);
  CHECK(fs::exists(w / "o/model/manifest.txt"));
  CHECK(slurp(w / "o/trace.csv").rfind("# variant=ff", 0) == 0);

  REQUIRE(run("convert " + w / "o/model" + " --out " + w / "h").code == 0);
  DenseTensor t = read_rtt(fs::path(w / "h/core.rtt"));
  for (int i = 1; i <= 3; ++i) {
    const Matrix f = as_matrix(read_rtt(fs::path(w / ("h/factor" + std::to_string(i) + ".rtt"))));
    CHECK((f.transpose() * f - Matrix::Identity(f.cols(), f.cols())).norm() <= 1e-9);
    t = mode_product(t, f, i);
  }
  const DenseTensor x = read_rtt(fs::path(w / "s/x.rtt"));
  CHECK(fro_norm(t - x) <= 1e-6 * fro_norm(x));
}

TEST_CASE("fixed seed gives byte-identical traces") {
  Workdir w;
  REQUIRE(run("synth --dims 25,25,25 --rank 2 --alpha 0.1 --seed 2 --out " + w / "s").code == 0);
  const std::string base = "solve " + w / "s/x.rtt" + " --rank 2 --variant ff --seed 7 --no-timing";
  REQUIRE(run(base + " --out " + w / "a").code == 0);
  REQUIRE(run(base + " --out " + w / "b").code == 0);
  CHECK(slurp(w / "a/trace.csv") == slurp(w / "b/trace.csv"));
}

TEST_CASE("errors are one machine-readable line") {
  Workdir w;
  {
    std::ofstream(w / "bad.rtt") << "NOPE";
    const Run r = run("solve " + w / "bad.rtt");
    CHECK(r.code != 0);
    CHECK(count_lines(r.err) == 1);
    CHECK(r.err.rfind("error kind=io ", 0) == 0);
    CHECK(r.err.find("bad.rtt") != std::string::npos);
    CHECK(r.err.find("offset 0") != std::string::npos);
  }
  {
    REQUIRE(run("synth --dims 8,8,8 --rank 2 --alpha 0 --out " + w / "s").code == 0);
    const Run r = run("solve " + w / "s/x.rtt" + " --rank 9");
    CHECK(r.code != 0);
    CHECK(r.err.rfind("error kind=config ", 0) == 0);
    CHECK(count_lines(r.err) == 1);
  }
  {
    const Run r = run("solve " + w / "s/x.rtt" + " --zeta0 lots");
    CHECK(r.err.rfind("error kind=config ", 0) == 0);
  }
  {
    const Run r = run("frobnicate");
    CHECK(r.code != 0);
    CHECK(r.err.rfind("error kind=usage ", 0) == 0);
  }
}

TEST_CASE("convert rejects a model whose manifest dims disagree") {
  Workdir w;
  REQUIRE(run("synth --dims 12,12,12 --rank 2 --alpha 0 --out " + w / "s").code == 0);
  REQUIRE(run("solve " + w / "s/x.rtt" + " --rank 2 --out " + w / "o").code == 0);
  std::string manifest = slurp(w / "o/model/manifest.txt");
  const auto pos = manifest.find("dims 3 12 12 12");
  REQUIRE(pos != std::string::npos);
  manifest.replace(pos, 15, "dims 3 12 13 12");
  std::ofstream(w / "o/model/manifest.txt") << manifest;
  const Run r = run("convert " + w / "o/model" + " --out " + w / "h");
  CHECK(r.code != 0);
  CHECK(r.err.rfind("error kind=dimension ", 0) == 0);
}

TEST_CASE("phase and sparsity CSVs") {
  Workdir w;
  const Run p = run("phase --d 15 --rank 2 --alphas 0,0.1 --upsilons 2,3 --trials 2 --jobs 2 --out " +
                    w / "phase.csv");
  REQUIRE(p.code == 0);
  const std::string csv = slurp(w / "phase.csv");
  CHECK(csv.rfind("# phase ", 0) == 0);
  CHECK(count_lines(csv) == 2 + 2 * 2 * 2);
  const Run s = run("sparsity --d 40 --alpha 0.5 --trials 4 --splits 1");
  REQUIRE(s.code == 0);
  CHECK(s.out.find("trial,t_sparse,m_sparse_k1") != std::string::npos);
  CHECK(s.out.find("frequency,") != std::string::npos);
}

TEST_CASE("runtime CSV has one row per dimension and variant") {
  const Run r = run("runtime --dims 12,16 --rank 2 --variants ff,fc --trials 2");
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out) == 2 + 4);
}

TEST_CASE("log level from the environment") {
  Workdir w;
  REQUIRE(run("synth --dims 8,8,8 --rank 2 --alpha 0 --out " + w / "s").code == 0);
  const Run quiet = run("solve " + w / "s/x.rtt" + " --rank 2 --out " + w / "o");
  CHECK(quiet.err.empty());
  const Run loud = run("solve " + w / "s/x.rtt" + " --rank 2 --out " + w / "o", "RTCUR_LOG=debug");
  CHECK(loud.err.find("k=1") != std::string::npos);
}
