#include "rtcur/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "rtcur/error.hpp"
#include "rtcur/rtt_io.hpp"

namespace rtcur {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.txt";
constexpr const char* kHeader = "rtcur-model 1";

std::string mode_file(const char* stem, std::size_t i, const char* suffix = "") {
  return std::string(stem) + std::to_string(i + 1) + suffix + ".rtt";
}

void write_list(std::ostream& out, const std::string& key, const std::vector<std::size_t>& v) {
  out << key << ' ' << v.size();
  for (std::size_t x : v) out << ' ' << x;
  out << '\n';
}

std::vector<std::size_t> read_counted(std::istringstream& line, const std::string& what) {
  std::size_t count = 0;
  if (!(line >> count)) throw IoError("manifest: missing count for " + what);
  std::vector<std::size_t> v(count);
  for (auto& x : v) {
    if (!(line >> x)) throw IoError("manifest: short list for " + what);
  }
  return v;
}

}  // namespace

void save_model(const CurModel& model, const fs::path& dir) {
  fs::create_directories(dir);
  const std::size_t n = model.order();
  {
    std::ofstream out(dir / kManifest, std::ios::trunc);
    if (!out) throw IoError((dir / kManifest).string() + ": cannot open for writing");
    out << kHeader << '\n';
    out << "order " << n << '\n';
    write_list(out, "dims", model.dims);
    write_list(out, "ranks", model.ranks);
    out << "strategy " << to_string(model.indices.strategy) << '\n';
    for (std::size_t i = 0; i < n; ++i) {
      write_list(out, "rows" + std::to_string(i + 1), model.indices.rows[i]);
      write_list(out, "cols" + std::to_string(i + 1), model.indices.cols[i]);
    }
    if (!out) throw IoError((dir / kManifest).string() + ": write failed");
  }
  write_rtt(dir / "core.rtt", model.core);
  for (std::size_t i = 0; i < n; ++i) {
    write_rtt(dir / mode_file("c", i), as_tensor(model.fibers[i]));
    const TruncatedSvd& svd = model.intersections[i];
    write_rtt(dir / mode_file("svd", i, "_left"), as_tensor(svd.left));
    write_rtt(dir / mode_file("svd", i, "_sigma"), as_tensor(svd.singulars));
    write_rtt(dir / mode_file("svd", i, "_right"), as_tensor(svd.right));
  }
}

CurModel load_model(const fs::path& dir) {
  std::ifstream in(dir / kManifest);
  if (!in) throw IoError((dir / kManifest).string() + ": cannot open for reading");
  std::string header;
  std::getline(in, header);
  if (header != kHeader) throw IoError((dir / kManifest).string() + ": unrecognized header");

  std::map<std::string, std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto space = line.find(' ');
    entries[line.substr(0, space)] = space == std::string::npos ? "" : line.substr(space + 1);
  }
  auto field = [&](const std::string& key) {
    const auto it = entries.find(key);
    if (it == entries.end()) throw IoError("manifest: missing field '" + key + "'");
    return std::istringstream(it->second);
  };

  std::size_t n = 0;
  if (!(field("order") >> n) || n == 0) throw IoError("manifest: bad order");
  auto dims_line = field("dims");
  const Dims dims = read_counted(dims_line, "dims");
  auto ranks_line = field("ranks");
  const Ranks ranks = read_counted(ranks_line, "ranks");
  if (dims.size() != n || ranks.size() != n) {
    throw DimensionError("manifest: dims/ranks length does not match the order");
  }
  std::string strategy;
  field("strategy") >> strategy;

  SampleIndices idx;
  idx.strategy = parse_strategy(strategy);
  for (std::size_t i = 0; i < n; ++i) {
    auto rows = field("rows" + std::to_string(i + 1));
    idx.rows.push_back(read_counted(rows, "rows"));
    auto cols = field("cols" + std::to_string(i + 1));
    idx.cols.push_back(read_counted(cols, "cols"));
  }
  validate(idx, dims);

  DenseTensor core = read_rtt(dir / "core.rtt");
  std::vector<Matrix> fibers;
  std::vector<TruncatedSvd> svds;
  for (std::size_t i = 0; i < n; ++i) {
    const DenseTensor c = read_rtt(dir / mode_file("c", i));
    if (c.order() != 2 || c.dims()[0] != dims[i] || c.dims()[1] != idx.cols[i].size()) {
      throw DimensionError(mode_file("c", i) + ": shape does not match the manifest");
    }
    fibers.push_back(as_matrix(c));
    TruncatedSvd svd;
    svd.left = as_matrix(read_rtt(dir / mode_file("svd", i, "_left")));
    svd.singulars = as_matrix(read_rtt(dir / mode_file("svd", i, "_sigma")));
    svd.right = as_matrix(read_rtt(dir / mode_file("svd", i, "_right")));
    const auto r = static_cast<Eigen::Index>(ranks[i]);
    if (svd.left.rows() != static_cast<Eigen::Index>(idx.rows[i].size()) ||
        svd.left.cols() != r || svd.singulars.size() != r ||
        svd.right.rows() != static_cast<Eigen::Index>(idx.cols[i].size()) ||
        svd.right.cols() != r) {
      throw DimensionError("svd" + std::to_string(i + 1) + ": shape does not match the manifest");
    }
    svds.push_back(std::move(svd));
  }

  // Derived factors are rebuilt from the fibers; the stored spectra must agree.
  CurModel model = cur_from_blocks(dims, ranks, idx, std::move(core), std::move(fibers));
  for (std::size_t i = 0; i < n; ++i) {
    const Vector& stored = svds[i].singulars;
    const Vector& fresh = model.intersections[i].singulars;
    const double scale = std::max(1.0, fresh.cwiseAbs().maxCoeff());
    if ((stored - fresh).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw DimensionError("svd" + std::to_string(i + 1) +
                           ": stored singular values disagree with the fibers");
    }
  }
  return model;
}

}  // namespace rtcur
