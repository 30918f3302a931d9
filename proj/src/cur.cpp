#include "rtcur/cur.hpp"

#include <algorithm>
#include <string>

#include "rtcur/error.hpp"

namespace rtcur {

namespace {

Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    out.row(static_cast<Eigen::Index>(a)) = m.row(static_cast<Eigen::Index>(rows[a]));
  }
  return out;
}

}  // namespace

bool CurModel::rank_deficient() const {
  return std::any_of(deficient.begin(), deficient.end(), [](bool b) { return b; });
}

CurModel cur_from_blocks(const Dims& dims, const Ranks& ranks, SampleIndices idx,
                         DenseTensor core, std::vector<Matrix> fibers) {
  const std::size_t n = dims.size();
  validate(idx, dims);
  if (ranks.size() != n) throw RankError("rank vector length must equal the order");
  if (fibers.size() != n) throw DimensionError("expected one fiber matrix per mode");
  Dims core_dims(n);
  for (std::size_t i = 0; i < n; ++i) core_dims[i] = idx.rows[i].size();
  if (core.dims() != core_dims) throw DimensionError("core dims do not match the row sets");

  CurModel model{dims, ranks, std::move(idx), std::move(core), std::move(fibers),
                 {}, {}, {}, {}, DenseTensor(Dims(n, 1)), {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const Matrix& c = model.fibers[i];
    if (static_cast<std::size_t>(c.rows()) != dims[i] ||
        static_cast<std::size_t>(c.cols()) != model.indices.cols[i].size()) {
      throw DimensionError("fiber matrix of mode " + std::to_string(i + 1) +
                           " has the wrong shape");
    }
    const std::size_t limit = std::min(model.indices.rows[i].size(), model.indices.cols[i].size());
    if (ranks[i] < 1 || ranks[i] > limit) {
      throw RankError("rank " + std::to_string(ranks[i]) + " of mode " + std::to_string(i + 1) +
                      " exceeds min(|I|, |J|) = " + std::to_string(limit));
    }
    const Matrix u = select_rows(c, model.indices.rows[i]);
    TruncatedSvd svd = truncated_svd(u, static_cast<Eigen::Index>(ranks[i]));
    const double tol = default_pinv_tolerance(u.rows(), u.cols());
    const double s1 = svd.singulars(0);
    const double sr = svd.singulars(svd.rank() - 1);
    model.sigma_min.push_back(sr);
    model.deficient.push_back(!(sr > tol * s1) || s1 == 0.0);
    model.pinvs.push_back(pinv_from_svd(svd, tol));
    // S^+ with the same cutoff as the pseudo-inverse.
    Matrix vs = svd.right;
    for (Eigen::Index j = 0; j < svd.rank(); ++j) {
      const double sj = svd.singulars(j);
      vs.col(j) *= (sj > tol * s1 && sj > 0.0) ? 1.0 / sj : 0.0;
    }
    model.bases.push_back(c * vs);
    model.factors.push_back(model.bases.back() * svd.left.transpose());
    model.intersections.push_back(std::move(svd));
  }
  DenseTensor g = model.core;
  for (std::size_t i = 0; i < n; ++i) {
    g = mode_product(g, model.intersections[i].left.transpose(), static_cast<int>(i + 1));
  }
  model.reduced = std::move(g);
  return model;
}

CurModel cur_decompose(const DenseTensor& x, const SampleIndices& idx, const Ranks& ranks) {
  validate(idx, x.dims());
  DenseTensor core = subtensor(x, idx.rows);
  std::vector<Matrix> fibers;
  for (std::size_t i = 0; i < x.order(); ++i) {
    fibers.push_back(unfolding_columns(x, static_cast<int>(i + 1), idx.cols[i]));
  }
  return cur_from_blocks(x.dims(), ranks, idx, std::move(core), std::move(fibers));
}

DenseTensor cur_reconstruct(const CurModel& model) {
  DenseTensor t = model.reduced;
  for (std::size_t m = 0; m < model.order(); ++m) {
    t = mode_product(t, model.bases[m], static_cast<int>(m + 1));
  }
  return t;
}

DenseTensor cur_eval_core(const CurModel& model, const IndexSets& rows) {
  if (rows.size() != model.order()) throw IndexError("expected one row set per mode");
  DenseTensor t = model.reduced;
  for (std::size_t m = 0; m < model.order(); ++m) {
    for (std::size_t i : rows[m]) {
      if (i >= model.dims[m]) throw IndexError("row index out of range");
    }
    t = mode_product(t, select_rows(model.bases[m], rows[m]), static_cast<int>(m + 1));
  }
  return t;
}

namespace {

// Both evaluation orders contract the modes in ascending order, like
// cur_reconstruct, so the results are exact slices of it.
Matrix eval_fiberwise(const CurModel& model, int mode, const std::vector<std::size_t>& cols) {
  const std::size_t k = static_cast<std::size_t>(mode - 1);
  const UnfoldingMap map(model.dims, mode);
  Matrix out(static_cast<Eigen::Index>(model.dims[k]), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto index = map.column_index(cols[c]);
    DenseTensor v = model.reduced;
    for (std::size_t m = 0; m < model.order(); ++m) {
      const int mm = static_cast<int>(m + 1);
      if (m == k) {
        v = mode_product(v, model.bases[m], mm);
      } else {
        v = mode_product(v, model.bases[m].middleRows(static_cast<Eigen::Index>(index[m]), 1), mm);
      }
    }
    out.col(static_cast<Eigen::Index>(c)) =
        Eigen::Map<const Vector>(v.data().data(), static_cast<Eigen::Index>(v.size()));
  }
  return out;
}

Matrix eval_blockwise(const CurModel& model, int mode, const IndexSets& rows) {
  const std::size_t k = static_cast<std::size_t>(mode - 1);
  DenseTensor t = model.reduced;
  for (std::size_t m = 0; m < model.order(); ++m) {
    const int mm = static_cast<int>(m + 1);
    t = mode_product(t, m == k ? model.bases[m] : select_rows(model.bases[m], rows[m]), mm);
  }
  return unfold(t, mode);
}

}  // namespace

Matrix cur_eval_fibers(const CurModel& model, int mode, const SampleIndices& at) {
  check_mode(model.order(), mode);
  if (at.order() != model.order()) throw IndexError("indices have the wrong number of modes");
  const auto& cols = at.cols[static_cast<std::size_t>(mode - 1)];
  if (at.strategy == Strategy::Chidori) {
    return eval_blockwise(model, mode, at.rows);
  }
  const std::size_t extent = product(model.dims) / model.dims[static_cast<std::size_t>(mode - 1)];
  for (std::size_t c : cols) {
    if (c >= extent) throw IndexError("column index out of range");
  }
  return eval_fiberwise(model, mode, cols);
}

Matrix cur_eval_fibers(const CurModel& model, int mode) {
  return cur_eval_fibers(model, mode, model.indices);
}

HosvdModel cur_to_hosvd(const CurModel& model) {
  const std::size_t n = model.order();
  std::vector<Matrix> qs;
  DenseTensor t1 = model.reduced;
  for (std::size_t i = 0; i < n; ++i) {
    ThinQr qr = thin_qr(model.bases[i]);
    t1 = mode_product(t1, qr.r, static_cast<int>(i + 1));
    qs.push_back(std::move(qr.q));
  }
  HosvdModel out{t1, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const int mode = static_cast<int>(i + 1);
    const Matrix unf = unfold(t1, mode);
    const Eigen::Index r = std::min<Eigen::Index>(static_cast<Eigen::Index>(model.ranks[i]),
                                                  std::min(unf.rows(), unf.cols()));
    const Matrix v = truncated_svd(unf, r).left;
    out.core = mode_product(out.core, v.transpose(), mode);
    out.factors.push_back(qs[i] * v);
  }
  return out;
}

DenseTensor hosvd_reconstruct(const HosvdModel& model) {
  DenseTensor t = model.core;
  for (std::size_t i = 0; i < model.factors.size(); ++i) {
    t = mode_product(t, model.factors[i], static_cast<int>(i + 1));
  }
  return t;
}

}  // namespace rtcur
