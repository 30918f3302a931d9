#pragma once

#include <vector>

#include "rtcur/linalg.hpp"
#include "rtcur/sampling.hpp"
#include "rtcur/tensor.hpp"

namespace rtcur {

/// Tensor CUR representation L = core x_1 (C_1 U_1^+) x_2 ... x_n (C_n U_n^+),
/// where core = L(I_1..I_n), C_i = L_(i)(:, J_i) and U_i = C_i(I_i, :).
///
/// With U_i^+ = V_i S_i^+ W_i^T from the rank-r_i SVD, every evaluation goes
/// through reduced = core x_i W_i^T (r_1 x ... x r_n) and the d_i x r_i bases
/// C_i V_i S_i^+. Full reconstruction and block evaluation share these, so a
/// block equals the matching slice of the full tensor bit for bit.
struct CurModel {
  Dims dims;
  Ranks ranks;
  SampleIndices indices;
  DenseTensor core;
  std::vector<Matrix> fibers;              // C_i, d_i x |J_i|
  std::vector<TruncatedSvd> intersections;  // rank-r_i SVD of U_i
  std::vector<Matrix> pinvs;               // U_i^+, |J_i| x |I_i|
  std::vector<Matrix> factors;             // C_i U_i^+, d_i x |I_i|
  std::vector<Matrix> bases;               // C_i V_i S_i^+, d_i x r_i
  DenseTensor reduced;                     // core x_i W_i^T
  std::vector<double> sigma_min;           // retained sigma_{r_i} of U_i
  std::vector<bool> deficient;             // sigma_{r_i} at or below the pinv cutoff

  std::size_t order() const { return dims.size(); }
  bool rank_deficient() const;
};

/// Samples core and fibers from `x` and builds the model.
CurModel cur_decompose(const DenseTensor& x, const SampleIndices& idx, const Ranks& ranks);

/// Builds a model from already extracted blocks. Rank deficiency of any U_i
/// is recorded in the model, never thrown.
CurModel cur_from_blocks(const Dims& dims, const Ranks& ranks, SampleIndices idx,
                         DenseTensor core, std::vector<Matrix> fibers);

/// Full tensor, contracting modes 1..n in order.
DenseTensor cur_reconstruct(const CurModel& model);

/// L(rows_1, ..., rows_n), computed on the small factor rows only.
DenseTensor cur_eval_core(const CurModel& model, const IndexSets& rows);

/// L_(k)(:, at.cols[k-1]). Fiber indices are evaluated one fiber at a time by
/// contracting the core down to a vector; Chidori indices evaluate the whole
/// block with one pass of mode products. Every entry equals the matching
/// entry of cur_reconstruct bit for bit.
Matrix cur_eval_fibers(const CurModel& model, int mode, const SampleIndices& at);
Matrix cur_eval_fibers(const CurModel& model, int mode);

struct HosvdModel {
  DenseTensor core;
  std::vector<Matrix> factors;  // orthonormal columns
};

/// QR of each basis, contraction of the reduced core with the triangular
/// factors and an HOSVD of the small result truncated to the model ranks.
HosvdModel cur_to_hosvd(const CurModel& model);

DenseTensor hosvd_reconstruct(const HosvdModel& model);

}  // namespace rtcur
