#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rtcur {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Dims = std::vector<std::size_t>;

// One zero-based index set per mode.
using IndexSets = std::vector<std::vector<std::size_t>>;

std::size_t product(std::span<const std::size_t> dims);

/// Dense n-mode real tensor. Storage is column-major: the first index varies
/// fastest. Modes are numbered from 1 in every public function; entry
/// indices are zero-based.
class DenseTensor {
 public:
  /// Zero tensor of the given shape.
  explicit DenseTensor(Dims dims);
  DenseTensor(Dims dims, std::vector<double> data);

  std::size_t order() const { return dims_.size(); }
  const Dims& dims() const { return dims_; }
  std::size_t dim(int mode) const;
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double operator[](std::size_t linear) const { return data_[linear]; }
  double& operator[](std::size_t linear) { return data_[linear]; }

  double at(std::span<const std::size_t> index) const;
  double& at(std::span<const std::size_t> index);
  std::size_t linear_index(std::span<const std::size_t> index) const;

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  Dims dims_;
  std::vector<double> data_;
};

/// Bijection between tensor multi-indices and (row, column) positions of the
/// mode-k unfolding. Column index of (i_1..i_n) is sum over m != k of
/// i_m * prod_{l<m, l!=k} d_l.
class UnfoldingMap {
 public:
  UnfoldingMap(Dims dims, int mode);

  int mode() const { return mode_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::pair<std::size_t, std::size_t> position(std::span<const std::size_t> index) const;
  std::vector<std::size_t> multi_index(std::size_t row, std::size_t col) const;
  /// Other-mode indices (mode k entry left at 0) of an unfolding column.
  std::vector<std::size_t> column_index(std::size_t col) const;

 private:
  Dims dims_;
  int mode_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::size_t> col_strides_;
};

Matrix unfold(const DenseTensor& x, int mode);
DenseTensor fold(const Matrix& m, int mode, const Dims& dims);

/// Y = X x_k A, i.e. Y_(k) = A * X_(k). Every output entry is accumulated over
/// the contracted index in ascending order starting from zero, so products
/// with row-selected matrices reproduce the corresponding entries exactly.
DenseTensor mode_product(const DenseTensor& x, const Matrix& a, int mode);

DenseTensor subtensor(const DenseTensor& x, const IndexSets& index_sets);

/// Columns `cols` of the mode-k unfolding, i.e. X_(k)(:, cols).
Matrix unfolding_columns(const DenseTensor& x, int mode, std::span<const std::size_t> cols);

/// Reshape a matrix into a 2-mode tensor and back.
DenseTensor as_tensor(const Matrix& m);
Matrix as_matrix(const DenseTensor& t);

double fro_norm(const DenseTensor& x);
double inf_norm(const DenseTensor& x);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

DenseTensor operator-(const DenseTensor& a, const DenseTensor& b);
DenseTensor operator+(const DenseTensor& a, const DenseTensor& b);

// Throws ModeError unless 1 <= mode <= order.
void check_mode(std::size_t order, int mode);

}  // namespace rtcur
