#include "rtcur/tensor.hpp"

#include <array>
#include <charconv>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "rtcur/error.hpp"

namespace rtcur {

std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void check_mode(std::size_t order, int mode) {
  if (mode < 1 || static_cast<std::size_t>(mode) > order) {
    throw ModeError("mode " + std::to_string(mode) + " out of range for order " +
                    std::to_string(order));
  }
}

namespace {

void check_dims(const Dims& dims) {
  if (dims.empty()) throw DimensionError("tensor must have at least one mode");
  for (std::size_t d : dims) {
    if (d == 0) throw DimensionError("tensor dimensions must be positive");
  }
}

// Strides of the column-major layout.
std::vector<std::size_t> strides_of(const Dims& dims) {
  std::vector<std::size_t> s(dims.size());
  std::size_t acc = 1;
  for (std::size_t m = 0; m < dims.size(); ++m) {
    s[m] = acc;
    acc *= dims[m];
  }
  return s;
}

}  // namespace

DenseTensor::DenseTensor(Dims dims) : dims_(std::move(dims)) {
  check_dims(dims_);
  data_.assign(product(dims_), 0.0);
}

DenseTensor::DenseTensor(Dims dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != product(dims_)) {
    throw DimensionError("data length " + std::to_string(data_.size()) +
                         " does not match the product of dims " +
                         std::to_string(product(dims_)));
  }
}

std::size_t DenseTensor::dim(int mode) const {
  check_mode(order(), mode);
  return dims_[mode - 1];
}

std::size_t DenseTensor::linear_index(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) throw IndexError("multi-index has wrong length");
  std::size_t linear = 0;
  std::size_t stride = 1;
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    if (index[m] >= dims_[m]) throw IndexError("multi-index out of range");
    linear += index[m] * stride;
    stride *= dims_[m];
  }
  return linear;
}

double DenseTensor::at(std::span<const std::size_t> index) const {
  return data_[linear_index(index)];
}

double& DenseTensor::at(std::span<const std::size_t> index) {
  return data_[linear_index(index)];
}

UnfoldingMap::UnfoldingMap(Dims dims, int mode) : dims_(std::move(dims)), mode_(mode) {
  check_dims(dims_);
  check_mode(dims_.size(), mode);
  const std::size_t k = static_cast<std::size_t>(mode - 1);
  rows_ = dims_[k];
  col_strides_.assign(dims_.size(), 0);
  std::size_t acc = 1;
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    if (m == k) continue;
    col_strides_[m] = acc;
    acc *= dims_[m];
  }
  cols_ = acc;
}

std::pair<std::size_t, std::size_t> UnfoldingMap::position(
    std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) throw IndexError("multi-index has wrong length");
  const std::size_t k = static_cast<std::size_t>(mode_ - 1);
  std::size_t col = 0;
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    if (index[m] >= dims_[m]) throw IndexError("multi-index out of range");
    if (m != k) col += index[m] * col_strides_[m];
  }
  return {index[k], col};
}

std::vector<std::size_t> UnfoldingMap::column_index(std::size_t col) const {
  if (col >= cols_) throw IndexError("unfolding column out of range");
  const std::size_t k = static_cast<std::size_t>(mode_ - 1);
  std::vector<std::size_t> index(dims_.size(), 0);
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    if (m == k) continue;
    index[m] = col % dims_[m];
    col /= dims_[m];
  }
  return index;
}

std::vector<std::size_t> UnfoldingMap::multi_index(std::size_t row, std::size_t col) const {
  if (row >= rows_) throw IndexError("unfolding row out of range");
  auto index = column_index(col);
  index[static_cast<std::size_t>(mode_ - 1)] = row;
  return index;
}

Matrix unfolding_columns(const DenseTensor& x, int mode, std::span<const std::size_t> cols) {
  const UnfoldingMap map(x.dims(), mode);
  const auto strides = strides_of(x.dims());
  const std::size_t k = static_cast<std::size_t>(mode - 1);
  const std::size_t rows = map.rows();
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols.size()));
  const auto data = x.data();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto index = map.column_index(cols[c]);
    std::size_t base = 0;
    for (std::size_t m = 0; m < index.size(); ++m) base += index[m] * strides[m];
    for (std::size_t i = 0; i < rows; ++i) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          data[base + i * strides[k]];
    }
  }
  return out;
}

Matrix unfold(const DenseTensor& x, int mode) {
  check_mode(x.order(), mode);
  const UnfoldingMap map(x.dims(), mode);
  std::vector<std::size_t> cols(map.cols());
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return unfolding_columns(x, mode, cols);
}

DenseTensor fold(const Matrix& m, int mode, const Dims& dims) {
  check_dims(dims);
  const UnfoldingMap map(dims, mode);
  if (static_cast<std::size_t>(m.rows()) != map.rows() ||
      static_cast<std::size_t>(m.cols()) != map.cols()) {
    throw DimensionError("matrix shape does not match the mode-" + std::to_string(mode) +
                         " unfolding of the target dims");
  }
  DenseTensor out(dims);
  const auto strides = strides_of(dims);
  const std::size_t k = static_cast<std::size_t>(mode - 1);
  auto data = out.data();
  for (std::size_t c = 0; c < map.cols(); ++c) {
    const auto index = map.column_index(c);
    std::size_t base = 0;
    for (std::size_t j = 0; j < index.size(); ++j) base += index[j] * strides[j];
    for (std::size_t i = 0; i < map.rows(); ++i) {
      data[base + i * strides[k]] =
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

DenseTensor mode_product(const DenseTensor& x, const Matrix& a, int mode) {
  check_mode(x.order(), mode);
  const std::size_t k = static_cast<std::size_t>(mode - 1);
  const Dims& dims = x.dims();
  const std::size_t dk = dims[k];
  if (static_cast<std::size_t>(a.cols()) != dk) {
    throw DimensionError("matrix has " + std::to_string(a.cols()) +
                         " columns but mode " + std::to_string(mode) + " has size " +
                         std::to_string(dk));
  }
  if (a.rows() == 0) throw DimensionError("mode product with an empty matrix");
  const std::size_t left = product(std::span(dims).first(k));
  const std::size_t right = product(std::span(dims).subspan(k + 1));
  const std::size_t out_k = static_cast<std::size_t>(a.rows());

  Dims out_dims = dims;
  out_dims[k] = out_k;
  DenseTensor out(out_dims);
  const double* src = x.data().data();
  double* dst = out.data().data();
  const double* coef = a.data();  // column-major: a(j, s) = coef[j + out_k * s]

  if (left == 1) {
    for (std::size_t r = 0; r < right; ++r) {
      const double* xs = src + dk * r;
      double* y = dst + out_k * r;
      for (std::size_t s = 0; s < dk; ++s) {
        const double v = xs[s];
        const double* col = coef + out_k * s;
        for (std::size_t j = 0; j < out_k; ++j) y[j] += col[j] * v;
      }
    }
    return out;
  }
  for (std::size_t r = 0; r < right; ++r) {
    for (std::size_t s = 0; s < dk; ++s) {
      const double* xs = src + left * (s + dk * r);
      for (std::size_t j = 0; j < out_k; ++j) {
        const double c = coef[j + out_k * s];
        double* y = dst + left * (j + out_k * r);
        for (std::size_t l = 0; l < left; ++l) y[l] += c * xs[l];
      }
    }
  }
  return out;
}

DenseTensor subtensor(const DenseTensor& x, const IndexSets& index_sets) {
  const Dims& dims = x.dims();
  if (index_sets.size() != dims.size()) {
    throw IndexError("expected one index set per mode");
  }
  Dims out_dims(dims.size());
  for (std::size_t m = 0; m < dims.size(); ++m) {
    const auto& set = index_sets[m];
    if (set.empty()) throw IndexError("empty index set for mode " + std::to_string(m + 1));
    std::vector<bool> seen(dims[m], false);
    for (std::size_t i : set) {
      if (i >= dims[m]) {
        throw IndexError("index " + std::to_string(i) + " out of range for mode " +
                         std::to_string(m + 1));
      }
      if (seen[i]) {
        throw IndexError("duplicate index " + std::to_string(i) + " in mode " +
                         std::to_string(m + 1));
      }
      seen[i] = true;
    }
    out_dims[m] = set.size();
  }

  DenseTensor out(out_dims);
  const auto strides = strides_of(dims);
  const std::size_t n = dims.size();
  std::vector<std::size_t> counter(n, 0);
  const auto src = x.data();
  auto dst = out.data();
  // Column-major odometer over the output; the first mode is innermost.
  std::size_t outer_offset = 0;
  const std::size_t inner = out_dims[0];
  const std::size_t blocks = out.size() / inner;
  for (std::size_t b = 0; b < blocks; ++b) {
    outer_offset = 0;
    for (std::size_t m = 1; m < n; ++m) outer_offset += index_sets[m][counter[m]] * strides[m];
    double* row = dst.data() + b * inner;
    for (std::size_t a = 0; a < inner; ++a) row[a] = src[outer_offset + index_sets[0][a]];
    for (std::size_t m = 1; m < n; ++m) {
      if (++counter[m] < out_dims[m]) break;
      counter[m] = 0;
    }
  }
  return out;
}

DenseTensor as_tensor(const Matrix& m) {
  const std::size_t rows = static_cast<std::size_t>(m.rows());
  const std::size_t cols = static_cast<std::size_t>(m.cols());
  return DenseTensor({rows, cols}, std::vector<double>(m.data(), m.data() + m.size()));
}

Matrix as_matrix(const DenseTensor& t) {
  if (t.order() > 2) throw DimensionError("only 1- and 2-mode tensors convert to matrices");
  const Eigen::Index rows = static_cast<Eigen::Index>(t.dims()[0]);
  const Eigen::Index cols = t.order() == 2 ? static_cast<Eigen::Index>(t.dims()[1]) : 1;
  return Eigen::Map<const Matrix>(t.data().data(), rows, cols);
}

double fro_norm(const DenseTensor& x) {
  double sum = 0.0;
  for (double v : x.data()) sum += v * v;
  return std::sqrt(sum);
}

double inf_norm(const DenseTensor& x) {
  double m = 0.0;
  for (double v : x.data()) m = std::max(m, std::abs(v));
  return m;
}

namespace {

template <typename Op>
DenseTensor elementwise(const DenseTensor& a, const DenseTensor& b, Op op) {
  if (a.dims() != b.dims()) throw DimensionError("elementwise operation on mismatched dims");
  DenseTensor out(a.dims());
  auto o = out.data();
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = op(x[i], y[i]);
  return out;
}

}  // namespace

DenseTensor operator-(const DenseTensor& a, const DenseTensor& b) {
  return elementwise(a, b, std::minus<>());
}

DenseTensor operator+(const DenseTensor& a, const DenseTensor& b) {
  return elementwise(a, b, std::plus<>());
}

std::string format_real(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace rtcur
