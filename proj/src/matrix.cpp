#include "cholqr/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "cholqr/errors.hpp"

namespace cholqr {

void MatrixView::assign(ConstMatrixView src) const {
  if (src.rows() != rows_ || src.cols() != cols_) {
    throw DimensionMismatch("MatrixView::assign: shape mismatch");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    auto from = src.row(i);
    std::copy(from.begin(), from.end(), data_ + i * stride_);
  }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw DimensionMismatch("Matrix: expected " + std::to_string(rows * cols) + " values, got " +
                            std::to_string(values_.size()));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  values_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("Matrix: ragged initializer list");
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

Matrix::Matrix(ConstMatrixView view) : Matrix(view.rows(), view.cols()) {
  this->view().assign(view);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool operator==(const Matrix& a, const Matrix& b) noexcept {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_;
}

bool bitwise_equal(ConstMatrixView a, ConstMatrixView b) noexcept {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (a.cols() != 0 && std::memcmp(a.row(i).data(), b.row(i).data(), a.cols() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

UpperTriangular UpperTriangular::from_matrix(Matrix m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("UpperTriangular: matrix is not square");
  for (std::size_t i = 1; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (m(i, j) != 0.0) {
        throw std::invalid_argument("UpperTriangular: nonzero entry below the diagonal at (" +
                                    std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  return UpperTriangular(std::move(m));
}

}  // namespace cholqr
