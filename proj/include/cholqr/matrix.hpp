#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cholqr {

class Matrix;

/// Read-only strided window onto row-major storage.
class ConstMatrixView {
 public:
  ConstMatrixView() = default;
  ConstMatrixView(const double* data, std::size_t rows, std::size_t cols, std::size_t stride) noexcept
      : data_(data), rows_(rows), cols_(cols), stride_(stride) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t stride() const noexcept { return stride_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }
  const double* data() const noexcept { return data_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    assert(i < rows_ && j < cols_);
    return data_[i * stride_ + j];
  }
  std::span<const double> row(std::size_t i) const noexcept { return {data_ + i * stride_, cols_}; }

  ConstMatrixView block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const noexcept {
    assert(r0 + rows <= rows_ && c0 + cols <= cols_);
    return {data_ + r0 * stride_ + c0, rows, cols, stride_};
  }
  ConstMatrixView columns(std::size_t c0, std::size_t c1) const noexcept {
    return block(0, c0, rows_, c1 - c0);
  }

 private:
  const double* data_ = nullptr;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
};

/// Mutable strided window. Writes go straight to the viewed storage.
class MatrixView {
 public:
  MatrixView() = default;
  MatrixView(double* data, std::size_t rows, std::size_t cols, std::size_t stride) noexcept
      : data_(data), rows_(rows), cols_(cols), stride_(stride) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t stride() const noexcept { return stride_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }
  double* data() const noexcept { return data_; }

  double& operator()(std::size_t i, std::size_t j) const noexcept {
    assert(i < rows_ && j < cols_);
    return data_[i * stride_ + j];
  }
  std::span<double> row(std::size_t i) const noexcept { return {data_ + i * stride_, cols_}; }

  MatrixView block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const noexcept {
    assert(r0 + rows <= rows_ && c0 + cols <= cols_);
    return {data_ + r0 * stride_ + c0, rows, cols, stride_};
  }
  MatrixView columns(std::size_t c0, std::size_t c1) const noexcept { return block(0, c0, rows_, c1 - c0); }

  /// Copies `src` into the viewed region; shapes must agree.
  void assign(ConstMatrixView src) const;

  operator ConstMatrixView() const noexcept { return {data_, rows_, cols_, stride_}; }

 private:
  double* data_ = nullptr;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
  /// Takes `values` in row-major order; throws DimensionMismatch if the count is not rows*cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);
  explicit Matrix(ConstMatrixView view);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    assert(i < rows_ && j < cols_);
    return values_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept {
    assert(i < rows_ && j < cols_);
    return values_[i * cols_ + j];
  }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }

  ConstMatrixView view() const noexcept { return {values_.data(), rows_, cols_, cols_}; }
  MatrixView view() noexcept { return {values_.data(), rows_, cols_, cols_}; }
  operator ConstMatrixView() const noexcept { return view(); }

  ConstMatrixView block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const noexcept {
    return view().block(r0, c0, rows, cols);
  }
  MatrixView block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) noexcept {
    return view().block(r0, c0, rows, cols);
  }
  ConstMatrixView columns(std::size_t c0, std::size_t c1) const noexcept { return view().columns(c0, c1); }
  MatrixView columns(std::size_t c0, std::size_t c1) noexcept { return view().columns(c0, c1); }

  bool all_finite() const noexcept;

  /// Entrywise `==`; -0.0 equals 0.0 and NaN never compares equal. See bitwise_equal.
  friend bool operator==(const Matrix& a, const Matrix& b) noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Identical shape and identical bit patterns in every entry.
bool bitwise_equal(ConstMatrixView a, ConstMatrixView b) noexcept;

/// Square matrix whose strictly-lower entries are exactly zero.
class UpperTriangular {
 public:
  UpperTriangular() = default;
  explicit UpperTriangular(std::size_t order) : m_(order, order) {}

  /// Throws DimensionMismatch if `m` is not square and std::invalid_argument if
  /// any entry below the diagonal is nonzero.
  static UpperTriangular from_matrix(Matrix m);

  std::size_t order() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }
  ConstMatrixView view() const noexcept { return m_.view(); }
  operator ConstMatrixView() const noexcept { return m_.view(); }

  friend bool operator==(const UpperTriangular& a, const UpperTriangular& b) noexcept { return a.m_ == b.m_; }

 private:
  explicit UpperTriangular(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

}  // namespace cholqr
