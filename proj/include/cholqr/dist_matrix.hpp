#pragma once

#include <cstddef>

#include "cholqr/comm.hpp"
#include "cholqr/matrix.hpp"

namespace cholqr {

/// This rank's contiguous block of rows of an m×n matrix split across the
/// ranks of a communicator by the block_row_range rule.
class DistributedMatrix {
 public:
  /// Throws std::invalid_argument if `local` does not have the row count the
  /// partition rule assigns to this rank.
  DistributedMatrix(Communicator& comm, std::size_t global_rows, Matrix local);

  /// Takes this rank's rows of a matrix every rank can see (harness setup).
  static DistributedMatrix from_global(Communicator& comm, ConstMatrixView global);

  std::size_t global_rows() const noexcept { return global_rows_; }
  std::size_t global_cols() const noexcept { return local_.cols(); }
  std::size_t row_offset() const noexcept { return row_offset_; }
  Communicator& comm() const noexcept { return *comm_; }

  const Matrix& local() const noexcept { return local_; }
  Matrix& local() noexcept { return local_; }
  Matrix release_local() && { return std::move(local_); }

 private:
  Communicator* comm_;
  std::size_t global_rows_;
  std::size_t row_offset_;
  Matrix local_;
};

/// Column panels [j·b, min((j+1)·b, n)) for j < k = ⌈n/b⌉; the last one may be narrower.
class PanelSpec {
 public:
  /// Width ⌈n/panels⌉. The resulting count is ⌈n/width⌉, which can be smaller
  /// than `panels` when panels does not divide n evenly (e.g. n=10, panels=6
  /// gives width 2 and 5 panels). Throws std::invalid_argument unless 1 ≤ panels ≤ n.
  static PanelSpec from_count(std::size_t n, std::size_t panels);
  /// Throws std::invalid_argument unless 1 ≤ width ≤ n.
  static PanelSpec from_width(std::size_t n, std::size_t width);

  std::size_t width() const noexcept { return width_; }
  std::size_t count() const noexcept { return count_; }
  std::size_t columns() const noexcept { return n_; }

  std::size_t begin(std::size_t j) const noexcept { return j * width_; }
  std::size_t end(std::size_t j) const noexcept { return j + 1 >= count_ ? n_ : (j + 1) * width_; }

  friend bool operator==(const PanelSpec&, const PanelSpec&) = default;

 private:
  PanelSpec(std::size_t n, std::size_t width) : n_(n), width_(width), count_((n + width - 1) / width) {}
  std::size_t n_;
  std::size_t width_;
  std::size_t count_;
};

// Views alias the local block; writes through them are visible in the matrix.
// panel and leading_panels throw std::out_of_range for bad j; trailing accepts
// j < k and returns a 0-column view for the last panel.

MatrixView panel(DistributedMatrix& dm, std::size_t j, const PanelSpec& spec);
ConstMatrixView panel(const DistributedMatrix& dm, std::size_t j, const PanelSpec& spec);

MatrixView trailing(DistributedMatrix& dm, std::size_t j, const PanelSpec& spec);
ConstMatrixView trailing(const DistributedMatrix& dm, std::size_t j, const PanelSpec& spec);

/// Columns [0, j·b) for 1 ≤ j ≤ k.
MatrixView leading_panels(DistributedMatrix& dm, std::size_t j, const PanelSpec& spec);
ConstMatrixView leading_panels(const DistributedMatrix& dm, std::size_t j, const PanelSpec& spec);

}  // namespace cholqr
