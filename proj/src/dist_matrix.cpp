#include "cholqr/dist_matrix.hpp"

#include <stdexcept>
#include <string>

namespace cholqr {
namespace {

struct ColumnRange {
  std::size_t begin;
  std::size_t end;
};

void check_spec(const DistributedMatrix& dm, const PanelSpec& spec) {
  if (spec.columns() != dm.global_cols()) {
    throw std::invalid_argument("panel spec covers " + std::to_string(spec.columns()) +
                                " columns, matrix has " + std::to_string(dm.global_cols()));
  }
}

ColumnRange panel_range(const DistributedMatrix& dm, std::size_t j, const PanelSpec& spec) {
  check_spec(dm, spec);
  if (j >= spec.count()) {
    throw std::out_of_range("panel " + std::to_string(j) + " of " + std::to_string(spec.count()));
  }
  return {spec.begin(j), spec.end(j)};
}

ColumnRange trailing_range(const DistributedMatrix& dm, std::size_t j, const PanelSpec& spec) {
  const ColumnRange p = panel_range(dm, j, spec);
  return {p.end, spec.columns()};
}

ColumnRange leading_range(const DistributedMatrix& dm, std::size_t j, const PanelSpec& spec) {
  check_spec(dm, spec);
  if (j < 1 || j > spec.count()) {
    throw std::out_of_range("leading panels " + std::to_string(j) + " of " + std::to_string(spec.count()));
  }
  return {0, spec.end(j - 1)};
}

}  // namespace

DistributedMatrix::DistributedMatrix(Communicator& comm, std::size_t global_rows, Matrix local)
    : comm_(&comm), global_rows_(global_rows), local_(std::move(local)) {
  const RowRange range = block_row_range(global_rows, comm.size(), comm.rank());
  if (range.size() != local_.rows()) {
    throw std::invalid_argument("rank " + std::to_string(comm.rank()) + " holds " +
                                std::to_string(local_.rows()) + " rows, partition assigns " +
                                std::to_string(range.size()));
  }
  row_offset_ = range.begin;
}

DistributedMatrix DistributedMatrix::from_global(Communicator& comm, ConstMatrixView global) {
  if (static_cast<std::size_t>(comm.size()) > global.rows()) {
    throw std::invalid_argument("cannot distribute " + std::to_string(global.rows()) + " rows over " +
                                std::to_string(comm.size()) + " ranks");
  }
  const RowRange range = block_row_range(global.rows(), comm.size(), comm.rank());
  return {comm, global.rows(), Matrix(global.block(range.begin, 0, range.size(), global.cols()))};
}

PanelSpec PanelSpec::from_count(std::size_t n, std::size_t panels) {
  if (panels < 1 || panels > n) {
    throw std::invalid_argument("panel count " + std::to_string(panels) + " outside [1, " +
                                std::to_string(n) + "]");
  }
  return {n, (n + panels - 1) / panels};
}

PanelSpec PanelSpec::from_width(std::size_t n, std::size_t width) {
  if (width < 1 || width > n) {
    throw std::invalid_argument("panel width " + std::to_string(width) + " outside [1, " +
                                std::to_string(n) + "]");
  }
  return {n, width};
}

MatrixView panel(DistributedMatrix& dm, std::size_t j, const PanelSpec& spec) {
  const auto r = panel_range(dm, j, spec);
  return dm.local().columns(r.begin, r.end);
}

ConstMatrixView panel(const DistributedMatrix& dm, std::size_t j, const PanelSpec& spec) {
  const auto r = panel_range(dm, j, spec);
  return dm.local().columns(r.begin, r.end);
}

MatrixView trailing(DistributedMatrix& dm, std::size_t j, const PanelSpec& spec) {
  const auto r = trailing_range(dm, j, spec);
  return dm.local().columns(r.begin, r.end);
}

ConstMatrixView trailing(const DistributedMatrix& dm, std::size_t j, const PanelSpec& spec) {
  const auto r = trailing_range(dm, j, spec);
  return dm.local().columns(r.begin, r.end);
}

MatrixView leading_panels(DistributedMatrix& dm, std::size_t j, const PanelSpec& spec) {
  const auto r = leading_range(dm, j, spec);
  return dm.local().columns(r.begin, r.end);
}

ConstMatrixView leading_panels(const DistributedMatrix& dm, std::size_t j, const PanelSpec& spec) {
  const auto r = leading_range(dm, j, spec);
  return dm.local().columns(r.begin, r.end);
}

}  // namespace cholqr
