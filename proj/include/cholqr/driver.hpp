#pragma once

#include <cstddef>
#include <optional>

#include "cholqr/algorithms.hpp"
#include "cholqr/errors.hpp"

namespace cholqr {

struct FactorOptions {
  Algorithm algorithm = Algorithm::cqr2;
  int ranks = 1;
  Backend backend = Backend::serial;
  /// Requested panel count; only the panel variants accept values other than 1.
  std::size_t panels = 1;
  ShiftPolicy shift;
};

struct FactorResult {
  std::optional<Matrix> q;  // gathered in rank order
  std::optional<UpperTriangular> r;
  std::optional<BreakdownInfo> breakdown;
  std::size_t allreduce_calls = 0;
  /// Panel count actually used (⌈n/⌈n/panels⌉⌉); 1 for the non-panel algorithms.
  std::size_t panels = 1;
  std::size_t panel_width = 0;
  double elapsed_seconds = 0.0;

  bool ok() const noexcept { return !breakdown.has_value(); }
};

/// Dispatches `options.algorithm` from inside a rank body.
QRFactorization run_algorithm(const DistributedMatrix& a, const FactorOptions& options);

/// Scatters `a` over `options.ranks` ranks, runs the algorithm under the
/// chosen backend and gathers Q. A Cholesky breakdown is reported in the
/// result rather than thrown. Throws std::invalid_argument for bad options and
/// std::logic_error if R differs between ranks.
FactorResult factorize(ConstMatrixView a, const FactorOptions& options);

}  // namespace cholqr
