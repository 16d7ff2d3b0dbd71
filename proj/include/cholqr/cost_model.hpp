#pragma once

// Analytic operation counts. Flops are raw counts, words are doubles moved,
// messages count log₂P tree steps per allreduce. No time model.

#include <cstddef>
#include <optional>
#include <string>

#include "cholqr/algorithms.hpp"
#include "cholqr/dist_matrix.hpp"

namespace cholqr {

struct CostEstimate {
  std::string model;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t ranks = 1;
  std::optional<std::size_t> panel_width;
  double flops = 0.0;
  double words = 0.0;
  double messages = 0.0;
  /// Allreduce calls the formula assumes; messages = calls·log₂P.
  double calls = 0.0;
};

/// One Gram reduce: n³/3 + 2mn²/P + n²log₂P.
CostEstimate cqr_cost(std::size_t m, std::size_t n, std::size_t ranks);
CostEstimate cqr2_cost(std::size_t m, std::size_t n, std::size_t ranks);
CostEstimate scqr3_cost(std::size_t m, std::size_t n, std::size_t ranks);
/// Requires 1 ≤ b ≤ n.
CostEstimate cqr2gs_cost(std::size_t m, std::size_t n, std::size_t ranks, std::size_t b);
CostEstimate scalapack_qr_cost(std::size_t m, std::size_t n, std::size_t ranks);

/// Allreduce calls each algorithm issues, exactly as instrumented.
std::size_t predicted_allreduce_calls(Algorithm algo, const PanelSpec& spec);

/// Maps the formula's call count 2n²/b² (which assumes b | n and counts every
/// tile-pair reduce) onto the calls cqr2gs actually makes: the formula value
/// minus 2(k−1)², with k = ⌈n/b⌉. Exact when b divides n.
double reconcile_cqr2gs_calls(const CostEstimate& estimate);

/// Looks up a model by name: cqr, cqr2, scqr3, cqr2gs, scalapack.
/// Throws std::invalid_argument for unknown names or a missing width for cqr2gs.
CostEstimate cost_by_name(const std::string& model, std::size_t m, std::size_t n, std::size_t ranks,
                          std::optional<std::size_t> b);

}  // namespace cholqr
