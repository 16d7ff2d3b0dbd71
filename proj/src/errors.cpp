#include "cholqr/errors.hpp"

namespace cholqr {

NotPositiveDefinite::NotPositiveDefinite(std::size_t pivot_index)
    : std::runtime_error("matrix is not positive definite: pivot " + std::to_string(pivot_index) +
                         " is not positive"),
      pivot_index_(pivot_index) {}

SingularTriangular::SingularTriangular(std::size_t index)
    : std::runtime_error("triangular matrix is singular: zero diagonal at " + std::to_string(index)),
      index_(index) {}

NoConvergence::NoConvergence(std::size_t iterations)
    : std::runtime_error("iteration did not converge after " + std::to_string(iterations) + " steps"),
      iterations_(iterations) {}

ShapeMismatch::ShapeMismatch(int rank)
    : std::runtime_error("collective payload shape on rank " + std::to_string(rank) +
                         " differs from rank 0"),
      rank_(rank) {}

const char* to_string(BreakdownStage stage) noexcept {
  switch (stage) {
    case BreakdownStage::cqr: return "cqr";
    case BreakdownStage::first_pass: return "first-pass";
    case BreakdownStage::second_pass: return "second-pass";
    case BreakdownStage::shifted: return "shifted";
    case BreakdownStage::panel: return "panel";
    case BreakdownStage::panel1_cqr2: return "panel1-cqr2";
    case BreakdownStage::first_cqr: return "first-cqr";
    case BreakdownStage::second_cqr: return "second-cqr";
  }
  return "unknown";
}

namespace {

std::string describe(const BreakdownInfo& info) {
  std::string msg = "Cholesky breakdown (";
  msg += to_string(info.stage);
  if (info.panel_index) msg += ", panel " + std::to_string(*info.panel_index);
  msg += ", pivot " + std::to_string(info.pivot_index) + ")";
  return msg;
}

}  // namespace

CholeskyBreakdown::CholeskyBreakdown(BreakdownInfo info)
    : std::runtime_error(describe(info)), info_(info) {}

}  // namespace cholqr
