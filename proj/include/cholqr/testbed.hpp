#pragma once

// Controlled-condition test matrices and the stability metrics used to judge
// a factorization. Metrics run on gathered data, outside the algorithms.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cholqr/dense.hpp"
#include "cholqr/driver.hpp"
#include "cholqr/errors.hpp"

namespace cholqr {

struct GeneratedMatrix {
  Matrix matrix;
  std::uint64_t seed = 0;
  double target_condition = 1.0;
  /// Planted spectrum, descending, from 1 down to 1/κ.
  std::vector<double> singular_values;
};

/// σᵢ = κ^(−i/(n−1)) for i = 0..n−1; the first entry is exactly 1 and the last exactly 1/κ.
std::vector<double> geometric_spectrum(std::size_t n, double kappa);

/// Independent random streams derived from one user seed.
enum class RandomStream : std::uint64_t { left_factor = 1, right_factor = 2 };

/// SplitMix64 of (seed + golden·purpose); distinct purposes give unrelated mt19937_64 seeds.
std::uint64_t stream_seed(std::uint64_t seed, RandomStream purpose) noexcept;

/// Standard normal entries from mt19937_64 via Box-Muller, filled row by row.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Builds A = U·Σ·Vᵀ where U and V are the Q factors of Gaussian matrices.
///
/// U and V depend only on (m, n, seed), so they are computed once here and
/// reused for every condition number requested through make().
class SpectrumGenerator {
 public:
  /// Throws std::invalid_argument unless m ≥ n ≥ 2.
  SpectrumGenerator(std::size_t m, std::size_t n, std::uint64_t seed);

  /// Throws std::invalid_argument unless kappa ≥ 1 and finite.
  GeneratedMatrix make(double kappa) const;

  std::size_t rows() const noexcept { return m_; }
  std::size_t cols() const noexcept { return n_; }

 private:
  std::size_t m_;
  std::size_t n_;
  std::uint64_t seed_;
  Matrix left_;   // m×n
  Matrix right_;  // n×n
};

/// Same as SpectrumGenerator(m, n, seed).make(kappa).
GeneratedMatrix generate(std::size_t m, std::size_t n, double kappa, std::uint64_t seed);

/// ‖qᵀq − I‖_F / √n.
double orthogonality_error(ConstMatrixView q);

/// ‖q·r − a‖_F / ‖a‖_F. Throws ZeroMatrix for a = 0 and DimensionMismatch.
double residual_error(ConstMatrixView a, ConstMatrixView q, const UpperTriangular& r);

struct PanelBoundReport {
  std::size_t width = 0;
  double matrix_condition = 0.0;  // planted κ
  double panel_condition = 0.0;   // estimated cond of the leading panel
  double lower_bound = 0.0;       // σ_{1+(n−b)} / σ_b from the planted spectrum
  double slack = 0.0;
  bool upper_holds = false;
  bool lower_holds = false;

  bool passed() const noexcept { return upper_holds && lower_holds; }
};

/// Checks cond(A) ≥ cond(B) ≥ σ_{1+(n−b)}/σ_b for the leading b columns B of
/// a generated matrix, allowing `slack` relative error for the singular value
/// estimator. Requires 1 ≤ b < n. Propagates NoConvergence.
PanelBoundReport panel_bound_check(const GeneratedMatrix& gen, std::size_t b, double slack = 0.05);

struct StabilityReport {
  double orthogonality = 0.0;  // NaN after a breakdown
  double residual = 0.0;       // NaN after a breakdown
  std::optional<BreakdownInfo> breakdown;
  std::size_t allreduce_calls = 0;
  double elapsed_seconds = 0.0;
};

StabilityReport assess(ConstMatrixView a, const FactorResult& result);

}  // namespace cholqr
