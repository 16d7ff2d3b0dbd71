#pragma once

// Sequential dense kernels. Every rank calls these on its own data; results
// depend only on the inputs, so redundant computations agree bitwise.

#include <cstddef>

#include "cholqr/matrix.hpp"

namespace cholqr {

/// Unit roundoff of IEEE-754 binary64.
inline constexpr double unit_roundoff = 0x1p-53;

enum class Transpose { no, yes };

/// aᵀa. The upper triangle is computed and mirrored, so the result is exactly symmetric.
Matrix gram(ConstMatrixView a);

/// a·b, or aᵀ·b with Transpose::yes. Throws DimensionMismatch.
Matrix matmul(ConstMatrixView a, ConstMatrixView b, Transpose transpose_a = Transpose::no);

/// c − q·y. Throws DimensionMismatch.
Matrix subtract_product(ConstMatrixView c, ConstMatrixView q, ConstMatrixView y);

/// c ← c − q·y through a view. Bitwise identical to subtract_product.
void subtract_product_inplace(MatrixView c, ConstMatrixView q, ConstMatrixView y);

/// Upper Cholesky factor U with UᵀU = w. Only the upper triangle of `w` is read.
///
/// Orders up to 512 use an unblocked right-looking sweep; larger orders use a
/// blocked right-looking variant with 64-wide blocks. Throws
/// NotPositiveDefinite with the index of the first pivot that is not strictly
/// positive (NaN pivots included).
UpperTriangular cholesky_upper(ConstMatrixView w);

namespace detail {
UpperTriangular cholesky_upper_unblocked(ConstMatrixView w);
UpperTriangular cholesky_upper_blocked(ConstMatrixView w, std::size_t block);
}  // namespace detail

/// X with X·u = a, by forward substitution over the columns of u.
/// Throws DimensionMismatch or SingularTriangular.
Matrix solve_right_triangular(ConstMatrixView a, const UpperTriangular& u);

/// Overwrites `a` with a·u⁻¹. Bitwise identical to solve_right_triangular.
void solve_right_triangular_inplace(MatrixView a, const UpperTriangular& u);

/// r2·r1, skipping the structurally zero region.
UpperTriangular triangular_product(const UpperTriangular& r2, const UpperTriangular& r1);

double frobenius_norm_squared(ConstMatrixView a);

struct ThinQR {
  Matrix q;           // m×n, orthonormal columns
  UpperTriangular r;  // n×n, non-negative diagonal
};

/// Householder QR used as a validation oracle. Requires rows ≥ cols.
/// The diagonal of R is made non-negative by flipping matching columns of Q.
/// Rank deficiency is not detected.
ThinQR householder_qr_reference(ConstMatrixView a);

struct SingularValueEstimate {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
};

/// Largest singular value by power iteration on aᵀa, smallest by inverse
/// iteration through the Householder R of a. These are estimates: each stops
/// once the Rayleigh quotient changes by at most `tol` relative.
/// Throws SingularTriangular (exactly rank-deficient a) or NoConvergence.
SingularValueEstimate extreme_singular_values(ConstMatrixView a, std::size_t max_iters = 10000,
                                              double tol = 1e-12);

}  // namespace cholqr
