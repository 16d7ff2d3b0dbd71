#pragma once

// CholeskyQR family on 1-D block-row distributed matrices.
//
// Each function is a per-rank body: every rank of the communicator calls it
// with its own block, ranks talk only through allreduce, and the small n×n
// work (Cholesky, products of triangular factors) is repeated on every rank
// from identical reduced inputs. R therefore comes out bitwise identical on
// all ranks, and Q keeps the row partition of the input.
//
// Cholesky failures surface as CholeskyBreakdown, thrown identically on all ranks.

#include <optional>
#include <string_view>

#include "cholqr/dense.hpp"
#include "cholqr/dist_matrix.hpp"

namespace cholqr {

struct QRFactorization {
  DistributedMatrix q;
  UpperTriangular r;
};

/// Diagonal shift s = √m·u·‖A‖²_F applied to the Gram matrix by scqr.
struct ShiftPolicy {
  double unit_roundoff = cholqr::unit_roundoff;

  double shift(std::size_t global_rows, double frobenius_squared) const noexcept;
};

enum class Algorithm { cqr, cqr2, scqr, scqr3, cqrgs, cqr2gs, mcqr2gs };

const char* to_string(Algorithm algo) noexcept;
/// Throws std::invalid_argument for unknown names.
Algorithm parse_algorithm(std::string_view name);
/// True for the panel (Gram-Schmidt) variants.
bool uses_panels(Algorithm algo) noexcept;

/// One Gram allreduce, redundant Cholesky, local triangular solve.
QRFactorization cqr(const DistributedMatrix& a);

/// cqr applied twice; R = R₂·R₁. Two allreduce calls.
QRFactorization cqr2(const DistributedMatrix& a);

/// cqr on AᵀA + s·I. The Frobenius norm is summed with its own allreduce, so
/// this makes two calls. Q is only a preconditioned basis, not orthonormal to
/// working precision for ill-conditioned A.
QRFactorization scqr(const DistributedMatrix& a, const ShiftPolicy& policy = {});

/// scqr followed by cqr2 on its Q; R = R₂·R₁. Four allreduce calls.
QRFactorization scqr3(const DistributedMatrix& a, const ShiftPolicy& policy = {});

/// Panel-wise CholeskyQR with block Gram-Schmidt updates of the trailing
/// panels. 2k−1 allreduce calls: one Gram per panel plus one projection per
/// panel that has a trailing part.
QRFactorization cqrgs(const DistributedMatrix& a, const PanelSpec& spec);

/// cqrgs twice; R = R₂·R₁. The second pass uses `second` when given, else `spec`.
QRFactorization cqr2gs(const DistributedMatrix& a, const PanelSpec& spec,
                       const std::optional<PanelSpec>& second = std::nullopt);

/// Modified CQR2 with Gram-Schmidt: the first panel gets a full cqr2; every
/// later panel is projected against the previous Q panel, factored once,
/// reorthogonalized against all earlier Q panels and factored again before
/// it is used. 4k−2 allreduce calls.
QRFactorization mcqr2gs(const DistributedMatrix& a, const PanelSpec& spec);

}  // namespace cholqr
