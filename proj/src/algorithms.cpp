#include "cholqr/algorithms.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cholqr/errors.hpp"

namespace cholqr {
namespace {

struct Where {
  BreakdownStage stage;
  std::optional<std::size_t> panel;
};

UpperTriangular factor_or_break(ConstMatrixView w, Where where) {
  try {
    return cholesky_upper(w);
  } catch (const NotPositiveDefinite& e) {
    throw CholeskyBreakdown({where.stage, e.pivot_index(), where.panel});
  }
}

// Gram reduce, redundant Cholesky, local solve: the block is overwritten by its Q.
UpperTriangular cqr_inplace(Communicator& comm, MatrixView block, Where where) {
  const Matrix w = comm.allreduce_sum(gram(block));
  UpperTriangular u = factor_or_break(w, where);
  solve_right_triangular_inplace(block, u);
  return u;
}

void require_tall(const DistributedMatrix& a, const char* name) {
  if (a.global_rows() < a.global_cols()) {
    throw std::invalid_argument(std::string(name) + ": needs m >= n, got " + std::to_string(a.global_rows()) +
                                "x" + std::to_string(a.global_cols()));
  }
}

void require_spec(const DistributedMatrix& a, const PanelSpec& spec, const char* name) {
  if (spec.columns() != a.global_cols()) {
    throw std::invalid_argument(std::string(name) + ": panel spec covers " + std::to_string(spec.columns()) +
                                " columns, matrix has " + std::to_string(a.global_cols()));
  }
}

void add_into(MatrixView dst, ConstMatrixView src) {
  for (std::size_t i = 0; i < dst.rows(); ++i) {
    auto d = dst.row(i);
    auto s = src.row(i);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] += s[j];
  }
}

// One CQRGS sweep over `work`, which ends up holding Q.
UpperTriangular cqrgs_sweep(Communicator& comm, Matrix& work, const PanelSpec& spec, BreakdownStage stage) {
  const std::size_t n = work.cols();
  Matrix r(n, n);
  for (std::size_t j = 0; j < spec.count(); ++j) {
    const std::size_t c0 = spec.begin(j);
    const std::size_t c1 = spec.end(j);
    const std::size_t width = c1 - c0;
    MatrixView current = work.columns(c0, c1);
    const UpperTriangular u = cqr_inplace(comm, current, {stage, j});
    r.block(c0, c0, width, width).assign(u);
    if (c1 == n) continue;
    MatrixView rest = work.columns(c1, n);
    const Matrix y = comm.allreduce_sum(matmul(current, rest, Transpose::yes));
    subtract_product_inplace(rest, current, y);
    r.block(c0, c1, width, n - c1).assign(y);
  }
  return UpperTriangular::from_matrix(std::move(r));
}

}  // namespace

double ShiftPolicy::shift(std::size_t global_rows, double frobenius_squared) const noexcept {
  return std::sqrt(static_cast<double>(global_rows)) * unit_roundoff * frobenius_squared;
}

const char* to_string(Algorithm algo) noexcept {
  switch (algo) {
    case Algorithm::cqr: return "cqr";
    case Algorithm::cqr2: return "cqr2";
    case Algorithm::scqr: return "scqr";
    case Algorithm::scqr3: return "scqr3";
    case Algorithm::cqrgs: return "cqrgs";
    case Algorithm::cqr2gs: return "cqr2gs";
    case Algorithm::mcqr2gs: return "mcqr2gs";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::cqr, Algorithm::cqr2, Algorithm::scqr, Algorithm::scqr3, Algorithm::cqrgs,
                      Algorithm::cqr2gs, Algorithm::mcqr2gs}) {
    if (name == to_string(a)) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

bool uses_panels(Algorithm algo) noexcept {
  return algo == Algorithm::cqrgs || algo == Algorithm::cqr2gs || algo == Algorithm::mcqr2gs;
}

QRFactorization cqr(const DistributedMatrix& a) {
  require_tall(a, "cqr");
  Matrix q = a.local();
  UpperTriangular r = cqr_inplace(a.comm(), q.view(), {BreakdownStage::cqr, std::nullopt});
  return {DistributedMatrix(a.comm(), a.global_rows(), std::move(q)), std::move(r)};
}

QRFactorization cqr2(const DistributedMatrix& a) {
  require_tall(a, "cqr2");
  Matrix q = a.local();
  const UpperTriangular r1 = cqr_inplace(a.comm(), q.view(), {BreakdownStage::first_pass, std::nullopt});
  const UpperTriangular r2 = cqr_inplace(a.comm(), q.view(), {BreakdownStage::second_pass, std::nullopt});
  return {DistributedMatrix(a.comm(), a.global_rows(), std::move(q)), triangular_product(r2, r1)};
}

QRFactorization scqr(const DistributedMatrix& a, const ShiftPolicy& policy) {
  require_tall(a, "scqr");
  Communicator& comm = a.comm();
  const double norm_squared = comm.allreduce_sum(frobenius_norm_squared(a.local()));
  const double s = policy.shift(a.global_rows(), norm_squared);
  Matrix w = comm.allreduce_sum(gram(a.local()));
  for (std::size_t i = 0; i < w.rows(); ++i) w(i, i) += s;
  UpperTriangular r = factor_or_break(w, {BreakdownStage::shifted, std::nullopt});
  return {DistributedMatrix(comm, a.global_rows(), solve_right_triangular(a.local(), r)), std::move(r)};
}

QRFactorization scqr3(const DistributedMatrix& a, const ShiftPolicy& policy) {
  QRFactorization pre = scqr(a, policy);
  QRFactorization post = cqr2(pre.q);
  return {std::move(post.q), triangular_product(post.r, pre.r)};
}

QRFactorization cqrgs(const DistributedMatrix& a, const PanelSpec& spec) {
  require_tall(a, "cqrgs");
  require_spec(a, spec, "cqrgs");
  Matrix q = a.local();
  UpperTriangular r = cqrgs_sweep(a.comm(), q, spec, BreakdownStage::panel);
  return {DistributedMatrix(a.comm(), a.global_rows(), std::move(q)), std::move(r)};
}

QRFactorization cqr2gs(const DistributedMatrix& a, const PanelSpec& spec, const std::optional<PanelSpec>& second) {
  require_tall(a, "cqr2gs");
  require_spec(a, spec, "cqr2gs");
  const PanelSpec& spec2 = second ? *second : spec;
  require_spec(a, spec2, "cqr2gs");
  Matrix q = a.local();
  const UpperTriangular r1 = cqrgs_sweep(a.comm(), q, spec, BreakdownStage::first_pass);
  const UpperTriangular r2 = cqrgs_sweep(a.comm(), q, spec2, BreakdownStage::second_pass);
  return {DistributedMatrix(a.comm(), a.global_rows(), std::move(q)), triangular_product(r2, r1)};
}

QRFactorization mcqr2gs(const DistributedMatrix& a, const PanelSpec& spec) {
  require_tall(a, "mcqr2gs");
  require_spec(a, spec, "mcqr2gs");
  Communicator& comm = a.comm();
  const std::size_t n = a.global_cols();
  Matrix work = a.local();
  Matrix r(n, n);

  {
    const std::size_t c1 = spec.end(0);
    MatrixView first = work.columns(0, c1);
    const UpperTriangular u1 = cqr_inplace(comm, first, {BreakdownStage::panel1_cqr2, 0});
    const UpperTriangular u2 = cqr_inplace(comm, first, {BreakdownStage::panel1_cqr2, 0});
    r.block(0, 0, c1, c1).assign(triangular_product(u2, u1));
  }

  for (std::size_t j = 1; j < spec.count(); ++j) {
    const std::size_t p0 = spec.begin(j - 1);
    const std::size_t c0 = spec.begin(j);
    const std::size_t c1 = spec.end(j);
    const std::size_t width = c1 - c0;

    // Project the newest Q panel out of everything to its right.
    ConstMatrixView previous = work.columns(p0, c0);
    MatrixView rest = work.columns(c0, n);
    const Matrix y = comm.allreduce_sum(matmul(previous, rest, Transpose::yes));
    subtract_product_inplace(rest, previous, y);
    r.block(p0, c0, c0 - p0, n - c0).assign(y);

    MatrixView current = work.columns(c0, c1);
    const UpperTriangular u1 = cqr_inplace(comm, current, {BreakdownStage::first_cqr, j});

    // Reorthogonalize against all finished panels.
    ConstMatrixView done = work.columns(0, c0);
    const Matrix c = comm.allreduce_sum(matmul(done, current, Transpose::yes));
    subtract_product_inplace(current, done, c);

    const UpperTriangular u2 = cqr_inplace(comm, current, {BreakdownStage::second_cqr, j});
    r.block(c0, c0, width, width).assign(triangular_product(u2, u1));
    add_into(r.block(0, c0, c0, width), matmul(c, u1));
  }
  return {DistributedMatrix(comm, a.global_rows(), std::move(work)), UpperTriangular::from_matrix(std::move(r))};
}

}  // namespace cholqr
