#include "cholqr/dense.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cholqr/errors.hpp"

namespace cholqr {
namespace {

constexpr std::size_t kColumnTile = 128;
constexpr std::size_t kSolveRowBlock = 16;
constexpr std::size_t kUnblockedCholeskyLimit = 512;
constexpr std::size_t kCholeskyBlock = 64;

std::string shape(ConstMatrixView m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// c(i, j) += Σ_p a(p, i)·b(p, j) for j in [j_lo(i), c.cols()).
// Rows of a and b are consumed in groups of four; every entry of c sees the
// same summation order regardless of tiling.
template <bool UpperOnly>
void accumulate_tn(ConstMatrixView a, ConstMatrixView b, MatrixView c) {
  const std::size_t m = a.rows();
  const std::size_t ni = a.cols();
  const std::size_t nj = b.cols();
  const std::size_t m4 = m - m % 4;
  for (std::size_t jc = 0; jc < nj; jc += kColumnTile) {
    const std::size_t je = std::min(nj, jc + kColumnTile);
    const std::size_t i_end = UpperOnly ? std::min(ni, je) : ni;
    for (std::size_t p = 0; p < m4; p += 4) {
      const double* a0 = a.row(p).data();
      const double* a1 = a.row(p + 1).data();
      const double* a2 = a.row(p + 2).data();
      const double* a3 = a.row(p + 3).data();
      const double* b0 = b.row(p).data();
      const double* b1 = b.row(p + 1).data();
      const double* b2 = b.row(p + 2).data();
      const double* b3 = b.row(p + 3).data();
      for (std::size_t i = 0; i < i_end; ++i) {
        const double s0 = a0[i], s1 = a1[i], s2 = a2[i], s3 = a3[i];
        double* crow = c.row(i).data();
        const std::size_t js = UpperOnly ? std::max(jc, i) : jc;
        for (std::size_t j = js; j < je; ++j) {
          crow[j] += s0 * b0[j] + s1 * b1[j] + s2 * b2[j] + s3 * b3[j];
        }
      }
    }
    for (std::size_t p = m4; p < m; ++p) {
      const double* ap = a.row(p).data();
      const double* bp = b.row(p).data();
      for (std::size_t i = 0; i < i_end; ++i) {
        const double s = ap[i];
        double* crow = c.row(i).data();
        const std::size_t js = UpperOnly ? std::max(jc, i) : jc;
        for (std::size_t j = js; j < je; ++j) crow[j] += s * bp[j];
      }
    }
  }
}

// c ±= a·b, with the inner dimension consumed in groups of four.
template <bool Subtract>
void accumulate_nn(ConstMatrixView a, ConstMatrixView b, MatrixView c) {
  const std::size_t ni = a.rows();
  const std::size_t np = a.cols();
  const std::size_t nj = b.cols();
  const std::size_t np4 = np - np % 4;
  for (std::size_t jc = 0; jc < nj; jc += kColumnTile) {
    const std::size_t je = std::min(nj, jc + kColumnTile);
    for (std::size_t i = 0; i < ni; ++i) {
      const double* arow = a.row(i).data();
      double* crow = c.row(i).data();
      for (std::size_t p = 0; p < np4; p += 4) {
        const double s0 = arow[p], s1 = arow[p + 1], s2 = arow[p + 2], s3 = arow[p + 3];
        const double* b0 = b.row(p).data();
        const double* b1 = b.row(p + 1).data();
        const double* b2 = b.row(p + 2).data();
        const double* b3 = b.row(p + 3).data();
        for (std::size_t j = jc; j < je; ++j) {
          const double t = s0 * b0[j] + s1 * b1[j] + s2 * b2[j] + s3 * b3[j];
          if constexpr (Subtract) {
            crow[j] -= t;
          } else {
            crow[j] += t;
          }
        }
      }
      for (std::size_t p = np4; p < np; ++p) {
        const double s = arow[p];
        const double* bp = b.row(p).data();
        for (std::size_t j = jc; j < je; ++j) {
          if constexpr (Subtract) {
            crow[j] -= s * bp[j];
          } else {
            crow[j] += s * bp[j];
          }
        }
      }
    }
  }
}

void require_square(ConstMatrixView w, const char* what) {
  if (w.rows() != w.cols()) {
    throw DimensionMismatch(std::string(what) + ": expected a square matrix, got " + shape(w));
  }
}

// Right-looking unblocked factorization of the upper triangle of u in place.
// Pivot indices are reported relative to `offset`.
void factor_diagonal_block(MatrixView u, std::size_t offset) {
  const std::size_t n = u.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const double d = u(k, k);
    if (!(d > 0.0)) throw NotPositiveDefinite(offset + k);
    const double r = std::sqrt(d);
    u(k, k) = r;
    double* urow = u.row(k).data();
    for (std::size_t j = k + 1; j < n; ++j) urow[j] /= r;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = urow[i];
      double* irow = u.row(i).data();
      for (std::size_t j = i; j < n; ++j) irow[j] -= f * urow[j];
    }
  }
}

Matrix upper_copy(ConstMatrixView w) {
  const std::size_t n = w.rows();
  Matrix u(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) u(i, j) = w(i, j);
  }
  return u;
}

void check_triangular_solve(ConstMatrixView a, const UpperTriangular& u) {
  if (a.cols() != u.order()) {
    throw DimensionMismatch("solve_right_triangular: " + shape(a) + " against order " +
                            std::to_string(u.order()));
  }
  for (std::size_t j = 0; j < u.order(); ++j) {
    if (u(j, j) == 0.0) throw SingularTriangular(j);
  }
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void scale_to_unit(std::vector<double>& x) {
  const double norm = std::sqrt(dot(x, x));
  for (double& v : x) v /= norm;
}

std::vector<double> start_vector(std::size_t n) {
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  scale_to_unit(v);
  return v;
}

std::vector<double> symmetric_apply(const Matrix& w, const std::vector<double>& x) {
  std::vector<double> y(w.rows(), 0.0);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) s += w(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

// Solves UᵀU x = b.
std::vector<double> cholesky_solve(const UpperTriangular& u, std::vector<double> b) {
  const std::size_t n = u.order();
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t p = 0; p < i; ++p) s -= u(p, i) * b[p];
    b[i] = s / u(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t p = i + 1; p < n; ++p) s -= u(i, p) * b[p];
    b[i] = s / u(i, i);
  }
  return b;
}

bool converged(double current, double previous, double tol) {
  return std::abs(current - previous) <= tol * std::abs(current);
}

}  // namespace

Matrix gram(ConstMatrixView a) {
  const std::size_t n = a.cols();
  Matrix w(n, n);
  accumulate_tn<true>(a, a, w.view());
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) w(i, j) = w(j, i);
  }
  return w;
}

Matrix matmul(ConstMatrixView a, ConstMatrixView b, Transpose transpose_a) {
  if (transpose_a == Transpose::yes) {
    if (a.rows() != b.rows()) {
      throw DimensionMismatch("matmul: cannot form aᵀb with a " + shape(a) + " and b " + shape(b));
    }
    Matrix c(a.cols(), b.cols());
    accumulate_tn<false>(a, b, c.view());
    return c;
  }
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("matmul: cannot form ab with a " + shape(a) + " and b " + shape(b));
  }
  Matrix c(a.rows(), b.cols());
  accumulate_nn<false>(a, b, c.view());
  return c;
}

Matrix subtract_product(ConstMatrixView c, ConstMatrixView q, ConstMatrixView y) {
  Matrix out(c);
  subtract_product_inplace(out.view(), q, y);
  return out;
}

void subtract_product_inplace(MatrixView c, ConstMatrixView q, ConstMatrixView y) {
  if (q.cols() != y.rows() || c.rows() != q.rows() || c.cols() != y.cols()) {
    throw DimensionMismatch("subtract_product: c " + shape(c) + ", q " + shape(q) + ", y " + shape(y));
  }
  accumulate_nn<true>(q, y, c);
}

UpperTriangular cholesky_upper(ConstMatrixView w) {
  require_square(w, "cholesky_upper");
  if (w.rows() <= kUnblockedCholeskyLimit) return detail::cholesky_upper_unblocked(w);
  return detail::cholesky_upper_blocked(w, kCholeskyBlock);
}

namespace detail {

UpperTriangular cholesky_upper_unblocked(ConstMatrixView w) {
  require_square(w, "cholesky_upper");
  Matrix u = upper_copy(w);
  factor_diagonal_block(u.view(), 0);
  return UpperTriangular::from_matrix(std::move(u));
}

UpperTriangular cholesky_upper_blocked(ConstMatrixView w, std::size_t block) {
  require_square(w, "cholesky_upper");
  const std::size_t n = w.rows();
  Matrix u = upper_copy(w);
  for (std::size_t kb = 0; kb < n; kb += block) {
    const std::size_t ke = std::min(n, kb + block);
    const std::size_t nb = ke - kb;
    factor_diagonal_block(u.block(kb, kb, nb, nb), kb);
    if (ke == n) break;
    // U12 ← U11⁻ᵀ·U12, row by row.
    MatrixView u12 = u.block(kb, ke, nb, n - ke);
    for (std::size_t i = 0; i < nb; ++i) {
      double* irow = u12.row(i).data();
      for (std::size_t p = 0; p < i; ++p) {
        const double f = u(kb + p, kb + i);
        const double* prow = u12.row(p).data();
        for (std::size_t j = 0; j < u12.cols(); ++j) irow[j] -= f * prow[j];
      }
      const double d = u(kb + i, kb + i);
      for (std::size_t j = 0; j < u12.cols(); ++j) irow[j] /= d;
    }
    // Upper triangle of U22 ← U22 − U12ᵀ·U12.
    for (std::size_t p = 0; p < nb; ++p) {
      const double* prow = u12.row(p).data();
      for (std::size_t i = 0; i < u12.cols(); ++i) {
        const double f = prow[i];
        double* irow = u.row(ke + i).data() + ke;
        for (std::size_t j = i; j < u12.cols(); ++j) irow[j] -= f * prow[j];
      }
    }
  }
  return UpperTriangular::from_matrix(std::move(u));
}

}  // namespace detail

Matrix solve_right_triangular(ConstMatrixView a, const UpperTriangular& u) {
  check_triangular_solve(a, u);
  Matrix x(a);
  solve_right_triangular_inplace(x.view(), u);
  return x;
}

void solve_right_triangular_inplace(MatrixView a, const UpperTriangular& u) {
  check_triangular_solve(a, u);
  const std::size_t n = u.order();
  for (std::size_t r0 = 0; r0 < a.rows(); r0 += kSolveRowBlock) {
    const std::size_t r1 = std::min(a.rows(), r0 + kSolveRowBlock);
    for (std::size_t j = 0; j < n; ++j) {
      const double d = u(j, j);
      const double* urow = u.view().row(j).data();
      for (std::size_t r = r0; r < r1; ++r) {
        double* xrow = a.row(r).data();
        const double xj = xrow[j] / d;
        xrow[j] = xj;
        for (std::size_t q = j + 1; q < n; ++q) xrow[q] -= xj * urow[q];
      }
    }
  }
}

UpperTriangular triangular_product(const UpperTriangular& r2, const UpperTriangular& r1) {
  if (r2.order() != r1.order()) {
    throw DimensionMismatch("triangular_product: orders " + std::to_string(r2.order()) + " and " +
                            std::to_string(r1.order()));
  }
  const std::size_t n = r1.order();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = out.view().row(i).data();
    for (std::size_t p = i; p < n; ++p) {
      const double f = r2(i, p);
      const double* prow = r1.view().row(p).data();
      for (std::size_t j = p; j < n; ++j) orow[j] += f * prow[j];
    }
  }
  return UpperTriangular::from_matrix(std::move(out));
}

double frobenius_norm_squared(ConstMatrixView a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (double v : a.row(i)) s += v * v;
  }
  return s;
}

ThinQR householder_qr_reference(ConstMatrixView a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) {
    throw DimensionMismatch("householder_qr_reference: needs rows >= cols, got " + shape(a));
  }
  Matrix work(a);
  std::vector<double> tau(n, 0.0);
  std::vector<double> w(n);

  // Reflector k is stored below the diagonal of column k with an implicit unit head.
  for (std::size_t k = 0; k < n; ++k) {
    double tail = 0.0;
    for (std::size_t i = k + 1; i < m; ++i) tail += work(i, k) * work(i, k);
    const double alpha = work(k, k);
    if (tail == 0.0) continue;
    const double norm = std::sqrt(alpha * alpha + tail);
    const double beta = alpha >= 0.0 ? -norm : norm;
    tau[k] = (beta - alpha) / beta;
    const double scale = 1.0 / (alpha - beta);
    for (std::size_t i = k + 1; i < m; ++i) work(i, k) *= scale;
    work(k, k) = beta;

    // Trailing columns: w = vᵀ·A, then A ← A − τ·v·w.
    const std::size_t width = n - k - 1;
    if (width == 0) continue;
    std::fill(w.begin(), w.begin() + width, 0.0);
    {
      const double* krow = work.view().row(k).data() + k + 1;
      for (std::size_t j = 0; j < width; ++j) w[j] = krow[j];
    }
    for (std::size_t i = k + 1; i < m; ++i) {
      const double v = work(i, k);
      const double* irow = work.view().row(i).data() + k + 1;
      for (std::size_t j = 0; j < width; ++j) w[j] += v * irow[j];
    }
    for (std::size_t j = 0; j < width; ++j) w[j] *= tau[k];
    {
      double* krow = work.view().row(k).data() + k + 1;
      for (std::size_t j = 0; j < width; ++j) krow[j] -= w[j];
    }
    for (std::size_t i = k + 1; i < m; ++i) {
      const double v = work(i, k);
      double* irow = work.view().row(i).data() + k + 1;
      for (std::size_t j = 0; j < width; ++j) irow[j] -= v * w[j];
    }
  }

  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) r(i, j) = work(i, j);
  }

  // Q = H_0·H_1·…·H_{n-1}·[I; 0], accumulated backwards on the active block.
  Matrix q(m, n);
  for (std::size_t i = 0; i < n; ++i) q(i, i) = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    if (tau[k] == 0.0) continue;
    const std::size_t width = n - k;
    std::fill(w.begin(), w.begin() + width, 0.0);
    {
      const double* krow = q.view().row(k).data() + k;
      for (std::size_t j = 0; j < width; ++j) w[j] = krow[j];
    }
    for (std::size_t i = k + 1; i < m; ++i) {
      const double v = work(i, k);
      const double* irow = q.view().row(i).data() + k;
      for (std::size_t j = 0; j < width; ++j) w[j] += v * irow[j];
    }
    for (std::size_t j = 0; j < width; ++j) w[j] *= tau[k];
    {
      double* krow = q.view().row(k).data() + k;
      for (std::size_t j = 0; j < width; ++j) krow[j] -= w[j];
    }
    for (std::size_t i = k + 1; i < m; ++i) {
      const double v = work(i, k);
      double* irow = q.view().row(i).data() + k;
      for (std::size_t j = 0; j < width; ++j) irow[j] -= v * w[j];
    }
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (r(k, k) >= 0.0) continue;
    for (std::size_t j = k; j < n; ++j) r(k, j) = -r(k, j);
    for (std::size_t i = 0; i < m; ++i) q(i, k) = -q(i, k);
  }
  return {std::move(q), UpperTriangular::from_matrix(std::move(r))};
}

SingularValueEstimate extreme_singular_values(ConstMatrixView a, std::size_t max_iters, double tol) {
  if (a.rows() < a.cols()) {
    throw DimensionMismatch("extreme_singular_values: needs rows >= cols, got " + shape(a));
  }
  const std::size_t n = a.cols();
  SingularValueEstimate out;
  if (n == 0) return out;
  const Matrix w = gram(a);

  // Power iteration on aᵀa.
  std::vector<double> v = start_vector(n);
  double lambda = 0.0;
  bool done = false;
  for (std::size_t it = 0; it < max_iters && !done; ++it) {
    std::vector<double> y = symmetric_apply(w, v);
    const double next = dot(v, y);
    const double norm = std::sqrt(dot(y, y));
    if (norm == 0.0) {
      lambda = 0.0;
      done = true;
      break;
    }
    done = it > 0 && converged(next, lambda, tol);
    lambda = next;
    for (std::size_t i = 0; i < n; ++i) v[i] = y[i] / norm;
  }
  if (!done) throw NoConvergence(max_iters);
  out.sigma_max = std::sqrt(lambda);

  // Inverse iteration on (aᵀa)⁻¹ = (rᵀr)⁻¹ with the Householder r, which
  // stays usable long after the Gram matrix stops being numerically definite.
  const UpperTriangular u = householder_qr_reference(a).r;
  for (std::size_t i = 0; i < n; ++i) {
    if (u(i, i) == 0.0) throw SingularTriangular(i);
  }
  v = start_vector(n);
  double mu = 0.0;
  done = false;
  for (std::size_t it = 0; it < max_iters && !done; ++it) {
    std::vector<double> y = cholesky_solve(u, v);
    const double next = dot(v, y);
    done = it > 0 && converged(next, mu, tol);
    mu = next;
    scale_to_unit(y);
    v = std::move(y);
  }
  if (!done) throw NoConvergence(max_iters);
  out.sigma_min = std::sqrt(1.0 / mu);
  return out;
}

}  // namespace cholqr
