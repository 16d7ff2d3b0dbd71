#include "cholqr/testbed.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace cholqr {

std::vector<double> geometric_spectrum(std::size_t n, double kappa) {
  std::vector<double> sigma(n, 1.0);
  if (n < 2) return sigma;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    sigma[i] = std::pow(kappa, -static_cast<double>(i) / static_cast<double>(n - 1));
  }
  sigma[n - 1] = 1.0 / kappa;
  return sigma;
}

std::uint64_t stream_seed(std::uint64_t seed, RandomStream purpose) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(purpose);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // 53 random bits; the first draw is shifted into (0, 1] so the log is finite.
  auto open_unit = [&] { return static_cast<double>((rng() >> 11) + 1) * 0x1p-53; };
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  Matrix g(rows, cols);
  auto values = g.values();
  for (std::size_t k = 0; k < values.size(); k += 2) {
    const double radius = std::sqrt(-2.0 * std::log(open_unit()));
    const double angle = 2.0 * std::numbers::pi * unit();
    values[k] = radius * std::cos(angle);
    if (k + 1 < values.size()) values[k + 1] = radius * std::sin(angle);
  }
  return g;
}

SpectrumGenerator::SpectrumGenerator(std::size_t m, std::size_t n, std::uint64_t seed) : m_(m), n_(n), seed_(seed) {
  if (n < 2 || m < n) {
    throw std::invalid_argument("generator needs m >= n >= 2, got " + std::to_string(m) + "x" + std::to_string(n));
  }
  left_ = householder_qr_reference(gaussian_matrix(m, n, stream_seed(seed, RandomStream::left_factor))).q;
  right_ = householder_qr_reference(gaussian_matrix(n, n, stream_seed(seed, RandomStream::right_factor))).q;
}

GeneratedMatrix SpectrumGenerator::make(double kappa) const {
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("condition number must be a finite value >= 1");
  }
  GeneratedMatrix out;
  out.seed = seed_;
  out.target_condition = kappa;
  out.singular_values = geometric_spectrum(n_, kappa);
  // Σ·Vᵀ first (n×n), then U·(ΣVᵀ).
  Matrix scaled(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) scaled(i, j) = out.singular_values[i] * right_(j, i);
  }
  out.matrix = matmul(left_, scaled);
  return out;
}

GeneratedMatrix generate(std::size_t m, std::size_t n, double kappa, std::uint64_t seed) {
  return SpectrumGenerator(m, n, seed).make(kappa);
}

double orthogonality_error(ConstMatrixView q) {
  const std::size_t n = q.cols();
  if (n == 0) return 0.0;
  Matrix w = gram(q);
  for (std::size_t i = 0; i < n; ++i) w(i, i) -= 1.0;
  return std::sqrt(frobenius_norm_squared(w)) / std::sqrt(static_cast<double>(n));
}

double residual_error(ConstMatrixView a, ConstMatrixView q, const UpperTriangular& r) {
  if (q.rows() != a.rows() || q.cols() != r.order() || a.cols() != r.order()) {
    throw DimensionMismatch("residual_error: shapes do not conform");
  }
  const double norm_a = std::sqrt(frobenius_norm_squared(a));
  if (norm_a == 0.0) throw ZeroMatrix("residual_error: reference matrix is zero");
  Matrix diff = matmul(q, r.view());
  auto d = diff.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto arow = a.row(i);
    for (std::size_t j = 0; j < arow.size(); ++j) d[i * a.cols() + j] -= arow[j];
  }
  return std::sqrt(frobenius_norm_squared(diff)) / norm_a;
}

PanelBoundReport panel_bound_check(const GeneratedMatrix& gen, std::size_t b, double slack) {
  const std::size_t n = gen.matrix.cols();
  if (b < 1 || b >= n) {
    throw std::invalid_argument("panel width " + std::to_string(b) + " outside [1, " + std::to_string(n) + ")");
  }
  const auto& sigma = gen.singular_values;
  const SingularValueEstimate est = extreme_singular_values(gen.matrix.columns(0, b));

  PanelBoundReport report;
  report.width = b;
  report.slack = slack;
  report.matrix_condition = sigma.front() / sigma.back();
  report.panel_condition = est.sigma_max / est.sigma_min;
  report.lower_bound = sigma[n - b] / sigma[b - 1];
  report.upper_holds = report.matrix_condition * (1.0 + slack) >= report.panel_condition;
  report.lower_holds = report.panel_condition * (1.0 + slack) >= report.lower_bound;
  return report;
}

StabilityReport assess(ConstMatrixView a, const FactorResult& result) {
  StabilityReport report;
  report.breakdown = result.breakdown;
  report.allreduce_calls = result.allreduce_calls;
  report.elapsed_seconds = result.elapsed_seconds;
  if (!result.ok()) {
    report.orthogonality = std::numeric_limits<double>::quiet_NaN();
    report.residual = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  report.orthogonality = orthogonality_error(*result.q);
  report.residual = residual_error(a, *result.q, *result.r);
  return report;
}

}  // namespace cholqr
