#include <doctest.h>

#include <cmath>
#include <random>

#include "cholqr/errors.hpp"
#include "cholqr/testbed.hpp"
#include "helpers.hpp"

using namespace cholqr;
using cholqr::testing::random_matrix;

namespace {
constexpr double u = unit_roundoff;
}

TEST_CASE("planted spectrum") {
  const auto s = geometric_spectrum(30, 1e6);
  CHECK(s.front() == 1.0);
  CHECK(s.back() == 1e-6);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] < s[i - 1]);
  CHECK(s[15] / s[14] == doctest::Approx(std::pow(1e6, -1.0 / 29)).epsilon(1e-13));
}

TEST_CASE("generate examples") {
  const GeneratedMatrix one = generate(120, 15, 1.0, 4);
  CHECK(orthogonality_error(one.matrix) <= 100 * u);

  const GeneratedMatrix g = generate(200, 20, 1e4, 4);
  const auto est = extreme_singular_values(g.matrix);
  CHECK(est.sigma_max == doctest::Approx(1.0).epsilon(0.01));
  CHECK(est.sigma_min == doctest::Approx(1e-4).epsilon(0.01));

  CHECK(bitwise_equal(generate(50, 6, 1e3, 99).matrix, generate(50, 6, 1e3, 99).matrix));
  CHECK_FALSE(bitwise_equal(generate(50, 6, 1e3, 99).matrix, generate(50, 6, 1e3, 100).matrix));

  CHECK_THROWS_AS(generate(10, 1, 10.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate(4, 5, 10.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate(10, 5, 0.5, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate(10, 5, INFINITY, 0), std::invalid_argument);
}

TEST_CASE("a cached generator matches one-shot generation") {
  const SpectrumGenerator gen(80, 10, 5);
  for (double kappa : {1.0, 1e3, 1e9}) CHECK(bitwise_equal(gen.make(kappa).matrix, generate(80, 10, kappa, 5).matrix));
}

TEST_CASE("stream seeds are distinct per purpose") {
  CHECK(stream_seed(1, RandomStream::left_factor) != stream_seed(1, RandomStream::right_factor));
  CHECK(stream_seed(1, RandomStream::left_factor) != stream_seed(2, RandomStream::left_factor));
}

TEST_CASE("gaussian samples have unit variance") {
  const Matrix g = gaussian_matrix(200, 100, 17);
  double sum = 0.0, sq = 0.0;
  for (double v : g.values()) {
    sum += v;
    sq += v * v;
  }
  const double count = static_cast<double>(g.size());
  CHECK(std::abs(sum / count) < 0.02);
  CHECK(sq / count == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("orthogonality_error examples") {
  CHECK(orthogonality_error(Matrix::identity(5)) == 0.0);
  CHECK(orthogonality_error(Matrix{{1, 1}, {0, 0}}) == doctest::Approx(1.0).epsilon(1e-15));
  std::mt19937_64 rng(3);
  CHECK(orthogonality_error(householder_qr_reference(random_matrix(100, 10, rng)).q) <= 50 * u);
}

TEST_CASE("residual_error examples") {
  const Matrix a{{1, 2}, {0, 3}, {0, 0}};
  const Matrix q{{1, 0}, {0, 1}, {0, 0}};
  CHECK(residual_error(a, q, UpperTriangular::from_matrix(Matrix{{1, 2}, {0, 3}})) == 0.0);
  CHECK(residual_error(Matrix{{3}, {4}}, Matrix{{0.6}, {0.8}}, UpperTriangular::from_matrix(Matrix{{5}})) <= 2 * u);
  CHECK(residual_error(a, q, UpperTriangular(2)) == 1.0);
  CHECK_THROWS_AS(residual_error(Matrix(3, 2), q, UpperTriangular(2)), ZeroMatrix);
  CHECK_THROWS_AS(residual_error(a, q, UpperTriangular(3)), DimensionMismatch);
}

TEST_CASE("property: metrics ignore matching sign flips") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    const std::size_t m = n + std::uniform_int_distribution<std::size_t>(0, 40)(rng);
    const Matrix a = random_matrix(m, n, rng);
    const ThinQR f = householder_qr_reference(a);
    Matrix q = f.q;
    Matrix r = f.r.matrix();
    for (std::size_t j = 0; j < n; ++j) {
      if (rng() & 1) {
        for (std::size_t i = 0; i < m; ++i) q(i, j) = -q(i, j);
        for (std::size_t c = 0; c < n; ++c) r(j, c) = -r(j, c);
      }
    }
    const auto flipped = UpperTriangular::from_matrix(std::move(r));
    CHECK(std::abs(orthogonality_error(q) - orthogonality_error(f.q)) <= 4 * u);
    CHECK(std::abs(residual_error(a, q, flipped) - residual_error(a, f.q, f.r)) <= 4 * u);
  }
}

TEST_CASE("property: generated matrices survive scatter and gather") {
  const GeneratedMatrix g = generate(37, 5, 1e2, 6);
  for (int p = 1; p <= 37; p += 4) CHECK(bitwise_equal(gather_block_rows(scatter_block_rows(g.matrix, p)), g.matrix));
}

TEST_CASE("panel_bound_check examples") {
  const GeneratedMatrix g = generate(300, 30, 1e6, 11);
  const PanelBoundReport rep = panel_bound_check(g, 15);
  CHECK(rep.passed());
  // σ₁₆/σ₁₅ of a geometric spectrum is one step down: κ^(−1/29).
  CHECK(rep.lower_bound == doctest::Approx(std::pow(1e6, -1.0 / 29)).epsilon(1e-12));
  CHECK(rep.matrix_condition == doctest::Approx(1e6).epsilon(1e-12));

  const auto full = extreme_singular_values(g.matrix);
  CHECK(full.sigma_max / full.sigma_min == doctest::Approx(1e6).epsilon(0.05));

  const PanelBoundReport flat = panel_bound_check(generate(300, 30, 1.0, 11), 10);
  CHECK(flat.passed());
  CHECK(flat.matrix_condition == 1.0);
  CHECK(flat.lower_bound == 1.0);
  CHECK(flat.panel_condition == doctest::Approx(1.0).epsilon(1e-8));

  CHECK_THROWS_AS(panel_bound_check(g, 0), std::invalid_argument);
  CHECK_THROWS_AS(panel_bound_check(g, 30), std::invalid_argument);
}

TEST_CASE("property: panel bounds hold across the standard suite") {
  for (double kappa : {1.0, 1e4, 1e8}) {
    const GeneratedMatrix g = generate(300, 30, kappa, 12);
    for (std::size_t b : {3, 7, 15}) {
      CAPTURE(kappa);
      CAPTURE(b);
      CHECK(panel_bound_check(g, b).passed());
    }
  }
}

TEST_CASE("assess reports NaN metrics after a breakdown") {
  FactorOptions o;
  o.algorithm = Algorithm::cqr;
  const GeneratedMatrix g = generate(200, 20, 1e12, 1);
  const StabilityReport rep = assess(g.matrix, factorize(g.matrix, o));
  CHECK(rep.breakdown.has_value());
  CHECK(std::isnan(rep.orthogonality));
  CHECK(std::isnan(rep.residual));
}
