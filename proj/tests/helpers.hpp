#pragma once

// Shared oracles and generators for the unit tests.

#include <cmath>
#include <cstdint>
#include <random>

#include "cholqr/matrix.hpp"

namespace cholqr::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix a(rows, cols);
  for (double& v : a.values()) v = dist(rng);
  return a;
}

// Textbook triple loop, accumulated in long double so it is independent of the kernels.
inline Matrix naive_product(ConstMatrixView a, ConstMatrixView b, bool transpose_a = false) {
  const std::size_t rows = transpose_a ? a.cols() : a.rows();
  const std::size_t inner = transpose_a ? a.rows() : a.cols();
  Matrix c(rows, b.cols());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      long double s = 0.0L;
      for (std::size_t p = 0; p < inner; ++p) {
        const double x = transpose_a ? a(p, i) : a(i, p);
        s += static_cast<long double>(x) * b(p, j);
      }
      c(i, j) = static_cast<double>(s);
    }
  }
  return c;
}

inline double max_abs_diff(ConstMatrixView a, ConstMatrixView b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  }
  return d;
}

inline double max_abs(ConstMatrixView a) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j)));
  }
  return d;
}

}  // namespace cholqr::testing
