#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cholqr {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A Cholesky pivot was not strictly positive.
class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(std::size_t pivot_index);
  std::size_t pivot_index() const noexcept { return pivot_index_; }

 private:
  std::size_t pivot_index_;
};

class SingularTriangular : public std::runtime_error {
 public:
  explicit SingularTriangular(std::size_t index);
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class NoConvergence : public std::runtime_error {
 public:
  explicit NoConvergence(std::size_t iterations);
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

class ZeroMatrix : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A rank contributed a payload whose shape differs from rank 0's.
class ShapeMismatch : public std::runtime_error {
 public:
  explicit ShapeMismatch(int rank);
  int rank() const noexcept { return rank_; }

 private:
  int rank_;
};

/// Raised inside rank bodies that were blocked in a collective when a peer failed.
class CollectiveAborted : public std::runtime_error {
 public:
  CollectiveAborted() : std::runtime_error("collective aborted: a peer rank failed") {}
};

enum class BreakdownStage {
  cqr,          // single CholeskyQR pass
  first_pass,   // first pass of a two-pass algorithm
  second_pass,  // second pass of a two-pass algorithm
  shifted,      // shifted Gram factorization
  panel,        // panel Gram inside a Gram-Schmidt sweep
  panel1_cqr2,  // leading panel of the modified algorithm
  first_cqr,    // first panel pass of the modified algorithm
  second_cqr,   // second panel pass of the modified algorithm
};

const char* to_string(BreakdownStage stage) noexcept;

struct BreakdownInfo {
  BreakdownStage stage = BreakdownStage::cqr;
  std::size_t pivot_index = 0;
  std::optional<std::size_t> panel_index;
};

/// Cholesky of a (panel) Gram matrix failed inside a factorization.
class CholeskyBreakdown : public std::runtime_error {
 public:
  explicit CholeskyBreakdown(BreakdownInfo info);
  const BreakdownInfo& info() const noexcept { return info_; }

 private:
  BreakdownInfo info_;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cholqr
