#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "cholqr/matrix.hpp"

namespace cholqr {

/// How the rank bodies of one run are executed.
///
///  - serial: all ranks are fibers on the calling thread; a rank runs until it
///    enters a collective, then the next rank resumes. P is independent of the
///    number of cores.
///  - parallel: one thread per rank; collectives are barriers.
enum class Backend { serial, parallel };

const char* to_string(Backend backend) noexcept;
/// Throws std::invalid_argument for unknown names.
Backend parse_backend(std::string_view name);

namespace detail {
class CollectiveHub;
}

/// One rank's endpoint into a P-rank group. Movable, never shared between rank bodies.
class Communicator {
 public:
  Communicator(const Communicator&) = delete;
  Communicator& operator=(const Communicator&) = delete;
  Communicator(Communicator&&) noexcept = default;
  Communicator& operator=(Communicator&&) noexcept = default;

  int rank() const noexcept { return rank_; }
  int size() const noexcept { return size_; }

  /// Sum of `local` over all ranks, delivered to every rank. The sum is
  /// evaluated as a fixed binary tree over ascending ranks (see tree_sum), so
  /// the result does not depend on scheduling or backend.
  /// Throws ShapeMismatch on every rank if any payload shape differs from rank 0's.
  Matrix allreduce_sum(ConstMatrixView local);
  double allreduce_sum(double local);

  /// Number of allreduce calls this endpoint has entered.
  std::size_t allreduce_calls() const noexcept { return calls_; }

 private:
  friend void run_ranks(int, Backend, const std::function<void(Communicator&)>&);
  Communicator(detail::CollectiveHub* hub, int rank, int size) noexcept
      : hub_(hub), rank_(rank), size_(size) {}

  detail::CollectiveHub* hub_ = nullptr;
  int rank_ = 0;
  int size_ = 1;
  std::size_t calls_ = 0;
};

/// Runs `body` once per rank and returns when all ranks have finished.
///
/// If a rank throws, ranks blocked in collectives are released with
/// CollectiveAborted and the lowest-rank original exception is rethrown here.
/// A run in which some ranks return while others still wait in a collective
/// throws std::logic_error.
void run_ranks(int ranks, Backend backend, const std::function<void(Communicator&)>& body);

/// Reduction used by allreduce: pairs (0,1), (2,3), … are added first, an odd
/// tail is carried up unchanged, and the pass repeats until one matrix remains.
/// Requires identical shapes.
Matrix tree_sum(std::span<const Matrix> parts);

struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
};

/// Rows owned by `part` when `rows` rows are split into `parts` contiguous
/// blocks: the first rows % parts blocks get one extra row.
RowRange block_row_range(std::size_t rows, int parts, int part);

/// Throws std::invalid_argument unless 1 ≤ parts ≤ global.rows().
std::vector<Matrix> scatter_block_rows(ConstMatrixView global, int parts);

/// Vertical concatenation in order. Throws DimensionMismatch on column mismatch.
Matrix gather_block_rows(std::span<const Matrix> blocks);

}  // namespace cholqr
