#include "cholqr/comm.hpp"

#include <boost/context/fiber.hpp>
#include <boost/context/fixedsize_stack.hpp>

#include <condition_variable>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "cholqr/errors.hpp"

namespace cholqr {

namespace ctx = boost::context;

namespace detail {

// State shared by the endpoints of one run. The last rank to arrive at a
// collective computes the result; every other rank waits until the
// generation counter moves on.
class CollectiveHub {
 public:
  explicit CollectiveHub(int size) : size_(size), slots_(static_cast<std::size_t>(size)) {}
  virtual ~CollectiveHub() = default;

  virtual Matrix allreduce(int rank, Matrix contribution) = 0;
  virtual void abort() = 0;
  // Called once per rank when its body returns or throws.
  virtual void depart() = 0;

  bool stranded() const noexcept { return stranded_; }

 protected:
  void complete() {
    failure_ = nullptr;
    const Matrix& first = slots_.front();
    for (int r = 1; r < size_; ++r) {
      const Matrix& s = slots_[static_cast<std::size_t>(r)];
      if (s.rows() != first.rows() || s.cols() != first.cols()) {
        failure_ = std::make_exception_ptr(ShapeMismatch(r));
        break;
      }
    }
    if (!failure_) result_ = tree_sum(slots_);
    for (auto& s : slots_) s = Matrix();
    arrived_ = 0;
    ++generation_;
  }

  // Ranks that left can never arrive; if everyone else is already waiting the
  // collective cannot complete.
  void check_stranded() {
    if (arrived_ > 0 && arrived_ + departed_ == size_) {
      stranded_ = true;
      aborted_ = true;
    }
  }

  Matrix collect() const {
    if (failure_) std::rethrow_exception(failure_);
    return result_;
  }

  int size_;
  std::vector<Matrix> slots_;
  int arrived_ = 0;
  int departed_ = 0;
  std::uint64_t generation_ = 0;
  Matrix result_;
  std::exception_ptr failure_;
  bool aborted_ = false;
  bool stranded_ = false;
};

namespace {

class ThreadedHub final : public CollectiveHub {
 public:
  using CollectiveHub::CollectiveHub;

  Matrix allreduce(int rank, Matrix contribution) override {
    std::unique_lock lock(mutex_);
    if (aborted_) throw CollectiveAborted();
    slots_[static_cast<std::size_t>(rank)] = std::move(contribution);
    const std::uint64_t generation = generation_;
    if (++arrived_ == size_) {
      complete();
      cv_.notify_all();
    } else {
      check_stranded();
      if (aborted_) cv_.notify_all();
      cv_.wait(lock, [&] { return generation_ != generation || aborted_; });
    }
    if (generation_ == generation) throw CollectiveAborted();
    return collect();
  }

  void abort() override {
    std::lock_guard lock(mutex_);
    aborted_ = true;
    cv_.notify_all();
  }

  void depart() override {
    std::lock_guard lock(mutex_);
    ++departed_;
    check_stranded();
    if (aborted_) cv_.notify_all();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
};

class LockstepHub final : public CollectiveHub {
 public:
  explicit LockstepHub(int size) : CollectiveHub(size), schedulers_(static_cast<std::size_t>(size)) {}

  Matrix allreduce(int rank, Matrix contribution) override {
    if (aborted_) throw CollectiveAborted();
    slots_[static_cast<std::size_t>(rank)] = std::move(contribution);
    const std::uint64_t generation = generation_;
    if (++arrived_ == size_) {
      complete();
    } else {
      check_stranded();
      while (generation_ == generation && !aborted_) yield(rank);
    }
    if (generation_ == generation) throw CollectiveAborted();
    return collect();
  }

  void abort() override { aborted_ = true; }

  void depart() override {
    ++departed_;
    check_stranded();
  }

  // Continuation back into the scheduler loop, refreshed on every switch.
  ctx::fiber& scheduler(int rank) { return schedulers_[static_cast<std::size_t>(rank)]; }

 private:
  void yield(int rank) { scheduler(rank) = std::move(scheduler(rank)).resume(); }

  std::vector<ctx::fiber> schedulers_;
};

constexpr std::size_t kFiberStackBytes = std::size_t{1} << 20;

void run_lockstep(int ranks, const std::function<void(Communicator&)>& body,
                  std::vector<Communicator>& endpoints, std::vector<std::exception_ptr>& errors,
                  LockstepHub& hub) {
  std::vector<ctx::fiber> fibers;
  std::vector<bool> finished(static_cast<std::size_t>(ranks), false);
  fibers.reserve(static_cast<std::size_t>(ranks));
  for (int r = 0; r < ranks; ++r) {
    fibers.emplace_back(std::allocator_arg, ctx::fixedsize_stack(kFiberStackBytes),
                        [&, r](ctx::fiber&& sink) {
                          hub.scheduler(r) = std::move(sink);
                          try {
                            body(endpoints[static_cast<std::size_t>(r)]);
                          } catch (const ctx::detail::forced_unwind&) {
                            throw;
                          } catch (...) {
                            errors[static_cast<std::size_t>(r)] = std::current_exception();
                            hub.abort();
                          }
                          hub.depart();
                          finished[static_cast<std::size_t>(r)] = true;
                          return std::move(hub.scheduler(r));
                        });
  }
  bool pending = true;
  while (pending) {
    pending = false;
    for (int r = 0; r < ranks; ++r) {
      const auto idx = static_cast<std::size_t>(r);
      if (finished[idx]) continue;
      fibers[idx] = std::move(fibers[idx]).resume();
      pending = pending || !finished[idx];
    }
  }
}

void run_threaded(int ranks, const std::function<void(Communicator&)>& body,
                  std::vector<Communicator>& endpoints, std::vector<std::exception_ptr>& errors,
                  ThreadedHub& hub) {
  std::vector<std::jthread> workers;
  workers.reserve(static_cast<std::size_t>(ranks));
  for (int r = 0; r < ranks; ++r) {
    workers.emplace_back([&, r] {
      try {
        body(endpoints[static_cast<std::size_t>(r)]);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
        hub.abort();
      }
      hub.depart();
    });
  }
}

}  // namespace
}  // namespace detail

const char* to_string(Backend backend) noexcept {
  return backend == Backend::serial ? "serial" : "parallel";
}

Backend parse_backend(std::string_view name) {
  if (name == "serial") return Backend::serial;
  if (name == "parallel") return Backend::parallel;
  throw std::invalid_argument("unknown backend '" + std::string(name) + "' (expected serial or parallel)");
}

Matrix Communicator::allreduce_sum(ConstMatrixView local) {
  ++calls_;
  return hub_->allreduce(rank_, Matrix(local));
}

double Communicator::allreduce_sum(double local) {
  Matrix m(1, 1);
  m(0, 0) = local;
  return allreduce_sum(m.view())(0, 0);
}

void run_ranks(int ranks, Backend backend, const std::function<void(Communicator&)>& body) {
  if (ranks < 1) throw std::invalid_argument("run_ranks: need at least one rank");
  std::unique_ptr<detail::CollectiveHub> hub;
  if (backend == Backend::serial) {
    hub = std::make_unique<detail::LockstepHub>(ranks);
  } else {
    hub = std::make_unique<detail::ThreadedHub>(ranks);
  }
  std::vector<Communicator> endpoints;
  endpoints.reserve(static_cast<std::size_t>(ranks));
  for (int r = 0; r < ranks; ++r) endpoints.push_back(Communicator(hub.get(), r, ranks));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(ranks));

  if (backend == Backend::serial) {
    detail::run_lockstep(ranks, body, endpoints, errors, static_cast<detail::LockstepHub&>(*hub));
  } else {
    detail::run_threaded(ranks, body, endpoints, errors, static_cast<detail::ThreadedHub&>(*hub));
  }

  std::exception_ptr aborted;
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const CollectiveAborted&) {
      if (!aborted) aborted = e;
    } catch (...) {
      throw;
    }
  }
  if (hub->stranded()) {
    throw std::logic_error("run_ranks: some ranks returned while others waited in a collective");
  }
  if (aborted) std::rethrow_exception(aborted);
}

Matrix tree_sum(std::span<const Matrix> parts) {
  if (parts.empty()) throw std::invalid_argument("tree_sum: no operands");
  std::vector<Matrix> level(parts.begin(), parts.end());
  while (level.size() > 1) {
    std::vector<Matrix> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) {
      if (i + 1 == level.size()) {
        next.push_back(std::move(level[i]));
        break;
      }
      Matrix& left = level[i];
      const Matrix& right = level[i + 1];
      if (left.rows() != right.rows() || left.cols() != right.cols()) {
        throw DimensionMismatch("tree_sum: operand shapes differ");
      }
      auto lv = left.values();
      auto rv = right.values();
      for (std::size_t k = 0; k < lv.size(); ++k) lv[k] += rv[k];
      next.push_back(std::move(left));
    }
    level = std::move(next);
  }
  return std::move(level.front());
}

RowRange block_row_range(std::size_t rows, int parts, int part) {
  if (parts < 1 || part < 0 || part >= parts) {
    throw std::invalid_argument("block_row_range: part " + std::to_string(part) + " of " +
                                std::to_string(parts));
  }
  const auto p = static_cast<std::size_t>(parts);
  const auto i = static_cast<std::size_t>(part);
  const std::size_t base = rows / p;
  const std::size_t extra = rows % p;
  const std::size_t begin = i * base + std::min(i, extra);
  return {begin, begin + base + (i < extra ? 1 : 0)};
}

std::vector<Matrix> scatter_block_rows(ConstMatrixView global, int parts) {
  if (parts < 1 || static_cast<std::size_t>(parts) > global.rows()) {
    throw std::invalid_argument("scatter_block_rows: cannot split " + std::to_string(global.rows()) +
                                " rows into " + std::to_string(parts) + " blocks");
  }
  std::vector<Matrix> blocks;
  blocks.reserve(static_cast<std::size_t>(parts));
  for (int p = 0; p < parts; ++p) {
    const RowRange range = block_row_range(global.rows(), parts, p);
    blocks.emplace_back(global.block(range.begin, 0, range.size(), global.cols()));
  }
  return blocks;
}

Matrix gather_block_rows(std::span<const Matrix> blocks) {
  if (blocks.empty()) return Matrix();
  const std::size_t cols = blocks.front().cols();
  std::size_t rows = 0;
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw DimensionMismatch("gather_block_rows: column counts differ");
    rows += b.rows();
  }
  Matrix out(rows, cols);
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    out.block(offset, 0, b.rows(), cols).assign(b);
    offset += b.rows();
  }
  return out;
}

}  // namespace cholqr
