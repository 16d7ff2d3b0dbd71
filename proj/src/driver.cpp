#include "cholqr/driver.hpp"

#include <chrono>
#include <stdexcept>
#include <string>
#include <vector>

namespace cholqr {
namespace {

void validate(ConstMatrixView a, const FactorOptions& options) {
  if (options.ranks < 1) throw std::invalid_argument("ranks must be at least 1");
  if (a.rows() < a.cols()) {
    throw std::invalid_argument("factorize: needs m >= n, got " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()));
  }
  if (static_cast<std::size_t>(options.ranks) > a.rows()) {
    throw std::invalid_argument("factorize: more ranks than rows");
  }
  if (options.panels < 1) throw std::invalid_argument("panels must be at least 1");
  if (!uses_panels(options.algorithm) && options.panels != 1) {
    throw std::invalid_argument(std::string("panels are not meaningful for ") + to_string(options.algorithm));
  }
  if (uses_panels(options.algorithm) && options.panels > a.cols()) {
    throw std::invalid_argument("more panels than columns");
  }
}

}  // namespace

QRFactorization run_algorithm(const DistributedMatrix& a, const FactorOptions& options) {
  const std::size_t n = a.global_cols();
  switch (options.algorithm) {
    case Algorithm::cqr: return cqr(a);
    case Algorithm::cqr2: return cqr2(a);
    case Algorithm::scqr: return scqr(a, options.shift);
    case Algorithm::scqr3: return scqr3(a, options.shift);
    case Algorithm::cqrgs: return cqrgs(a, PanelSpec::from_count(n, options.panels));
    case Algorithm::cqr2gs: return cqr2gs(a, PanelSpec::from_count(n, options.panels));
    case Algorithm::mcqr2gs: return mcqr2gs(a, PanelSpec::from_count(n, options.panels));
  }
  throw std::invalid_argument("unknown algorithm");
}

FactorResult factorize(ConstMatrixView a, const FactorOptions& options) {
  validate(a, options);
  FactorResult result;
  if (uses_panels(options.algorithm)) {
    const PanelSpec spec = PanelSpec::from_count(a.cols(), options.panels);
    result.panels = spec.count();
    result.panel_width = spec.width();
  } else {
    result.panel_width = a.cols();
  }

  const auto ranks = static_cast<std::size_t>(options.ranks);
  std::vector<Matrix> q_blocks(ranks);
  std::vector<std::optional<UpperTriangular>> r_copies(ranks);
  std::vector<std::size_t> calls(ranks, 0);

  const auto start = std::chrono::steady_clock::now();
  try {
    run_ranks(options.ranks, options.backend, [&](Communicator& comm) {
      const auto rank = static_cast<std::size_t>(comm.rank());
      struct RecordCalls {
        Communicator& comm;
        std::size_t& slot;
        ~RecordCalls() { slot = comm.allreduce_calls(); }
      } record{comm, calls[rank]};
      const DistributedMatrix local = DistributedMatrix::from_global(comm, a);
      QRFactorization f = run_algorithm(local, options);
      q_blocks[rank] = std::move(f.q).release_local();
      r_copies[rank] = std::move(f.r);
    });
  } catch (const CholeskyBreakdown& e) {
    result.breakdown = e.info();
  }
  result.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  for (std::size_t r = 1; r < ranks; ++r) {
    if (calls[r] != calls[0]) throw std::logic_error("ranks disagree on the number of allreduce calls");
  }
  result.allreduce_calls = calls[0];
  if (result.breakdown) return result;

  for (std::size_t r = 1; r < ranks; ++r) {
    if (!bitwise_equal(r_copies[r]->view(), r_copies[0]->view())) {
      throw std::logic_error("R differs between rank 0 and rank " + std::to_string(r));
    }
  }
  result.q = gather_block_rows(q_blocks);
  result.r = std::move(r_copies[0]);
  return result;
}

}  // namespace cholqr
