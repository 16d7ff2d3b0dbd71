#include "cholqr/cost_model.hpp"

#include <cmath>
#include <stdexcept>

namespace cholqr {
namespace {

struct Dims {
  double m, n, p, lg;
};

Dims dims(std::size_t m, std::size_t n, std::size_t ranks) {
  if (n < 1 || m < n || ranks < 1) throw std::invalid_argument("cost model needs m >= n >= 1 and P >= 1");
  const auto p = static_cast<double>(ranks);
  return {static_cast<double>(m), static_cast<double>(n), p, std::log2(p)};
}

CostEstimate base(const char* model, std::size_t m, std::size_t n, std::size_t ranks) {
  CostEstimate c;
  c.model = model;
  c.m = m;
  c.n = n;
  c.ranks = ranks;
  return c;
}

}  // namespace

CostEstimate cqr_cost(std::size_t m, std::size_t n, std::size_t ranks) {
  const auto [M, N, P, lg] = dims(m, n, ranks);
  CostEstimate c = base("cqr", m, n, ranks);
  c.flops = N * N * N / 3.0 + 2.0 * M * N * N / P + N * N * lg;
  c.words = N * N * lg;
  c.calls = 1.0;
  c.messages = c.calls * lg;
  return c;
}

CostEstimate cqr2_cost(std::size_t m, std::size_t n, std::size_t ranks) {
  const auto [M, N, P, lg] = dims(m, n, ranks);
  CostEstimate c = base("cqr2", m, n, ranks);
  c.flops = N * N * N + 4.0 * M * N * N / P + 2.0 * N * N * lg;
  c.words = 2.0 * N * N * lg;
  c.calls = 2.0;
  c.messages = c.calls * lg;
  return c;
}

CostEstimate scqr3_cost(std::size_t m, std::size_t n, std::size_t ranks) {
  const auto [M, N, P, lg] = dims(m, n, ranks);
  CostEstimate c = base("scqr3", m, n, ranks);
  // The last term is the Frobenius norm for the shift.
  c.flops = 5.0 / 3.0 * N * N * N + 6.0 * M * N * N / P + 3.0 * N * N * lg + 2.0 * M * N / P;
  c.words = 3.0 * N * N * lg;
  c.calls = 4.0;
  c.messages = c.calls * lg;
  return c;
}

CostEstimate cqr2gs_cost(std::size_t m, std::size_t n, std::size_t ranks, std::size_t b) {
  const auto [M, N, P, lg] = dims(m, n, ranks);
  if (b < 1 || b > n) throw std::invalid_argument("cqr2gs_cost needs 1 <= b <= n");
  const auto B = static_cast<double>(b);
  CostEstimate c = base("cqr2gs", m, n, ranks);
  c.panel_width = b;
  c.flops = 2.0 * B * B * N / 3.0 + N * N * N / 3.0 + 4.0 * M * N * N / P + N * (N + B) * lg;
  c.words = N * (N + B) * lg;
  c.calls = 2.0 * N * N / (B * B);
  c.messages = c.calls * lg;
  return c;
}

CostEstimate scalapack_qr_cost(std::size_t m, std::size_t n, std::size_t ranks) {
  const auto [M, N, P, lg] = dims(m, n, ranks);
  CostEstimate c = base("scalapack", m, n, ranks);
  c.flops = 2.0 * M * N * N / P - 2.0 / 3.0 * N * N * N / P;
  c.words = N * N / 2.0 * lg;
  c.calls = 2.0 * N;
  c.messages = c.calls * lg;
  return c;
}

std::size_t predicted_allreduce_calls(Algorithm algo, const PanelSpec& spec) {
  const std::size_t k = spec.count();
  switch (algo) {
    case Algorithm::cqr: return 1;
    case Algorithm::cqr2: return 2;
    case Algorithm::scqr: return 2;
    case Algorithm::scqr3: return 4;
    case Algorithm::cqrgs: return 2 * k - 1;
    case Algorithm::cqr2gs: return 4 * k - 2;
    case Algorithm::mcqr2gs: return 4 * k - 2;
  }
  throw std::invalid_argument("unknown algorithm");
}

double reconcile_cqr2gs_calls(const CostEstimate& estimate) {
  if (!estimate.panel_width) throw std::invalid_argument("reconcile_cqr2gs_calls needs a cqr2gs estimate");
  const auto b = *estimate.panel_width;
  const auto k = static_cast<double>((estimate.n + b - 1) / b);
  return estimate.calls - 2.0 * (k - 1.0) * (k - 1.0);
}

CostEstimate cost_by_name(const std::string& model, std::size_t m, std::size_t n, std::size_t ranks,
                          std::optional<std::size_t> b) {
  if (model == "cqr") return cqr_cost(m, n, ranks);
  if (model == "cqr2") return cqr2_cost(m, n, ranks);
  if (model == "scqr3") return scqr3_cost(m, n, ranks);
  if (model == "scalapack") return scalapack_qr_cost(m, n, ranks);
  if (model == "cqr2gs") {
    if (!b) throw std::invalid_argument("cqr2gs cost needs a panel width");
    return cqr2gs_cost(m, n, ranks, *b);
  }
  throw std::invalid_argument("unknown cost model '" + model + "'");
}

}  // namespace cholqr
