// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cholqr/cost_model.hpp"
#include "cholqr/driver.hpp"
#include "cholqr/testbed.hpp"

using namespace cholqr;

namespace {

// Regression values measured once on the desk-scale suite (seed 2024) and frozen.
constexpr int frozen_mcqr2gs_two_panel_failure_decade = 16;
constexpr std::size_t frozen_cqr2gs_min_panels_at_1e15 = 5;

constexpr std::size_t suite_m = 3000;
constexpr std::size_t suite_n = 300;
constexpr std::uint64_t suite_seed = 2024;
constexpr int suite_ranks = 4;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FactorResult run(ConstMatrixView a, Algorithm algo, int ranks, std::size_t panels = 1,
                 Backend backend = Backend::serial) {
  FactorOptions o;
  o.algorithm = algo;
  o.ranks = ranks;
  o.panels = panels;
  o.backend = backend;
  return factorize(a, o);
}

bool failed(const StabilityReport& r) { return r.breakdown.has_value() || r.orthogonality > 1e-8; }

bool accurate(const StabilityReport& r) {
  return !r.breakdown && r.orthogonality <= 1e-13 && r.residual <= 1e-13;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << why;
      pass = false;
    }
  }
};

const SpectrumGenerator& suite() {
  static const SpectrumGenerator gen(suite_m, suite_n, suite_seed);
  return gen;
}

const std::vector<GeneratedMatrix>& suite_matrices() {
  static const std::vector<GeneratedMatrix> all = [] {
    std::vector<GeneratedMatrix> v;
    for (int e = 0; e <= 15; ++e) v.push_back(suite().make(std::pow(10.0, e)));
    return v;
  }();
  return all;
}

Outcome stability_sweep() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (int e = 0; e <= 15; ++e) {
    const GeneratedMatrix& g = suite_matrices()[static_cast<std::size_t>(e)];
    const StabilityReport s3 = assess(g.matrix, run(g.matrix, Algorithm::scqr3, suite_ranks));
    o.require(accurate(s3), "scqr3 misses 1e-13 at 1e" + std::to_string(e));
    const StabilityReport c2 = assess(g.matrix, run(g.matrix, Algorithm::cqr2, suite_ranks));
    if (e <= 6) o.require(accurate(c2), "cqr2 misses 1e-13 at 1e" + std::to_string(e));
    if (e >= 10) o.require(failed(c2), "cqr2 still stable at 1e" + std::to_string(e));
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed <= 60.0, "runtime " + std::to_string(elapsed) + " s");
  o.detail << (o.pass ? "" : "; ") << "16 decades in " << elapsed << " s (including generation)";
  return o;
}

Outcome panel_claim() {
  Outcome o;
  for (int e = 0; e <= 15; ++e) {
    const GeneratedMatrix& g = suite_matrices()[static_cast<std::size_t>(e)];
    o.require(accurate(assess(g.matrix, run(g.matrix, Algorithm::mcqr2gs, suite_ranks, 3))),
              "k=3 misses 1e-13 at 1e" + std::to_string(e));
  }
  // First decade where two panels fail; the suite continues past 1e15 to locate it.
  int first_failure = -1;
  for (int e = 0; e <= 17 && first_failure < 0; ++e) {
    const GeneratedMatrix g = e <= 15 ? suite_matrices()[static_cast<std::size_t>(e)] : suite().make(std::pow(10.0, e));
    if (failed(assess(g.matrix, run(g.matrix, Algorithm::mcqr2gs, suite_ranks, 2)))) first_failure = e;
  }
  o.require(first_failure >= 14 && first_failure <= 16,
            "k=2 first fails at 1e" + std::to_string(first_failure) + ", outside 1e15 +/- 1 decade");
  o.require(first_failure == frozen_mcqr2gs_two_panel_failure_decade,
            "k=2 failure decade moved from frozen 1e" + std::to_string(frozen_mcqr2gs_two_panel_failure_decade));
  o.detail << (o.pass ? "" : "; ") << "k=3 accurate through 1e15, k=2 first fails at 1e" << first_failure;
  return o;
}

Outcome panel_sensitivity() {
  Outcome o;
  const GeneratedMatrix& g = suite_matrices()[15];
  std::size_t min_pass = 0, max_pass = 0;
  double at_max = NAN;
  std::ostringstream trace;
  for (std::size_t k : {1, 2, 3, 5, 10}) {
    const FactorResult f = run(g.matrix, Algorithm::cqr2gs, suite_ranks, k);
    const StabilityReport r = assess(g.matrix, f);
    trace << " k=" << k << ':';
    if (f.ok()) {
      trace << std::scientific << std::setprecision(2) << r.orthogonality << std::defaultfloat;
    } else {
      trace << "breakdown";
    }
    if (k == 1) o.require(!f.ok(), "k=1 did not break down");
    if (accurate(r)) {
      if (min_pass == 0) min_pass = k;
      max_pass = k;
      at_max = r.orthogonality;
    }
  }
  o.require(max_pass != 0 && at_max <= 1e-13, "no panel count reaches 1e-13");
  o.require(min_pass == frozen_cqr2gs_min_panels_at_1e15,
            "minimal passing k " + std::to_string(min_pass) + " != frozen " +
                std::to_string(frozen_cqr2gs_min_panels_at_1e15));
  o.detail << (o.pass ? "" : "; ") << "minimal passing k=" << min_pass << ";" << trace.str();
  return o;
}

Outcome degeneracy() {
  Outcome o;
  const GeneratedMatrix g = generate(600, 60, 1e6, 77);
  int compared = 0;
  for (int ranks : {1, 2, 3, 8}) {
    for (Backend backend : {Backend::serial, Backend::parallel}) {
      const FactorResult ref = run(g.matrix, Algorithm::cqr2, ranks, 1, backend);
      for (Algorithm algo : {Algorithm::cqr2gs, Algorithm::mcqr2gs}) {
        const FactorResult f = run(g.matrix, algo, ranks, 1, backend);
        const bool same = ref.ok() && f.ok() && bitwise_equal(*f.q, *ref.q) && bitwise_equal(f.r->view(), ref.r->view());
        o.require(same, std::string(to_string(algo)) + " differs at P=" + std::to_string(ranks) + " " + to_string(backend));
        ++compared;
      }
    }
  }
  o.detail << (o.pass ? "" : "; ") << compared << " bitwise comparisons";
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(5150);
  double worst_r = 0.0, worst_res = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 20)(rng);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(n, 200)(rng);
    const double kappa = std::pow(10.0, std::uniform_real_distribution<double>(0.0, 3.0)(rng));
    const int ranks = std::uniform_int_distribution<int>(1, static_cast<int>(std::min<std::size_t>(m, 8)))(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(n, 5))(rng);
    const GeneratedMatrix g = generate(m, n, kappa, rng());
    const double norm = std::sqrt(frobenius_norm_squared(g.matrix));
    const ThinQR oracle = householder_qr_reference(g.matrix);

    for (Algorithm algo : {Algorithm::cqr, Algorithm::cqr2, Algorithm::scqr, Algorithm::scqr3, Algorithm::cqrgs,
                           Algorithm::cqr2gs, Algorithm::mcqr2gs}) {
      const FactorResult f = run(g.matrix, algo, ranks, uses_panels(algo) ? k : 1);
      if (!f.ok()) {
        o.require(false, std::string(to_string(algo)) + " broke down on instance " + std::to_string(instance));
        continue;
      }
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double sign = (*f.r)(i, i) < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = i; j < n; ++j) diff = std::max(diff, std::abs(sign * (*f.r)(i, j) - oracle.r(i, j)));
      }
      const double res = residual_error(g.matrix, *f.q, *f.r);
      worst_r = std::max(worst_r, diff / norm);
      worst_res = std::max(worst_res, res);
      o.require(diff <= 1e-10 * norm, std::string(to_string(algo)) + " R differs on instance " + std::to_string(instance));
      o.require(res <= 1e-13, std::string(to_string(algo)) + " residual on instance " + std::to_string(instance));
    }
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed <= 10.0, "runtime " + std::to_string(elapsed) + " s");
  o.detail << (o.pass ? "" : "; ") << "worst |R - R_ref|/||A||_F " << worst_r << ", worst residual " << worst_res
           << ", " << elapsed << " s";
  return o;
}

Outcome determinism() {
  Outcome o;
  const GeneratedMatrix g = generate(800, 40, 1e7, 31337);
  int runs = 0;
  for (Algorithm algo : {Algorithm::cqr, Algorithm::cqr2, Algorithm::scqr, Algorithm::scqr3, Algorithm::cqrgs,
                         Algorithm::cqr2gs, Algorithm::mcqr2gs}) {
    const std::size_t k = uses_panels(algo) ? 3 : 1;
    const FactorResult ref = run(g.matrix, algo, suite_ranks, k, Backend::serial);
    const StabilityReport ref_report = assess(g.matrix, ref);
    for (int rep = 0; rep < 20; ++rep) {
      const FactorResult f = run(g.matrix, algo, suite_ranks, k, Backend::parallel);
      const StabilityReport r = assess(g.matrix, f);
      bool same = f.ok() == ref.ok() && f.allreduce_calls == ref.allreduce_calls;
      if (same && f.ok()) {
        same = bitwise_equal(*f.q, *ref.q) && bitwise_equal(f.r->view(), ref.r->view()) &&
               r.orthogonality == ref_report.orthogonality && r.residual == ref_report.residual;
      }
      o.require(same, std::string(to_string(algo)) + " run " + std::to_string(rep) + " differs");
      ++runs;
    }
  }
  o.detail << (o.pass ? "" : "; ") << runs << " parallel runs matched the serial output";
  return o;
}

Outcome interlacing() {
  Outcome o;
  for (double kappa : {1.0, 1e4, 1e8}) {
    const GeneratedMatrix g = generate(300, 30, kappa, suite_seed);
    for (std::size_t b : {3, 15}) {
      const PanelBoundReport r = panel_bound_check(g, b, 0.05);
      o.require(r.passed(), "kappa " + std::to_string(kappa) + " b=" + std::to_string(b) + ": cond(B)=" +
                                std::to_string(r.panel_condition) + " lower=" + std::to_string(r.lower_bound));
    }
  }
  o.detail << (o.pass ? "" : "; ") << "6 (kappa, b) cases";
  return o;
}

Outcome cost_consistency() {
  Outcome o;
  const GeneratedMatrix g = generate(240, 30, 1e3, 8);
  int checks = 0;
  for (Algorithm algo : {Algorithm::cqr, Algorithm::cqr2, Algorithm::scqr, Algorithm::scqr3, Algorithm::cqrgs,
                         Algorithm::cqr2gs, Algorithm::mcqr2gs}) {
    for (int ranks : {1, 2, 4, 8}) {
      for (std::size_t k : {1, 2, 3, 10}) {
        if (!uses_panels(algo) && k != 1) continue;
        const FactorResult f = run(g.matrix, algo, ranks, k);
        const PanelSpec spec = PanelSpec::from_count(30, k);
        o.require(f.ok() && f.allreduce_calls == predicted_allreduce_calls(algo, spec),
                  std::string(to_string(algo)) + " P=" + std::to_string(ranks) + " k=" + std::to_string(k));
        if (algo == Algorithm::cqr2gs) {
          const CostEstimate c = cqr2gs_cost(240, 30, static_cast<std::size_t>(ranks), spec.width());
          o.require(reconcile_cqr2gs_calls(c) == static_cast<double>(f.allreduce_calls),
                    "cqr2gs formula does not reconcile at k=" + std::to_string(k));
        }
        const double expected_messages = static_cast<double>(f.allreduce_calls) * std::log2(static_cast<double>(ranks));
        if (algo == Algorithm::cqr2) o.require(cqr2_cost(240, 30, ranks).messages == expected_messages, "cqr2 messages");
        if (algo == Algorithm::scqr3) o.require(scqr3_cost(240, 30, ranks).messages == expected_messages, "scqr3 messages");
        ++checks;
      }
    }
  }
  // Word counts: P ≥ 2 so that log₂P > 0 and the comparison is strict.
  std::mt19937_64 rng(8080);
  for (int point = 0; point < 100; ++point) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 5000)(rng);
    const std::size_t m = n * std::uniform_int_distribution<std::size_t>(1, 100)(rng);
    const std::size_t b = std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);
    const std::size_t p = std::uniform_int_distribution<std::size_t>(2, 4096)(rng);
    o.require(cqr2gs_cost(m, n, p, b).words < cqr2_cost(m, n, p).words,
              "words not lower at m=" + std::to_string(m) + " n=" + std::to_string(n) + " b=" + std::to_string(b));
  }
  o.detail << (o.pass ? "" : "; ") << checks << " instrumented runs, 100 word-count grid points";
  return o;
}

Outcome shift_formula() {
  Outcome o;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const GeneratedMatrix g = generate(suite_m, suite_n, 1e15, seed);
    const FactorResult f = run(g.matrix, Algorithm::scqr, suite_ranks);
    o.require(f.ok(), "scqr broke down for seed " + std::to_string(seed));
  }
  std::mt19937_64 rng(99);
  for (int ranks : {1, 3, 4}) {
    const GeneratedMatrix g = generate(400, 30, 1e3, rng());
    FactorOptions zero;
    zero.algorithm = Algorithm::scqr;
    zero.ranks = ranks;
    zero.shift.unit_roundoff = 0.0;
    const FactorResult a = factorize(g.matrix, zero);
    const FactorResult b = run(g.matrix, Algorithm::cqr, ranks);
    o.require(a.ok() && b.ok() && bitwise_equal(*a.q, *b.q) && bitwise_equal(a.r->view(), b.r->view()),
              "u=0 differs from cqr at P=" + std::to_string(ranks));
  }
  o.detail << (o.pass ? "" : "; ") << "10 seeds at 1e15 without breakdown; u=0 equals cqr bitwise";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"stability sweep", stability_sweep},
      {"mcqr2gs panel claim", panel_claim},
      {"cqr2gs panel sensitivity", panel_sensitivity},
      {"degeneracy bitwise", degeneracy},
      {"oracle equivalence", oracle_equivalence},
      {"determinism", determinism},
      {"interlacing bound", interlacing},
      {"cost-model consistency", cost_consistency},
      {"shift formula", shift_formula},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.str().c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
