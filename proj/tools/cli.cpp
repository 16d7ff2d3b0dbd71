#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cholqr/cost_model.hpp"
#include "cholqr/testbed.hpp"
#include "cholqr/tsm_io.hpp"

namespace cholqr::cli {
namespace {

namespace fs = std::filesystem;

// 17 significant digits: enough to round-trip any double.
std::string metric(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string optional_count(std::optional<std::size_t> v) { return v ? std::to_string(*v) : std::string(); }

struct Source {
  std::string input;
  std::size_t m = 0;
  std::size_t n = 0;
  double kappa = 0.0;
  std::uint64_t seed = 0;
};

struct Loaded {
  Matrix a;
  std::optional<double> kappa;
};

fs::path meta_path(const fs::path& p) { return fs::path(p.string() + ".meta"); }

// κ recorded by `gen`, if the sidecar exists.
std::optional<double> read_meta_kappa(const fs::path& p) {
  std::ifstream in(meta_path(p));
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("kappa=", 0) == 0) return std::stod(line.substr(6));
  }
  return std::nullopt;
}

Loaded load_source(const Source& src) {
  if (!src.input.empty()) return {load_tsm(src.input), read_meta_kappa(src.input)};
  if (src.m == 0 || src.n == 0 || src.kappa == 0.0) {
    throw std::invalid_argument("give --input or all of --m, --n, --kappa");
  }
  return {generate(src.m, src.n, src.kappa, src.seed).matrix, src.kappa};
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  return f;
}

void close_csv(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("write failed for " + path);
}

FactorOptions make_options(const std::string& algo, int ranks, const std::string& backend, std::size_t panels) {
  FactorOptions o;
  o.algorithm = parse_algorithm(algo);
  o.ranks = ranks;
  o.backend = parse_backend(backend);
  o.panels = panels;
  return o;
}

int cmd_gen(std::size_t m, std::size_t n, double kappa, std::uint64_t seed, const std::string& out_path) {
  const GeneratedMatrix g = generate(m, n, kappa, seed);
  save_tsm(out_path, g.matrix);
  std::ofstream meta(meta_path(out_path), std::ios::trunc);
  if (!meta) throw IoError("cannot write " + meta_path(out_path).string());
  meta << "m=" << m << "\nn=" << n << "\nseed=" << seed << "\nkappa=" << metric(kappa)
       << "\nsigma_max=" << metric(g.singular_values.front()) << "\nsigma_min=" << metric(g.singular_values.back())
       << "\n";
  meta.flush();
  if (!meta) throw IoError("write failed for " + meta_path(out_path).string());
  return ok;
}

struct FactorArgs {
  std::string algo = "cqr2";
  int ranks = 1;
  std::string backend = "serial";
  std::size_t panels = 1;
  Source source;
  std::string out_dir;
  bool header = false;
};

int cmd_factor(const FactorArgs& args, std::ostream& out, std::ostream& err) {
  const FactorOptions options = make_options(args.algo, args.ranks, args.backend, args.panels);
  const Loaded in = load_source(args.source);
  const FactorResult result = factorize(in.a, options);
  const StabilityReport report = assess(in.a, result);

  if (args.header) {
    out << "algo,m,n,kappa,P,k,orthogonality,residual,breakdown,allreduce_calls,elapsed_seconds\n";
  }
  out << args.algo << ',' << in.a.rows() << ',' << in.a.cols() << ',' << (in.kappa ? metric(*in.kappa) : "") << ','
      << args.ranks << ',' << (uses_panels(options.algorithm) ? std::to_string(result.panels) : "") << ','
      << metric(report.orthogonality) << ',' << metric(report.residual) << ',' << (result.ok() ? 0 : 1) << ','
      << report.allreduce_calls << ',' << metric(report.elapsed_seconds) << '\n';

  if (!result.ok()) {
    const BreakdownInfo& b = *result.breakdown;
    err << "breakdown in " << to_string(b.stage) << " at pivot " << b.pivot_index;
    if (b.panel_index) err << " of panel " << *b.panel_index;
    err << '\n';
    return breakdown;
  }
  if (!args.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    if (ec) throw IoError("cannot create " + args.out_dir + ": " + ec.message());
    save_tsm(fs::path(args.out_dir) / "q.tsm", *result.q);
    save_tsm(fs::path(args.out_dir) / "r.tsm", result.r->view());
  }
  return ok;
}

struct SweepCondArgs {
  std::vector<std::string> algos{"cqr2", "scqr3", "mcqr2gs"};
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<std::string> kappas;
  std::size_t panels = 1;
  int ranks = 1;
  std::string backend = "serial";
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_sweep_cond(const SweepCondArgs& args) {
  std::vector<FactorOptions> options;
  for (const auto& algo : args.algos) {
    options.push_back(make_options(algo, args.ranks, args.backend, uses_panels(parse_algorithm(algo)) ? args.panels : 1));
  }
  std::ofstream csv = open_csv(args.out);
  csv << "algo,kappa,panels,orthogonality,residual,breakdown\n";
  std::vector<double> kappas;
  for (const auto& text : args.kappas) {
    if (!text.empty()) kappas.push_back(std::stod(text));
  }
  if (!kappas.empty()) {
    const SpectrumGenerator gen(args.m, args.n, args.seed);
    for (double kappa : kappas) {
      const GeneratedMatrix g = gen.make(kappa);
      for (const FactorOptions& o : options) {
        const FactorResult result = factorize(g.matrix, o);
        const StabilityReport report = assess(g.matrix, result);
        csv << to_string(o.algorithm) << ',' << metric(kappa) << ','
            << (uses_panels(o.algorithm) ? std::to_string(result.panels) : "") << ',' << metric(report.orthogonality)
            << ',' << metric(report.residual) << ',' << (result.ok() ? 0 : 1) << '\n';
      }
    }
  }
  close_csv(csv, args.out);
  return ok;
}

struct SweepPanelsArgs {
  std::string algo = "cqr2gs";
  std::size_t m = 0;
  std::size_t n = 0;
  double kappa = 1.0;
  std::vector<std::size_t> panels{1, 2, 3, 5, 10};
  int ranks = 1;
  std::string backend = "serial";
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_sweep_panels(const SweepPanelsArgs& args) {
  if (!uses_panels(parse_algorithm(args.algo))) {
    throw std::invalid_argument("sweep-panels needs a panel algorithm, got " + args.algo);
  }
  std::vector<FactorOptions> options;
  for (std::size_t k : args.panels) options.push_back(make_options(args.algo, args.ranks, args.backend, k));
  std::ofstream csv = open_csv(args.out);
  csv << "panels,b,orthogonality,residual,allreduce_calls,elapsed_seconds\n";
  if (!options.empty()) {
    const GeneratedMatrix g = generate(args.m, args.n, args.kappa, args.seed);
    for (const FactorOptions& o : options) {
      const FactorResult result = factorize(g.matrix, o);
      const StabilityReport report = assess(g.matrix, result);
      csv << result.panels << ',' << result.panel_width << ',' << metric(report.orthogonality) << ','
          << metric(report.residual) << ',' << report.allreduce_calls << ',' << metric(report.elapsed_seconds) << '\n';
    }
  }
  close_csv(csv, args.out);
  return ok;
}

struct CostArgs {
  std::vector<std::string> models{"cqr2", "scqr3", "scalapack"};
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t ranks = 1;
  std::optional<std::size_t> b;
};

int cmd_cost(const CostArgs& args, std::ostream& out) {
  std::vector<CostEstimate> rows;
  for (const auto& model : args.models) rows.push_back(cost_by_name(model, args.m, args.n, args.ranks, args.b));
  out << "model,m,n,P,b,flops,words,messages\n";
  for (const auto& c : rows) {
    out << c.model << ',' << c.m << ',' << c.n << ',' << c.ranks << ',' << optional_count(c.panel_width) << ','
        << metric(c.flops) << ',' << metric(c.words) << ',' << metric(c.messages) << '\n';
  }
  return ok;
}

void add_source(CLI::App& cmd, Source& src) {
  cmd.add_option("--input", src.input, "TSM1 matrix file");
  cmd.add_option("--m", src.m, "rows of the generated matrix");
  cmd.add_option("--n", src.n, "columns of the generated matrix");
  cmd.add_option("--kappa", src.kappa, "condition number of the generated matrix");
  cmd.add_option("--seed", src.seed, "generator seed");
}

void add_run(CLI::App& cmd, int& ranks, std::string& backend) {
  cmd.add_option("--ranks,-P", ranks, "number of ranks")->capture_default_str();
  cmd.add_option("--backend", backend, "serial or parallel")
      ->check(CLI::IsMember({"serial", "parallel"}))
      ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"CholeskyQR family of tall-and-skinny QR factorizations", "cholqr"};
  app.require_subcommand(1);

  std::size_t gen_m = 0, gen_n = 0;
  double gen_kappa = 0.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "write a matrix with a prescribed condition number");
  gen->add_option("M", gen_m)->required();
  gen->add_option("N", gen_n)->required();
  gen->add_option("KAPPA", gen_kappa)->required();
  gen->add_option("SEED", gen_seed)->required();
  gen->add_option("OUT", gen_out)->required();

  FactorArgs fa;
  auto* factor = app.add_subcommand("factor", "factor one matrix and print a CSV row");
  factor->add_option("--algo", fa.algo)->check(CLI::IsMember({"cqr", "cqr2", "scqr", "scqr3", "cqrgs", "cqr2gs", "mcqr2gs"}));
  add_run(*factor, fa.ranks, fa.backend);
  factor->add_option("--panels,-k", fa.panels, "panel count for the GS variants");
  add_source(*factor, fa.source);
  factor->add_option("--out-dir", fa.out_dir, "write q.tsm and r.tsm here");
  factor->add_flag("--header", fa.header, "print the CSV header first");

  SweepCondArgs sc;
  auto* sweep_cond = app.add_subcommand("sweep-cond", "orthogonality and residual across condition numbers");
  sweep_cond->add_option("--algos", sc.algos)->delimiter(',');
  sweep_cond->add_option("--m", sc.m)->required();
  sweep_cond->add_option("--n", sc.n)->required();
  sweep_cond->add_option("--kappas", sc.kappas, "comma-separated; empty gives a header-only file")->delimiter(',');
  sweep_cond->add_option("--panels,-k", sc.panels);
  add_run(*sweep_cond, sc.ranks, sc.backend);
  sweep_cond->add_option("--seed", sc.seed);
  sweep_cond->add_option("--out", sc.out)->required();

  SweepPanelsArgs sp;
  auto* sweep_panels = app.add_subcommand("sweep-panels", "orthogonality, calls and time across panel counts");
  sweep_panels->add_option("--algo", sp.algo);
  sweep_panels->add_option("--m", sp.m)->required();
  sweep_panels->add_option("--n", sp.n)->required();
  sweep_panels->add_option("--kappa", sp.kappa)->required();
  sweep_panels->add_option("--panels-list", sp.panels)->delimiter(',');
  add_run(*sweep_panels, sp.ranks, sp.backend);
  sweep_panels->add_option("--seed", sp.seed);
  sweep_panels->add_option("--out", sp.out)->required();

  CostArgs ca;
  std::size_t cost_b = 0;
  auto* cost = app.add_subcommand("cost", "analytic flop, word and message counts");
  auto* model_opt =
      cost->add_option("--model", ca.models, "cqr, cqr2, scqr3, cqr2gs, scalapack; default adds cqr2gs when --b is given")
          ->delimiter(',');
  cost->add_option("--m", ca.m)->required();
  cost->add_option("--n", ca.n)->required();
  cost->add_option("--ranks,-P", ca.ranks);
  auto* b_opt = cost->add_option("--b", cost_b, "panel width for cqr2gs");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? ok : usage_error;
  }

  try {
    if (*gen) return cmd_gen(gen_m, gen_n, gen_kappa, gen_seed, gen_out);
    if (*factor) return cmd_factor(fa, out, err);
    if (*sweep_cond) return cmd_sweep_cond(sc);
    if (*sweep_panels) return cmd_sweep_panels(sp);
    if (*cost) {
      if (b_opt->count() > 0) {
        ca.b = cost_b;
        if (model_opt->count() == 0) ca.models.insert(ca.models.begin() + 2, "cqr2gs");
      }
      return cmd_cost(ca, out);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return io_error;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return io_error;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return usage_error;
  } catch (const ZeroMatrix& e) {
    err << "usage error: " << e.what() << '\n';
    return usage_error;
  }
  return usage_error;
}

}  // namespace cholqr::cli
