// margmap: command-line front end.
//
//   margmap solve  --model m.uai [--evidence e.evid] (--explain 0,3,4 | --all-unobserved) [--epsilon x]
//   margmap oracle --model m.uai [--evidence e.evid] (--explain ... | --all-unobserved) [--cap N]
//   margmap gen    --topology grid|chain --rows R --cols C --card K --seed S [-o out.uai]
//   margmap bench  --model m.uai --k K --q Q [--epsilon ...] --seed S --out prefix
//   margmap --config bench.toml bench     (options under [bench])

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "margmap/margmap.hpp"

namespace {

using namespace margmap;

struct QueryOptions {
  std::string model_path;
  std::string evidence_path;
  std::vector<VariableId> explain;
  bool all_unobserved = false;
};

void add_query_options(CLI::App* cmd, QueryOptions& q) {
  cmd->add_option("--model", q.model_path, "UAI model file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--evidence", q.evidence_path, "evidence file (count, then variable/state pairs)")
      ->check(CLI::ExistingFile);
  auto* explain = cmd->add_option("--explain", q.explain, "variables to explain")->delimiter(',');
  auto* all = cmd->add_flag("--all-unobserved", q.all_unobserved,
                            "explain every unobserved variable with two or more states");
  explain->excludes(all);
  all->excludes(explain);
}

struct Query {
  GraphicalModel model;
  Evidence evidence;
  std::vector<VariableId> explain;
};

Query load_query(const QueryOptions& q) {
  GraphicalModel m = load_uai(q.model_path);
  Evidence e = q.evidence_path.empty() ? Evidence{} : load_evid(q.evidence_path);
  e.check(m.cardinalities());
  std::vector<VariableId> explain = q.all_unobserved ? m.explainable(e) : q.explain;
  if (explain.empty()) throw ContractError("nothing to explain: pass --explain or --all-unobserved");
  return {std::move(m), std::move(e), std::move(explain)};
}

std::string real(double x) { return detail::format_real(x); }

std::string format_assignment(const Assignment& a) {
  std::string out;
  for (const auto& [v, s] : a) {
    if (!out.empty()) out += ' ';
    out += std::to_string(v) + "=" + std::to_string(s);
  }
  return out.empty() ? "(none)" : out;
}

int run_solve(const QueryOptions& q, std::optional<double> epsilon) {
  const Query query = load_query(q);
  const ExplanationTrace t = explain_greedily(query.model, query.explain, query.evidence,
                                              HeuristicConfig{epsilon}, ExactMarginal{});
  std::cout << "explained: " << format_assignment(t.explained) << '\n';
  std::cout << "unexplained:";
  for (VariableId v : t.unexplained) std::cout << ' ' << v;
  std::cout << '\n';
  std::cout << "p_tilde: " << real(t.p_tilde) << '\n';
  std::cout << "confidence: " << real(t.confidence) << '\n';
  std::cout << "mar_calls: " << t.mar_calls << '\n';
  std::cout << "trace:\n";
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    std::cout << "  " << i + 1 << ": x" << s.variable << " = " << s.chosen_state
              << "  entropy " << real(s.entropy_at_selection) << "  marginal [";
    for (std::size_t k = 0; k < s.marginal.cardinality(); ++k) {
      std::cout << (k ? " " : "") << real(s.marginal[k]);
    }
    std::cout << "]\n";
  }
  if (t.break_variable) {
    std::cout << "  stopped: x" << *t.break_variable << " entropy " << real(*t.break_entropy)
              << " >= epsilon " << real(*epsilon) << '\n';
  }
  return 0;
}

int run_oracle(const QueryOptions& q, std::size_t cap) {
  const Query query = load_query(q);
  const MmapSolution s = brute_force_mmap(query.model, query.evidence, query.explain, cap);
  std::cout << "assignment: " << format_assignment(s.assignment) << '\n';
  std::cout << "p_star: " << real(s.probability) << '\n';
  return 0;
}

struct GenOptions {
  std::string topology = "grid";
  std::size_t rows = 3;
  std::size_t cols = 3;
  std::size_t card = 2;
  double coupling = 2.0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenOptions& g) {
  Rng rng(g.seed);
  const GraphicalModel m = g.topology == "chain"
                               ? chain_model(g.cols, g.card, g.coupling, rng)
                               : grid_model({g.rows, g.cols, g.card, g.coupling}, rng);
  const std::string text = write_uai(m);
  if (g.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(g.out, std::ios::binary);
    out << text;
    if (!out.flush()) throw Error("cannot write " + g.out);
  }
  return 0;
}

struct BenchOptions {
  BenchmarkSpec spec;
  std::size_t eps_steps = 21;
  std::string out = "bench";
};

int run_bench(BenchOptions b) {
  if (b.spec.epsilon_grid.empty()) {
    if (b.eps_steps < 2) throw ContractError("--eps-steps must be at least 2");
    for (std::size_t i = 0; i < b.eps_steps; ++i) {
      b.spec.epsilon_grid.push_back(static_cast<double>(i) / static_cast<double>(b.eps_steps - 1));
    }
  }
  const GraphicalModel m = load_uai(b.spec.model_path);
  const BenchmarkResult result = run_benchmark(m, b.spec);

  emit_dat(result.points, b.out + "_match.dat", b.out + "_hamming.dat");
  emit_csv(result.instances, b.spec.seed, b.out + "_instances.csv");

  double t_mar = 0.0, t_mmap = 0.0;
  for (const auto& r : result.instances) {
    t_mar += r.t_mar;
    t_mmap += r.t_mmap;
  }
  std::cout << "# model " << b.spec.model_path << "  n=" << m.num_variables()
            << " f=" << m.num_potentials() << " omega=" << m.max_cardinality()
            << "  k=" << b.spec.k << " q=" << b.spec.q << " seed=" << b.spec.seed << '\n';
  std::printf("%8s %12s %12s %12s %9s %8s\n", "epsilon", "exact_match", "hamming",
              "explained", "instances", "skipped");
  for (const auto& p : result.points) {
    std::printf("%8.4f %12.6f %12.6f %12.6f %9zu %8zu\n", p.epsilon, p.exact_match_rate,
                p.mean_hamming, p.mean_explained_fraction, p.instances, p.skipped);
  }
  std::printf("# total t_mar %.6f s, t_mmap %.6f s\n", t_mar, t_mmap);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy marginal MAP by sequences of single-variable marginals"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "INI/TOML file; bench options go under [bench]");

  QueryOptions solve_q;
  std::optional<double> epsilon;
  auto* solve = app.add_subcommand("solve", "explain variables greedily from their marginals");
  add_query_options(solve, solve_q);
  solve->add_option("--epsilon", epsilon, "stop once the least entropic marginal reaches this")
      ->check(CLI::Range(0.0, 1.0));

  QueryOptions oracle_q;
  std::size_t cap = kDefaultOracleCap;
  auto* oracle = app.add_subcommand("oracle", "exact marginal MAP by enumeration");
  add_query_options(oracle, oracle_q);
  oracle->add_option("--cap", cap, "maximum number of explained joint states");

  GenOptions gen_opt;
  auto* gen = app.add_subcommand("gen", "write a random grid or chain model in UAI format");
  gen->add_option("--topology", gen_opt.topology, "grid or chain")
      ->check(CLI::IsMember({"grid", "chain"}));
  gen->add_option("--rows", gen_opt.rows, "grid rows")->check(CLI::PositiveNumber);
  gen->add_option("--cols", gen_opt.cols, "grid columns / chain length")
      ->check(CLI::PositiveNumber);
  gen->add_option("--card", gen_opt.card, "variable cardinality")->check(CLI::PositiveNumber);
  gen->add_option("--coupling", gen_opt.coupling, "log-potentials drawn from [-c, c]");
  gen->add_option("--seed", gen_opt.seed, "random seed");
  gen->add_option("-o,--output", gen_opt.out, "output file (default: stdout)");

  BenchOptions bench_opt;
  auto* bench = app.add_subcommand("bench", "accuracy of the thresholded heuristic against the oracle");
  bench->add_option("--model", bench_opt.spec.model_path, "UAI model file")
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("--k", bench_opt.spec.k, "observed variables per instance");
  bench->add_option("--q", bench_opt.spec.q, "instances per epsilon");
  bench->add_option("--epsilon", bench_opt.spec.epsilon_grid, "strictly increasing epsilon grid")
      ->delimiter(',');
  bench->add_option("--eps-steps", bench_opt.eps_steps,
                    "evenly spaced grid over [0, 1] when --epsilon is absent");
  bench->add_option("--seed", bench_opt.spec.seed, "master seed");
  bench->add_option("--oracle-cap", bench_opt.spec.oracle_cap, "exact solver joint-state cap");
  bench->add_option("--jobs", bench_opt.spec.jobs, "worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_opt.out,
                    "output prefix for _match.dat, _hamming.dat, _instances.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(solve_q, epsilon);
    if (*oracle) return run_oracle(oracle_q, cap);
    if (*gen) return run_gen(gen_opt);
    if (*bench) return run_bench(bench_opt);
  } catch (const std::exception& err) {
    std::cerr << "margmap: " << err.what() << '\n';
    return 1;
  }
  return 1;
}
