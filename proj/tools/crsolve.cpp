// crsolve: fit the least-squares convex regression estimator with the
// dual-decomposition solver suite, or run benchmark batches.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cvxreg/runner.hpp"

namespace {

struct GenFlags {
  std::string kind;
  cvxreg::Index n = 1;
  cvxreg::Index N = 0;
  double noise = 1.0;
};

void add_generate_flags(CLI::App* cmd, GenFlags& gen) {
  cmd->add_option("--generate", gen.kind,
                  "generator kind: quadratic | exponential | affine-noiseless "
                  "| custom-1d");
  cmd->add_option("--n", gen.n, "feature dimension for --generate");
  cmd->add_option("--N", gen.N, "observation count for --generate");
  cmd->add_option("--noise", gen.noise, "noise scale for --generate");
}

std::optional<cvxreg::GeneratorSpec> make_spec(const GenFlags& gen) {
  if (gen.kind.empty()) return std::nullopt;
  cvxreg::GeneratorSpec spec;
  spec.kind = cvxreg::kind_from_string(gen.kind);
  spec.n = gen.n;
  spec.N = gen.N;
  spec.noise = gen.noise;
  spec.seed = 0;  // inherit the run seed
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matrix-free convex regression solver suite"};
  app.require_subcommand(1);

  cvxreg::RunConfig cfg;
  GenFlags gen;

  CLI::App* run_cmd = app.add_subcommand("run", "solve one instance");
  run_cmd->add_option("--input", cfg.input_csv, "dataset CSV (x1,...,xn,y)");
  add_generate_flags(run_cmd, gen);
  run_cmd->add_option("--K", cfg.K, "number of partition blocks");
  run_cmd->add_option("--gamma", cfg.gamma, "Tikhonov weight");
  run_cmd->add_option("--solver", cfg.solver, "papg-alcc | alcc | dga");
  run_cmd->add_option("--gap-tol", cfg.gap_tol, "normalized |gap| threshold");
  run_cmd->add_option("--infeas-tol", cfg.infeas_tol,
                      "normalized infeasibility threshold");
  run_cmd->add_option("--max-iters", cfg.max_iters, "outer iteration budget");
  run_cmd->add_option("--max-seconds", cfg.max_seconds, "wall-clock budget");
  run_cmd->add_option("--workers", cfg.workers,
                      "block-solve worker threads (0 = hardware)");
  run_cmd->add_option("--seed", cfg.seed, "instance seed");
  run_cmd->add_flag("--continuation", cfg.continuation,
                    "after solving, warm-start a second solve at gamma/10");
  run_cmd->add_flag("--repair", cfg.repair,
                    "also report the feasibility-repaired estimator");
  run_cmd->add_option("--out", cfg.out_json, "report JSON path");
  run_cmd->add_option("--history-out", cfg.out_history_csv,
                      "per-iteration history CSV path");

  std::string batch_path, bench_out;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "run a batch and emit the benchmark table");
  bench_cmd->add_option("--batch", batch_path, "JSON array of run configs")
      ->required();
  bench_cmd->add_option("--out", bench_out, "table CSV path");

  GenFlags gen_gen;
  std::string gen_out;
  std::uint64_t gen_seed = 1;
  CLI::App* gen_cmd =
      app.add_subcommand("gen", "generate a dataset and write it as CSV");
  add_generate_flags(gen_cmd, gen_gen);
  gen_cmd->add_option("--seed", gen_seed, "instance seed");
  gen_cmd->add_option("--out", gen_out, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      cfg.generate = make_spec(gen);
      cvxreg::RunReport report = cvxreg::run(cfg);
      std::printf(
          "solver=%s reason=%s objective=%.6e gap_norm=%+.3e infeas_norm=%.3e "
          "wall_min=%.2f cpu_min=%.2f\n",
          cfg.solver.c_str(), report.final.reason.c_str(),
          report.final.objective, report.final.gap_norm,
          report.final.infeas_norm, report.final.wall_min,
          report.final.cpu_min);
      return report.exit_code;
    }
    if (bench_cmd->parsed()) {
      std::ifstream in(batch_path);
      if (!in) throw std::invalid_argument("cannot open batch: " + batch_path);
      std::stringstream buffer;
      buffer << in.rdbuf();
      const std::string table = cvxreg::bench(cvxreg::batch_from_json(buffer.str()));
      if (bench_out.empty()) {
        std::cout << table;
      } else {
        std::ofstream out(bench_out);
        if (!out) throw std::runtime_error("cannot write table: " + bench_out);
        out << table;
      }
      return 0;
    }
    if (gen_cmd->parsed()) {
      auto spec = make_spec(gen_gen);
      if (!spec) throw std::invalid_argument("gen requires --generate");
      spec->seed = gen_seed;
      cvxreg::save_csv(cvxreg::gen_instance(*spec), gen_out);
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 1;
}
