#pragma once
#include <optional>
#include <string>
#include <vector>

#include "cvxreg/metrics.hpp"
#include "cvxreg/testgen.hpp"
#include "cvxreg/types.hpp"

namespace cvxreg {

struct RunConfig {
  std::string input_csv;  // empty: use the generator spec below
  std::optional<GeneratorSpec> generate;
  double gamma = 1e-3;
  Index K = 2;
  std::string solver = "papg-alcc";  // papg-alcc | alcc | dga
  double gap_tol = 1e-6;
  double infeas_tol = 1e-1;
  Index max_iters = 100000;
  double max_seconds = 7200;  // the 2-hour protocol budget
  int workers = 0;
  std::uint64_t seed = 1;
  bool continuation = false;  // after solving at gamma, warm-start at gamma/10
  bool repair = false;        // report the feasibility-repaired point as well
  std::string out_json;
  std::string out_history_csv;
};

struct RunReport {
  RunConfig config;
  std::vector<MetricsSnapshot> history;
  struct Final {
    double objective = 0;  // against the original (unshifted) observations
    double reg_objective = 0;
    double gap_raw = 0;
    double gap_norm = 0;
    double infeas_raw = 0;
    double infeas_norm = 0;
    double cpu_min = 0;
    double wall_min = 0;
    std::string reason;
  } final;
  struct Certificates {
    double delta_estimate = 0;
    double subopt_bound = 0;
    double infeas_bound = 0;
    double sigma_C = 0;
    double B_xi_estimate = 0;
    bool estimated = true;
  } certificates;
  PrimalPoint solution;  // y already unshifted
  double shift = 0;
  std::string environment;
  int exit_code = 0;  // 0 thresholds, 2 budget, 1 error
};

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);

/// Executes preprocessing, the selected solver, metrics and certificates;
/// writes the JSON report and CSV history when paths are set.
RunReport run(const RunConfig& cfg);

/// Runs each config in order (failures recorded per row, batch continues) and
/// returns the benchmark table as CSV text: one row per run with N, solver,
/// seed, CPU/wall minutes, objective, signed normalized gap, normalized
/// infeasibility and the termination reason. Budget-terminated runs show N/A
/// in the value columns.
std::string bench(const std::vector<RunConfig>& batch);

std::vector<RunConfig> batch_from_json(const std::string& text);
std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);

/// Lossless float formatting (17 significant digits) used by all CSV output.
std::string format_double(double v);

std::string history_to_csv(const std::vector<MetricsSnapshot>& history);

}  // namespace cvxreg
