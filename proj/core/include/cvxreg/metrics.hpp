#pragma once
#include <string>
#include <vector>

#include "cvxreg/operators.hpp"
#include "cvxreg/types.hpp"

namespace cvxreg {

/// One row of a solve history. Normalizations follow the reporting
/// convention: infeasibility by sqrt(N^2-N), gap by N^2-N. The gap is signed;
/// only termination tests take its absolute value.
struct MetricsSnapshot {
  Index iter = 0;
  double objective = 0;      // 1/2 ||y - ybar||^2
  double reg_objective = 0;  // + gamma/2 ||xi||^2
  double infeas_raw = 0;
  double infeas_norm = 0;
  double gap_raw = 0;
  double gap_norm = 0;
  double wall_time_s = 0;
};

/// ||(A1 y + A2 xi)_-||_2 over all N(N-1) rows, matrix-free.
std::pair<double, double> infeasibility(const ProblemOps& ops,
                                        const PrimalPoint& eta);

/// theta^T C eta (raw, normalized). May be negative near convergence.
std::pair<double, double> duality_gap(const ProblemOps& ops,
                                      const DualPoint& theta,
                                      const PrimalPoint& eta);

/// Fitted estimator: max of the N supporting hyperplanes
/// fhat(x) = max_l { y_l + xi_l^T (x - x_l) }.
double evaluate_estimator(const PrimalPoint& eta, const Dataset& data,
                          const VectorXd& x_query);

/// Replaces y_l by fhat(x_l), which makes (y', xi) exactly feasible.
PrimalPoint repair_feasibility(const PrimalPoint& eta, const Dataset& data);

enum class TermReason { thresholds, iter_budget, time_budget, error };

std::string to_string(TermReason reason);

struct SolveReport {
  std::vector<MetricsSnapshot> history;
  TermReason reason = TermReason::iter_budget;
  Index iters = 0;
  double wall_seconds = 0;
  double cpu_seconds = 0;
  int restarts = 0;        // B_theta doublings (P-APG adaptive policy)
  bool saturated = false;  // final dual norm ended at the B_theta boundary
  std::string note;
};

}  // namespace cvxreg
