#pragma once
#include "cvxreg/alcc.hpp"
#include "cvxreg/preprocess.hpp"

namespace cvxreg {

struct PapgConfig {
  double gamma = 1e-3;
  double B_theta = 0;  // <= 0: adaptive policy, start at 10 sqrt(N)
  bool adaptive_B_theta = true;
  int max_restarts = 6;  // B_theta doublings on saturation
  double gap_norm_tol = 1e-6;
  double infeas_norm_tol = 1e-1;
  Index max_iters = 100000;
  double max_seconds = 7200;
  int workers = 0;               // <= 0: hardware concurrency
  double inner_tol_floor = 1e-6;  // tol_l = min(floor, 1/l^3)
  double final_resolve_tol = 1e-10;
  AlccConfig inner;
  bool record_history = true;
};

struct DualGradientResult {
  PrimalPoint eta;       // block minimizers, concatenated in block order
  VectorXd C_eta;        // C eta; the gradient is -C_eta
  double g_value = 0;    // attained inner objective (sum of block objectives)
  double within_infeas_raw = 0;
  Index inner_iters = 0;
};

/// Shared state of one dual solve: block warm starts, cached spectral norms,
/// and the worker pool configuration.
class DualDecomposition {
 public:
  DualDecomposition(const ProblemOps& ops, const PreparedProblem& prep,
                    const PapgConfig& cfg);

  /// Solves the K block subproblems at theta (in parallel), assembles eta in
  /// block order, and returns -C eta as the dual gradient (Danskin).
  DualGradientResult dual_gradient(const VectorXd& theta, double inner_tol);

  double sigma_C() const { return sigma_C_; }
  double L_g() const { return sigma_C_ * sigma_C_ / cfg_.gamma; }
  Index theta_dim() const { return ops_->indexing().rows_C(); }
  const ProblemOps& ops() const { return *ops_; }
  const PreparedProblem& prepared() const { return *prep_; }
  const PapgConfig& config() const { return cfg_; }
  void reset_warm_starts();

 private:
  const ProblemOps* ops_;
  const PreparedProblem* prep_;
  PapgConfig cfg_;
  BlockSigmas sigmas_;
  double sigma_C_ = 0;
  std::vector<VectorXd> warm_y_, warm_xi_;
  int workers_ = 1;
};

struct PapgResult {
  PrimalPoint point;  // eta at the final theta^(1), re-solved tightly
  DualPoint dual;
  SolveReport report;
  double g_final = 0;
  double delta_estimate = 0;  // certified dual suboptimality surrogate
  double sigma_C = 0;
  double L_g = 0;
  double B_theta = 0;
};

/// Fig-2 accelerated ascent on the regularized dual over
/// Q2 = {theta >= 0, |theta| <= B_theta}; step 1 is a parallel block solve at
/// theta^(2), step 2 projects theta^(2) - C eta / L_g onto Q2. Terminates when
/// |gap_norm| and infeas_norm pass their thresholds, or on budgets.
PapgResult papg_solve(const ProblemOps& ops, const PreparedProblem& prep,
                      const PapgConfig& cfg, const VectorXd* theta0 = nullptr);

/// Projected gradient ascent baseline: identical loop without momentum.
PapgResult dual_gradient_ascent(const ProblemOps& ops,
                                const PreparedProblem& prep,
                                const PapgConfig& cfg,
                                const VectorXd* theta0 = nullptr);

/// Right-hand sides of the suboptimality / infeasibility error bounds:
///   (B_xi sqrt(gamma) + sqrt(2 delta / gamma) sigma_max(C),
///    sqrt(2 delta / gamma) sigma_max(C)).
std::pair<double, double> certificate_for_iterate(double gamma, double delta,
                                                  double B_xi_estimate,
                                                  double sigma_max_C);

}  // namespace cvxreg
