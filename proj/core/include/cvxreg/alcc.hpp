#pragma once
#include <limits>
#include <memory>

#include "cvxreg/engines.hpp"
#include "cvxreg/metrics.hpp"
#include "cvxreg/operators.hpp"

namespace cvxreg {

/// The dualized row set of one augmented-Lagrangian instance, split into its
/// A1-like and A2-like parts so the two block Lipschitz constants stay
/// separate. Standalone mode penalizes all N(N-1) rows; block mode the
/// nbar(nbar-1) within-block rows.
class ConstraintRows {
 public:
  virtual ~ConstraintRows() = default;
  virtual Index rows() const = 0;
  virtual Index dim_y() const = 0;
  virtual Index dim_xi() const = 0;
  virtual void forward(const VectorXd& y, const VectorXd& xi,
                       VectorXd& out) const = 0;
  virtual void adjoint(const VectorXd& z, VectorXd& out_y,
                       VectorXd& out_xi) const = 0;
};

class FullRows final : public ConstraintRows {
 public:
  explicit FullRows(const ProblemOps& ops) : ops_(&ops) {}
  Index rows() const override { return ops_->indexing().rows_total(); }
  Index dim_y() const override { return ops_->data().N(); }
  Index dim_xi() const override { return ops_->data().N() * ops_->data().n(); }
  void forward(const VectorXd& y, const VectorXd& xi,
               VectorXd& out) const override {
    ops_->apply_rows(y, xi, out);
  }
  void adjoint(const VectorXd& z, VectorXd& out_y,
               VectorXd& out_xi) const override {
    ops_->rows_adjoint(z, out_y, out_xi);
  }

 private:
  const ProblemOps* ops_;
};

class WithinBlockRows final : public ConstraintRows {
 public:
  WithinBlockRows(const ProblemOps& ops, Index block)
      : ops_(&ops), block_(block) {}
  Index rows() const override {
    return ops_->indexing().rows_within_per_block();
  }
  Index dim_y() const override { return ops_->partition().nbar; }
  Index dim_xi() const override {
    return ops_->partition().nbar * ops_->data().n();
  }
  void forward(const VectorXd& y, const VectorXd& xi,
               VectorXd& out) const override {
    ops_->apply_within(block_, y, xi, out);
  }
  void adjoint(const VectorXd& z, VectorXd& out_y,
               VectorXd& out_xi) const override {
    ops_->within_adjoint(block_, z, out_y, out_xi);
  }

 private:
  const ProblemOps* ops_;
  Index block_;
};

struct AlccConfig {
  double mu1 = 1.0;
  double tau1_scale = 1e-2;    // tau_1 = tau1_scale * P_1(start)
  double alpha1_scale = 1e-3;  // alpha_1 = alpha1_scale * (Bbar_y + Bbar_xi)
  double c = 5.0;              // penalty growth factor (> 1)
  double kappa = 0.5;          // tolerance decay exponent (> 0)
  Index max_outer = 30;
  Index mapg_cap = 200000;  // hard cap per MAPG call; Fig-3 l_max still applies
  double infeas_norm_tol = 1e-1;  // standalone outer stop
  double gap_norm_tol = 1e-6;
  double max_seconds = std::numeric_limits<double>::infinity();
  bool record_history = true;
};

/// P_k value and both gradients at (y, xi); one forward pass is shared:
///   P_k = 1/(2 mu) |y-c_y|^2 + gamma/(2 mu) |xi-c_xi|^2
///         + 1/2 |(R(y,xi) - theta_k)_-|^2,
/// grad_y = (y-c_y)/mu - R1^T v, grad_xi = gamma (xi-c_xi)/mu - R2^T v with
/// v = (R(y,xi) - theta_k)_- and (w)_- = max(-w, 0). Centers are ybar and 0 in
/// standalone mode; block mode completes the square of its linear term.
class PenaltyOracle {
 public:
  PenaltyOracle(const ConstraintRows& rows, VectorXd center_y,
                VectorXd center_xi, double gamma);

  void set_outer(const VectorXd* theta_k, double mu_k);
  void eval(const VectorXd& y, const VectorXd& xi, VectorXd& grad_y,
            VectorXd& grad_xi, double* value) const;
  TwoBlockOracle as_oracle() const;

 private:
  const ConstraintRows* rows_;
  VectorXd center_y_, center_xi_;
  double gamma_ = 0;
  const VectorXd* theta_ = nullptr;
  double mu_ = 1;
  mutable VectorXd residual_, vneg_, adj_y_, adj_xi_;
};

struct AlccResult {
  PrimalPoint point;
  VectorXd multiplier;       // mu_{k+1} theta_{k+1}, elementwise >= 0
  double objective = 0;      // 1/2 |y-ybar|^2 (+ linear term in block mode)
  double certified_gap = 0;  // primal value minus a closed-form dual value
  double infeas_raw = 0;     // over the dualized rows
  Index mapg_iters_total = 0;
  SolveReport report;
};

/// Fig-3 augmented Lagrangian loop on
///   min 1/2 |y - center_y|^2 + gamma/2 |xi - center_xi|^2  s.t. R(y,xi) >= 0
/// over the balls Q_y x Q_xi, MAPG as the subproblem solver. Stops on the
/// standalone metric thresholds, on `target_subopt` (certified primal-dual
/// gap; pass 0 to disable), or on budgets.
AlccResult alcc_core(const ConstraintRows& rows, const VectorXd& center_y,
                     const VectorXd& center_xi, double gamma, double Bbar_y,
                     double Bbar_xi, double sigma_A1, double sigma_A2,
                     const AlccConfig& cfg, double target_subopt,
                     const VectorXd& warm_y, const VectorXd& warm_xi);

/// Standalone solver for the regularized problem: dualizes all N(N-1) rows.
/// Outer termination uses the normalized infeasibility/gap thresholds; the
/// reported gap is lambda^T (A1 y + A2 xi) with lambda the scaled multiplier.
AlccResult alcc_solve(const ProblemOps& ops, const VectorXd& ys_bar,
                      double gamma, const ProblemBounds& bounds,
                      const AlccConfig& cfg, const PrimalPoint& warm);

/// Cached per-block spectral norms (within-block A1/A2 parts).
struct BlockSigmas {
  std::vector<double> sigma_A1;
  std::vector<double> sigma_A2;
};

BlockSigmas estimate_block_sigmas(const ProblemOps& ops);

/// Block subproblem of the dual decomposition:
///   min 1/2 |y_i - ybar_i|^2 + gamma/2 |xi_i|^2 - q_y.y_i - q_xi.xi_i
///   s.t. within-block rows >= 0,
/// where (q_y, q_xi) is the block-i slice of C^T theta. Solved by the same
/// machinery after completing the square; stops when the certified
/// suboptimality falls below target_subopt. `objective` is the value of the
/// block objective above (the block's contribution to g_gamma).
AlccResult alcc_solve_block(const ProblemOps& ops, Index block,
                            const VectorXd& ys_bar, const VectorXd& q_y,
                            const VectorXd& q_xi, double gamma,
                            const PrimalPoint& feasible, double target_subopt,
                            const AlccConfig& cfg, const VectorXd& warm_y,
                            const VectorXd& warm_xi,
                            const BlockSigmas& sigmas);

}  // namespace cvxreg
