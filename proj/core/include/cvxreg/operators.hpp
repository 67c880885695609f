#pragma once
#include <functional>

#include "cvxreg/indexing.hpp"
#include "cvxreg/types.hpp"

namespace cvxreg {

/// Matrix-free applications of A1, A2, A3, A4, C and their adjoints. Row (l1, l2)
/// of [A1 A2] carries y_{l1} - y_{l2} - xi_{l2}^T (x_{l1} - x_{l2}). Everything
/// is computed from the dataset alone; the caller keeps `data` alive. All
/// methods are const and safe to call concurrently; reductions accumulate in
/// canonical row order so results do not depend on the caller's thread count.
class ProblemOps {
 public:
  ProblemOps(const Dataset& data, const Partition& part);

  const Dataset& data() const { return *data_; }
  const Partition& partition() const { return part_; }
  const RowIndexing& indexing() const { return idx_; }

  // full row set, canonical (l1, l2) order
  void apply_A1(const VectorXd& y, VectorXd& out) const;
  void apply_A1_T(const VectorXd& z, VectorXd& out) const;
  void apply_A2(const VectorXd& xi, VectorXd& out) const;
  void apply_A2_T(const VectorXd& z, VectorXd& out) const;
  /// out = A1 y + A2 xi in a single pass over the rows.
  void apply_rows(const VectorXd& y, const VectorXd& xi, VectorXd& out) const;
  /// (out_y, out_xi) = (A1^T z, A2^T z) in a single pass.
  void rows_adjoint(const VectorXd& z, VectorXd& out_y, VectorXd& out_xi) const;

  // C = [A3 A4; I 0]: cross rows of A1 y + A2 xi stacked above y
  void apply_C(const VectorXd& y, const VectorXd& xi, VectorXd& out) const;
  void apply_C_T(const VectorXd& theta, VectorXd& out_y, VectorXd& out_xi) const;

  // within-block rows of block i, canonical within(i) order
  void apply_within(Index i, const VectorXd& y_i, const VectorXd& xi_i,
                    VectorXd& out) const;
  void within_adjoint(Index i, const VectorXd& z, VectorXd& out_y,
                      VectorXd& out_xi) const;
  // A1^ii / A2^ii parts alone (for the per-block Lipschitz constants)
  void apply_within_A1(Index i, const VectorXd& y_i, VectorXd& out) const;
  void within_A1_adjoint(Index i, const VectorXd& z, VectorXd& out) const;
  void apply_within_A2(Index i, const VectorXd& xi_i, VectorXd& out) const;
  void within_A2_adjoint(Index i, const VectorXd& z, VectorXd& out) const;

 private:
  const Dataset* data_;
  Partition part_;
  RowIndexing idx_;
};

/// Forward/adjoint handle for spectral-norm estimation.
struct LinearOperatorRef {
  Index rows = 0;
  Index cols = 0;
  std::function<void(const VectorXd&, VectorXd&)> forward;
  std::function<void(const VectorXd&, VectorXd&)> adjoint;
};

struct SigmaEstimate {
  double sigma = 0;  // inflated upper estimate of sigma_max
  bool converged = true;
  int iters = 0;
};

/// Power iteration on op^T op from a fixed seeded start. The converged
/// Rayleigh estimate is inflated by 1.01 (1.10 with converged=false if the
/// iteration cap is hit) so downstream Lipschitz constants are overestimates.
SigmaEstimate estimate_sigma_max(const LinearOperatorRef& op, double tol = 1e-6,
                                 int max_iters = 5000);

// sigma handles for the operators used by the solvers
LinearOperatorRef op_A1(const ProblemOps& ops);
LinearOperatorRef op_A2(const ProblemOps& ops);
LinearOperatorRef op_C(const ProblemOps& ops);
LinearOperatorRef op_within_A1(const ProblemOps& ops, Index block);
LinearOperatorRef op_within_A2(const ProblemOps& ops, Index block);

}  // namespace cvxreg
