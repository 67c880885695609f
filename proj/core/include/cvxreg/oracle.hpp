#pragma once
#include "cvxreg/types.hpp"

namespace cvxreg {

/// Dense constraint matrices in canonical row order. Testing-only path: the
/// solver stack never materializes these. Refuses N > 64 (the memory
/// guardrail); everything here is O(N^2 (n+1) N) storage by construction.
struct ExplicitMatrices {
  MatrixXd A1;  // N(N-1) x N
  MatrixXd A2;  // N(N-1) x Nn
  MatrixXd A3;  // N(N-nbar) x N
  MatrixXd A4;  // N(N-nbar) x Nn
  MatrixXd C;   // [A3 A4; I 0]
};

ExplicitMatrices explicit_matrices(const Dataset& data, const Partition& part);

/// Independent reference solve of the regularized problem
///   min 1/2 |y - ybar|^2 + gamma/2 |xi|^2  s.t.  A1 y + A2 xi >= 0
/// by a dense primal-dual interior-point method (Mehrotra predictor-
/// corrector) on the explicit matrices. Deterministic given (data, gamma,
/// tol); shares no code with the first-order solvers beyond vector
/// arithmetic. tol controls the relative complementarity/residual target.
PrimalPoint oracle_solve(const Dataset& data, double gamma, double tol = 1e-10);

/// Dual multipliers of the reference solve (for containment experiments).
struct OracleSolution {
  PrimalPoint point;
  VectorXd multipliers;  // one per row of [A1 A2], >= 0
  double mu_final = 0;   // final complementarity measure
  int iters = 0;
};

OracleSolution oracle_solve_full(const Dataset& data, double gamma,
                                 double tol = 1e-10);

/// Smallest singular value of the explicit A4; positive certifies linearly
/// independent columns for this instance.
double check_A4_rank(const Dataset& data, const Partition& part);

}  // namespace cvxreg
