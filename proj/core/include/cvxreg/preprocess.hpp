#pragma once
#include "cvxreg/types.hpp"

namespace cvxreg {

/// Ordinary least-squares affine fit ybar ~ a + b^T x, turned into the
/// feasible point yhat_l = a + b^T x_l, xihat_l = b (affine functions satisfy
/// every shape constraint with equality). Bbar = sqrt(|yhat-ybar|^2 +
/// gamma |xihat|^2), floored at 1e-8 on exact-affine data; Bbar_y = Bbar and
/// Bbar_xi = Bbar / sqrt(gamma). Falls back to the constant fit when the
/// design matrix is rank deficient.
struct AffineFit {
  PrimalPoint point;
  double intercept = 0;
  VectorXd slope;
  double Bbar = 0;
  double Bbar_y = 0;
  double Bbar_xi = 0;
};

AffineFit affine_feasible_point(const Dataset& data, double gamma);

/// s = max(0, Bbar_y - min_l ybar_l). Adding s to every observation makes
/// every coordinate of y(gamma) nonnegative, so the y >= 0 rows of C are
/// inactive at the solution. Reports subtract s again.
struct ShiftResult {
  VectorXd ys_shifted;
  double shift = 0;
};

ShiftResult shift_observations(const VectorXd& ys, double Bbar_y);

/// Shifted problem plus the bounds the solvers need. `feasible` is the affine
/// point expressed in shifted coordinates.
struct PreparedProblem {
  Dataset data;  // xs shared values, ys shifted
  double shift = 0;
  PrimalPoint feasible;
  ProblemBounds bounds;
};

PreparedProblem prepare_problem(const Dataset& data, double gamma);

}  // namespace cvxreg
