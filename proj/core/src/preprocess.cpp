#include "cvxreg/preprocess.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

namespace cvxreg {

AffineFit affine_feasible_point(const Dataset& data, double gamma) {
  if (gamma <= 0) throw std::invalid_argument("affine fit: gamma must be > 0");
  const Index N = data.N();
  const Index n = data.n();
  if (N < n + 1) throw std::invalid_argument("affine fit: N < n+1");

  MatrixXd D(N, n + 1);
  D.col(0).setOnes();
  D.rightCols(n) = data.xs;

  AffineFit fit;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(D);
  if (qr.rank() == n + 1) {
    VectorXd coef = qr.solve(data.ys);
    fit.intercept = coef(0);
    fit.slope = coef.tail(n);
  } else {
    // rank-deficient design: the constant fit is also feasible
    fit.intercept = data.ys.mean();
    fit.slope = VectorXd::Zero(n);
  }

  fit.point.y = VectorXd::Constant(N, fit.intercept) + data.xs * fit.slope;
  fit.point.xi.resize(N * n);
  for (Index l = 0; l < N; ++l) fit.point.xi.segment(l * n, n) = fit.slope;

  const double Bsq = (fit.point.y - data.ys).squaredNorm() +
                     gamma * fit.point.xi.squaredNorm();
  fit.Bbar = std::max(std::sqrt(Bsq), 1e-8);  // floor on exact-affine data
  fit.Bbar_y = fit.Bbar;
  fit.Bbar_xi = fit.Bbar / std::sqrt(gamma);
  return fit;
}

ShiftResult shift_observations(const VectorXd& ys, double Bbar_y) {
  ShiftResult result;
  result.shift = std::max(0.0, Bbar_y - ys.minCoeff());
  result.ys_shifted = ys.array() + result.shift;
  return result;
}

PreparedProblem prepare_problem(const Dataset& data, double gamma) {
  AffineFit fit = affine_feasible_point(data, gamma);
  ShiftResult shifted = shift_observations(data.ys, fit.Bbar_y);

  PreparedProblem prep;
  prep.data.xs = data.xs;
  prep.data.ys = shifted.ys_shifted;
  prep.shift = shifted.shift;
  prep.feasible = fit.point;
  prep.feasible.y.array() += shifted.shift;  // affine point in shifted frame
  prep.bounds.Bbar_y = fit.Bbar_y;
  prep.bounds.Bbar_xi = fit.Bbar_xi;
  prep.bounds.gamma = gamma;
  prep.bounds.B_theta = 10.0 * std::sqrt(static_cast<double>(data.N()));
  return prep;
}

}  // namespace cvxreg
