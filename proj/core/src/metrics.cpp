#include "cvxreg/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace cvxreg {

std::pair<double, double> infeasibility(const ProblemOps& ops,
                                        const PrimalPoint& eta) {
  VectorXd r;
  ops.apply_rows(eta.y, eta.xi, r);
  const double raw = (-r).cwiseMax(0.0).norm();
  const double rows = static_cast<double>(ops.indexing().rows_total());
  return {raw, raw / std::sqrt(rows)};
}

std::pair<double, double> duality_gap(const ProblemOps& ops,
                                      const DualPoint& theta,
                                      const PrimalPoint& eta) {
  const RowIndexing& idx = ops.indexing();
  if (theta.theta_cross.size() != idx.rows_cross() ||
      theta.theta_pos.size() != ops.data().N())
    throw std::invalid_argument("duality_gap: dual dimension mismatch");
  VectorXd c_eta;
  ops.apply_C(eta.y, eta.xi, c_eta);
  const double raw = theta.theta_cross.dot(c_eta.head(idx.rows_cross())) +
                     theta.theta_pos.dot(c_eta.tail(ops.data().N()));
  const double rows = static_cast<double>(idx.rows_total());
  return {raw, raw / rows};
}

double evaluate_estimator(const PrimalPoint& eta, const Dataset& data,
                          const VectorXd& x_query) {
  const Index N = data.N();
  const Index n = data.n();
  if (x_query.size() != n)
    throw std::invalid_argument("evaluate_estimator: query dimension mismatch");
  if (eta.y.size() != N || eta.xi.size() != N * n)
    throw std::invalid_argument("evaluate_estimator: point dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  for (Index l = 0; l < N; ++l) {
    double v = eta.y(l);
    const double* xil = eta.xi.data() + l * n;
    for (Index j = 0; j < n; ++j) v += xil[j] * (x_query(j) - data.xs(l, j));
    best = std::max(best, v);
  }
  return best;
}

PrimalPoint repair_feasibility(const PrimalPoint& eta, const Dataset& data) {
  PrimalPoint repaired = eta;
  for (Index l = 0; l < data.N(); ++l) {
    repaired.y(l) = evaluate_estimator(eta, data, data.xs.row(l).transpose());
  }
  return repaired;
}

std::string to_string(TermReason reason) {
  switch (reason) {
    case TermReason::thresholds: return "thresholds";
    case TermReason::iter_budget: return "iter-budget";
    case TermReason::time_budget: return "time-budget";
    case TermReason::error: return "error";
  }
  return "unknown";
}

}  // namespace cvxreg
