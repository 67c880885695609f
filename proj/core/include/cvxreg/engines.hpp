#pragma once
#include <functional>
#include <limits>
#include <vector>

#include "cvxreg/types.hpp"

namespace cvxreg {

/// t_{l+1} = (1 + sqrt(1 + 4 t_l^2)) / 2, starting from t_1 = 1.
inline double momentum_next(double t) {
  return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
}

/// Caller-composed stopping rule: iteration cap, displacement tolerance on
/// ||eta^(1) - eta^(2)||, and a wall-clock budget.
struct StopRule {
  Index max_iters = 10000;
  double displacement_tol = 1e-9;
  double max_seconds = std::numeric_limits<double>::infinity();
};

struct ApgResult {
  VectorXd eta;
  Index iters = 0;
  std::vector<double> objective_history;  // filled only when requested
  bool hit_cap = false;
};

/// Accelerated projected ascent of a concave rho over a compact convex Q:
///   eta^(1) = P_Q(eta^(2) + grad rho(eta^(2)) / L)
/// followed by the momentum extrapolation. `grad` must be L-Lipschitz on Q;
/// flip signs to minimize. Throws on a non-finite gradient.
ApgResult apg(const std::function<void(const VectorXd&, VectorXd&)>& grad,
              double L, const std::function<void(VectorXd&)>& project,
              const VectorXd& eta0, const StopRule& stop,
              const std::function<double(const VectorXd&)>* objective = nullptr);

/// Two-block smooth oracle: gradients of P at (y, xi), and optionally the
/// value, from one shared forward pass.
using TwoBlockOracle = std::function<void(
    const VectorXd& y, const VectorXd& xi, VectorXd& grad_y, VectorXd& grad_xi,
    double* value)>;

struct MapgOptions {
  double L_y = 1;
  double L_xi = 1;
  double alpha_y = 0;   // displacement tolerances (step 6)
  double alpha_xi = 0;
  Index l_max = 1000;
  bool record_objective = false;
};

struct MapgResult {
  VectorXd y;
  VectorXd xi;
  Index iters = 0;
  bool hit_cap = false;
  std::vector<double> objective_history;
};

/// Per-block steps 1/L_y and 1/L_xi with shared momentum; returns the last
/// iterate when both displacement tests pass or at l_max. Throws on a
/// non-finite gradient.
MapgResult mapg(const TwoBlockOracle& oracle, const MapgOptions& opt,
                const std::function<void(VectorXd&)>& project_y,
                const std::function<void(VectorXd&)>& project_xi,
                const VectorXd& y0, const VectorXd& xi0);

}  // namespace cvxreg
