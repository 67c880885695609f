#include "cvxreg/engines.hpp"

#include <chrono>
#include <stdexcept>

namespace cvxreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

ApgResult apg(const std::function<void(const VectorXd&, VectorXd&)>& grad,
              double L, const std::function<void(VectorXd&)>& project,
              const VectorXd& eta0, const StopRule& stop,
              const std::function<double(const VectorXd&)>* objective) {
  if (L <= 0) throw std::invalid_argument("apg: L must be positive");
  const auto start = Clock::now();

  VectorXd eta1_prev = eta0;  // eta_{l-1}^(1)
  VectorXd eta1 = eta0;       // eta_l^(1)
  VectorXd eta2 = eta0;       // eta_l^(2)
  VectorXd g(eta0.size());
  double t = 1.0;

  ApgResult result;
  for (Index ell = 1; ell <= stop.max_iters; ++ell) {
    grad(eta2, g);
    if (!g.allFinite())
      throw std::runtime_error("apg: non-finite gradient at iteration " +
                               std::to_string(ell));
    eta1_prev.swap(eta1);
    eta1 = eta2 + g / L;
    project(eta1);

    if (objective) result.objective_history.push_back((*objective)(eta1));
    result.iters = ell;

    const double displacement = (eta1 - eta2).norm();
    const double t_next = momentum_next(t);
    eta2 = eta1 + ((t - 1.0) / t_next) * (eta1 - eta1_prev);
    t = t_next;

    if (displacement <= stop.displacement_tol) break;
    if (seconds_since(start) > stop.max_seconds) break;
    if (ell == stop.max_iters) result.hit_cap = true;
  }
  result.eta = eta1;
  return result;
}

MapgResult mapg(const TwoBlockOracle& oracle, const MapgOptions& opt,
                const std::function<void(VectorXd&)>& project_y,
                const std::function<void(VectorXd&)>& project_xi,
                const VectorXd& y0, const VectorXd& xi0) {
  if (opt.L_y <= 0 || opt.L_xi <= 0)
    throw std::invalid_argument("mapg: step constants must be positive");

  VectorXd y1_prev = y0, y1 = y0, y2 = y0;
  VectorXd xi1_prev = xi0, xi1 = xi0, xi2 = xi0;
  VectorXd gy(y0.size()), gxi(xi0.size());
  double t = 1.0;

  MapgResult result;
  for (Index ell = 1; ell <= opt.l_max; ++ell) {
    oracle(y2, xi2, gy, gxi, nullptr);
    if (!gy.allFinite() || !gxi.allFinite())
      throw std::runtime_error("mapg: non-finite gradient at iteration " +
                               std::to_string(ell));

    y1_prev.swap(y1);
    y1 = y2 - gy / opt.L_y;
    project_y(y1);
    xi1_prev.swap(xi1);
    xi1 = xi2 - gxi / opt.L_xi;
    project_xi(xi1);

    if (opt.record_objective) {
      // extra oracle call; the hot loop stays at one gradient per iteration
      double value = 0;
      VectorXd sy(gy.size()), sxi(gxi.size());
      oracle(y1, xi1, sy, sxi, &value);
      result.objective_history.push_back(value);
    }
    result.iters = ell;

    const double disp_y = (y1 - y2).norm();
    const double disp_xi = (xi1 - xi2).norm();

    const double t_next = momentum_next(t);
    y2 = y1 + ((t - 1.0) / t_next) * (y1 - y1_prev);
    xi2 = xi1 + ((t - 1.0) / t_next) * (xi1 - xi1_prev);
    t = t_next;

    if (disp_y <= opt.alpha_y && disp_xi <= opt.alpha_xi) break;
    if (ell == opt.l_max) result.hit_cap = true;
  }
  result.y = y1;
  result.xi = xi1;
  return result;
}

}  // namespace cvxreg
