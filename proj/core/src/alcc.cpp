#include "cvxreg/alcc.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "cvxreg/projections.hpp"

namespace cvxreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

PenaltyOracle::PenaltyOracle(const ConstraintRows& rows, VectorXd center_y,
                             VectorXd center_xi, double gamma)
    : rows_(&rows),
      center_y_(std::move(center_y)),
      center_xi_(std::move(center_xi)),
      gamma_(gamma) {}

void PenaltyOracle::set_outer(const VectorXd* theta_k, double mu_k) {
  theta_ = theta_k;
  mu_ = mu_k;
}

void PenaltyOracle::eval(const VectorXd& y, const VectorXd& xi,
                         VectorXd& grad_y, VectorXd& grad_xi,
                         double* value) const {
  rows_->forward(y, xi, residual_);  // one forward pass shared by everything
  if (theta_) residual_ -= *theta_;
  vneg_ = (-residual_).cwiseMax(0.0);
  rows_->adjoint(vneg_, adj_y_, adj_xi_);
  grad_y = (y - center_y_) / mu_ - adj_y_;
  grad_xi = (gamma_ / mu_) * (xi - center_xi_) - adj_xi_;
  if (value) {
    *value = (y - center_y_).squaredNorm() / (2.0 * mu_) +
             gamma_ * (xi - center_xi_).squaredNorm() / (2.0 * mu_) +
             0.5 * vneg_.squaredNorm();
  }
}

TwoBlockOracle PenaltyOracle::as_oracle() const {
  return [this](const VectorXd& y, const VectorXd& xi, VectorXd& gy,
                VectorXd& gxi, double* value) { eval(y, xi, gy, gxi, value); };
}

AlccResult alcc_core(const ConstraintRows& rows, const VectorXd& center_y,
                     const VectorXd& center_xi, double gamma, double Bbar_y,
                     double Bbar_xi, double sigma_A1, double sigma_A2,
                     const AlccConfig& cfg, double target_subopt,
                     const VectorXd& warm_y, const VectorXd& warm_xi) {
  if (cfg.c <= 1) throw std::invalid_argument("alcc: c must be > 1");
  if (cfg.kappa <= 0) throw std::invalid_argument("alcc: kappa must be > 0");
  if (cfg.mu1 <= 0) throw std::invalid_argument("alcc: mu1 must be > 0");
  const auto start = Clock::now();

  const Index m = rows.rows();
  VectorXd theta = VectorXd::Zero(m);
  double mu = cfg.mu1;

  VectorXd y = project_ball(warm_y, center_y, Bbar_y);
  VectorXd xi = project_ball(warm_xi, center_xi, Bbar_xi);

  PenaltyOracle oracle(rows, center_y, center_xi, gamma);
  oracle.set_outer(&theta, mu);

  double tau, alpha_y, alpha_xi;
  {
    VectorXd gy, gxi;
    double p1 = 0;
    oracle.eval(y, xi, gy, gxi, &p1);
    if (!std::isfinite(p1))
      throw std::runtime_error("alcc: non-finite P_1 at the start point");
    tau = std::max(cfg.tau1_scale * p1, 1e-16);
    alpha_y = alpha_xi = cfg.alpha1_scale * (Bbar_y + Bbar_xi);
  }

  // cached forward of the centers, used by the closed-form dual value
  VectorXd rows_center;
  rows.forward(center_y, center_xi, rows_center);

  const auto project_y = [&](VectorXd& v) {
    project_ball_inplace(v, center_y, Bbar_y);
  };
  const auto project_xi = [&](VectorXd& v) {
    project_ball_inplace(v, center_xi, Bbar_xi);
  };

  AlccResult result;
  result.report.reason = TermReason::iter_budget;
  VectorXd residual(m), vneg(m), lambda(m), adj_y, adj_xi;

  for (Index k = 1; k <= cfg.max_outer; ++k) {
    const double L_y = 1.0 / mu + sigma_A1 * sigma_A1;
    const double L_xi = gamma / mu + sigma_A2 * sigma_A2;

    const double lmax_real =
        4.0 * std::sqrt((L_y * Bbar_y * Bbar_y + L_xi * Bbar_xi * Bbar_xi) / tau);
    Index lmax = static_cast<Index>(std::ceil(lmax_real));
    if (lmax < 10) lmax = 10;
    if (lmax > cfg.mapg_cap) lmax = cfg.mapg_cap;

    oracle.set_outer(&theta, mu);
    MapgOptions mopt;
    mopt.L_y = L_y;
    mopt.L_xi = L_xi;
    mopt.alpha_y = alpha_y;
    mopt.alpha_xi = alpha_xi;
    mopt.l_max = lmax;
    MapgResult inner =
        mapg(oracle.as_oracle(), mopt, project_y, project_xi, y, xi);
    y = inner.y;
    xi = inner.xi;
    result.mapg_iters_total += inner.iters;

    rows.forward(y, xi, residual);
    vneg = (theta - residual).cwiseMax(0.0);  // (A1 y + A2 xi - theta_k)_-
    lambda = mu * vneg;                       // = mu_{k+1} theta_{k+1}

    const double infeas_raw = (-residual).cwiseMax(0.0).norm();
    const double gap_raw = lambda.dot(residual);

    // certified primal-dual gap from the closed-form dual value at lambda
    rows.adjoint(lambda, adj_y, adj_xi);
    const double dual_value = -0.5 * adj_y.squaredNorm() -
                              adj_xi.squaredNorm() / (2.0 * gamma) -
                              lambda.dot(rows_center);
    const double primal_value = 0.5 * (y - center_y).squaredNorm() +
                                0.5 * gamma * (xi - center_xi).squaredNorm();
    const double certified = primal_value - dual_value;

    result.certified_gap = certified;
    result.infeas_raw = infeas_raw;
    result.multiplier = lambda;
    result.report.iters = k;

    if (cfg.record_history) {
      MetricsSnapshot snap;
      snap.iter = k;
      snap.objective = 0.5 * (y - center_y).squaredNorm();
      snap.reg_objective = primal_value;
      snap.infeas_raw = infeas_raw;
      snap.infeas_norm = infeas_raw / std::sqrt(static_cast<double>(m));
      snap.gap_raw = gap_raw;
      snap.gap_norm = gap_raw / static_cast<double>(m);
      snap.wall_time_s = seconds_since(start);
      result.report.history.push_back(snap);
    }

    bool stop = false;
    if (target_subopt > 0) {
      stop = certified <= target_subopt &&
             lambda.norm() * infeas_raw <= target_subopt;
    } else {
      const double infeas_norm = infeas_raw / std::sqrt(static_cast<double>(m));
      const double gap_norm = gap_raw / static_cast<double>(m);
      stop = infeas_norm <= cfg.infeas_norm_tol &&
             std::abs(gap_norm) <= cfg.gap_norm_tol;
    }
    if (stop) {
      result.report.reason = TermReason::thresholds;
      break;
    }
    if (seconds_since(start) > cfg.max_seconds) {
      result.report.reason = TermReason::time_budget;
      break;
    }

    // Fig-3 steps 4-6
    theta = vneg / cfg.c;  // (mu_k / mu_{k+1}) (A1 y + A2 xi - theta_k)_-
    mu *= cfg.c;
    const double decay =
        std::pow(cfg.c * std::pow(static_cast<double>(k), 1.0 + cfg.kappa), 2.0);
    tau /= decay;
    alpha_y /= decay;
    alpha_xi /= decay;
  }

  result.point.y = y;
  result.point.xi = xi;
  result.objective = 0.5 * (y - center_y).squaredNorm();
  result.report.wall_seconds = seconds_since(start);
  return result;
}

AlccResult alcc_solve(const ProblemOps& ops, const VectorXd& ys_bar,
                      double gamma, const ProblemBounds& bounds,
                      const AlccConfig& cfg, const PrimalPoint& warm) {
  FullRows rows(ops);
  const double sigma_A1 = estimate_sigma_max(op_A1(ops)).sigma;
  const double sigma_A2 = estimate_sigma_max(op_A2(ops)).sigma;
  const VectorXd center_xi = VectorXd::Zero(ops.data().N() * ops.data().n());
  AlccResult result =
      alcc_core(rows, ys_bar, center_xi, gamma, bounds.Bbar_y, bounds.Bbar_xi,
                sigma_A1, sigma_A2, cfg, /*target_subopt=*/0.0, warm.y, warm.xi,
                nullptr, nullptr);
  return result;
}

BlockSigmas estimate_block_sigmas(const ProblemOps& ops) {
  const Index K = ops.partition().K;
  BlockSigmas sigmas;
  sigmas.sigma_A1.resize(static_cast<size_t>(K));
  sigmas.sigma_A2.resize(static_cast<size_t>(K));
  // A1^ii has the same +1/-1 stencil in every block
  const double s1 = estimate_sigma_max(op_within_A1(ops, 0)).sigma;
  for (Index i = 0; i < K; ++i) {
    sigmas.sigma_A1[static_cast<size_t>(i)] = s1;
    sigmas.sigma_A2[static_cast<size_t>(i)] =
        estimate_sigma_max(op_within_A2(ops, i)).sigma;
  }
  return sigmas;
}

AlccResult alcc_solve_block(const ProblemOps& ops, Index block,
                            const VectorXd& ys_bar, const VectorXd& q_y,
                            const VectorXd& q_xi, double gamma,
                            const PrimalPoint& feasible, double target_subopt,
                            const AlccConfig& cfg, const VectorXd& warm_y,
                            const VectorXd& warm_xi, const BlockSigmas& sigmas) {
  const Index nbar = ops.partition().nbar;
  const Index n = ops.data().n();
  const Index base = ops.partition().block_begin(block);

  const VectorXd ybar_i = ys_bar.segment(base, nbar);
  // complete the square: the linear term shifts the quadratic's centers
  const VectorXd center_y = ybar_i + q_y;
  const VectorXd center_xi = q_xi / gamma;

  // ball radii from the exactly feasible affine slice
  const VectorXd yhat = feasible.y.segment(base, nbar);
  const VectorXd xihat = feasible.xi.segment(base * n, nbar * n);
  const double Bsq = (yhat - center_y).squaredNorm() +
                     gamma * (xihat - center_xi).squaredNorm();
  const double Bbar = std::max(std::sqrt(Bsq), 1e-8);
  const double Bbar_y = Bbar;
  const double Bbar_xi = Bbar / std::sqrt(gamma);

  WithinBlockRows rows(ops, block);
  AlccResult result = alcc_core(
      rows, center_y, center_xi, gamma, Bbar_y, Bbar_xi,
      sigmas.sigma_A1[static_cast<size_t>(block)],
      sigmas.sigma_A2[static_cast<size_t>(block)], cfg, target_subopt, warm_y,
      warm_xi);

  // block objective in the dual-decomposition sense (contribution to g_gamma)
  result.objective = 0.5 * (result.point.y - ybar_i).squaredNorm() +
                     0.5 * gamma * result.point.xi.squaredNorm() -
                     q_y.dot(result.point.y) - q_xi.dot(result.point.xi);
  return result;
}

}  // namespace cvxreg
