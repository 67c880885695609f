#include "cvxreg/papg.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "cvxreg/projections.hpp"

namespace cvxreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double cpu_seconds() {
  return static_cast<double>(std::clock()) / CLOCKS_PER_SEC;
}

/// Runs fn(block) for every block on `workers` threads. Tasks are
/// independent and write only their own slots, so the result does not depend
/// on the worker count or on scheduling.
void parallel_blocks(Index K, int workers,
                     const std::function<void(Index)>& fn) {
  if (workers <= 1 || K <= 1) {
    for (Index i = 0; i < K; ++i) fn(i);
    return;
  }
  const int pool = static_cast<int>(std::min<Index>(workers, K));
  std::atomic<Index> next{0};
  std::vector<std::thread> threads;
  std::exception_ptr error;
  std::mutex error_mutex;
  threads.reserve(static_cast<size_t>(pool));
  for (int w = 0; w < pool; ++w) {
    threads.emplace_back([&]() {
      for (;;) {
        const Index i = next.fetch_add(1);
        if (i >= K) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

DualDecomposition::DualDecomposition(const ProblemOps& ops,
                                     const PreparedProblem& prep,
                                     const PapgConfig& cfg)
    : ops_(&ops), prep_(&prep), cfg_(cfg) {
  sigmas_ = estimate_block_sigmas(ops);
  sigma_C_ = estimate_sigma_max(op_C(ops)).sigma;
  workers_ = cfg.workers > 0
                 ? cfg.workers
                 : static_cast<int>(std::thread::hardware_concurrency());
  if (workers_ < 1) workers_ = 1;
  reset_warm_starts();
}

void DualDecomposition::reset_warm_starts() {
  const Index K = ops_->partition().K;
  const Index nbar = ops_->partition().nbar;
  const Index n = ops_->data().n();
  warm_y_.assign(static_cast<size_t>(K), VectorXd());
  warm_xi_.assign(static_cast<size_t>(K), VectorXd());
  for (Index i = 0; i < K; ++i) {
    warm_y_[static_cast<size_t>(i)] = prep_->feasible.y.segment(i * nbar, nbar);
    warm_xi_[static_cast<size_t>(i)] =
        prep_->feasible.xi.segment(i * nbar * n, nbar * n);
  }
}

DualGradientResult DualDecomposition::dual_gradient(const VectorXd& theta,
                                                    double inner_tol) {
  const Index N = ops_->data().N();
  const Index n = ops_->data().n();
  const Index K = ops_->partition().K;
  const Index nbar = ops_->partition().nbar;

  VectorXd q_y, q_xi;
  ops_->apply_C_T(theta, q_y, q_xi);

  DualGradientResult result;
  result.eta.y.resize(N);
  result.eta.xi.resize(N * n);

  std::vector<double> block_obj(static_cast<size_t>(K), 0.0);
  std::vector<double> block_infeas_sq(static_cast<size_t>(K), 0.0);
  std::vector<Index> block_iters(static_cast<size_t>(K), 0);

  parallel_blocks(K, workers_, [&](Index i) {
    const auto ui = static_cast<size_t>(i);
    AlccResult block = alcc_solve_block(
        *ops_, i, prep_->data.ys, q_y.segment(i * nbar, nbar),
        q_xi.segment(i * nbar * n, nbar * n), cfg_.gamma, prep_->feasible,
        inner_tol, cfg_.inner, warm_y_[ui], warm_xi_[ui], sigmas_);
    result.eta.y.segment(i * nbar, nbar) = block.point.y;
    result.eta.xi.segment(i * nbar * n, nbar * n) = block.point.xi;
    block_obj[ui] = block.objective;
    block_infeas_sq[ui] = block.infeas_raw * block.infeas_raw;
    block_iters[ui] = block.mapg_iters_total;
    warm_y_[ui] = block.point.y;
    warm_xi_[ui] = block.point.xi;
  });

  // gather in block order, independent of completion order
  double infeas_sq = 0;
  for (Index i = 0; i < K; ++i) {
    result.g_value += block_obj[static_cast<size_t>(i)];
    infeas_sq += block_infeas_sq[static_cast<size_t>(i)];
    result.inner_iters += block_iters[static_cast<size_t>(i)];
  }
  result.within_infeas_raw = std::sqrt(infeas_sq);
  ops_->apply_C(result.eta.y, result.eta.xi, result.C_eta);
  return result;
}

namespace {

PapgResult dual_ascent_loop(const ProblemOps& ops, const PreparedProblem& prep,
                            const PapgConfig& cfg, const VectorXd* theta0,
                            bool use_momentum) {
  const auto start = Clock::now();
  const double cpu_start = cpu_seconds();
  const Index N = ops.data().N();
  const Index rows_total = ops.indexing().rows_total();
  const Index rows_cross = ops.indexing().rows_cross();
  const double infeas_div = std::sqrt(static_cast<double>(rows_total));
  const double gap_div = static_cast<double>(rows_total);

  DualDecomposition decomp(ops, prep, cfg);
  const double L_g = decomp.L_g();
  double B_theta =
      cfg.B_theta > 0 ? cfg.B_theta : 10.0 * std::sqrt(static_cast<double>(N));

  PapgResult result;
  result.sigma_C = decomp.sigma_C();
  result.L_g = L_g;
  result.report.reason = TermReason::iter_budget;

  const Index dim = decomp.theta_dim();
  VectorXd theta1 = VectorXd::Zero(dim);
  if (theta0) {
    if (theta0->size() != dim)
      throw std::invalid_argument("papg: warm-start theta has wrong size");
    theta1 = *theta0;
    project_nonneg_ball_inplace(theta1, B_theta);
  }
  VectorXd theta1_prev = theta1;
  VectorXd theta2 = theta1;
  double t = 1.0;

  // certified upper bound on the dual optimum, tracked over the trajectory
  double g_star_upper = std::numeric_limits<double>::infinity();
  const auto K = ops.partition().K;

  Index ell = 0;
  int restarts = 0;
  VectorXd cross_neg;
  while (true) {
    ++ell;
    const double inv3 =
        1.0 / (static_cast<double>(ell) * static_cast<double>(ell) *
               static_cast<double>(ell));
    const double inner_tol = std::min(cfg.inner_tol_floor, inv3);

    DualGradientResult dg = decomp.dual_gradient(theta2, inner_tol);
    if (!dg.C_eta.allFinite())
      throw std::runtime_error("papg: non-finite dual gradient");

    theta1_prev.swap(theta1);
    theta1 = theta2 - dg.C_eta / L_g;
    project_nonneg_ball_inplace(theta1, B_theta);

    // linearization bound: g* <= g(theta2) + max_{q in Q2} <grad, q - theta2>
    const double cross_infeas =
        rows_cross > 0
            ? (-dg.C_eta.head(rows_cross)).cwiseMax(0.0).norm()
            : 0.0;
    const double fw = B_theta * (-dg.C_eta).cwiseMax(0.0).norm() +
                      theta2.dot(dg.C_eta);
    const double cushion = 2.0 * inner_tol * static_cast<double>(K);
    g_star_upper = std::min(g_star_upper, dg.g_value + fw + cushion);

    // the k-th gap pairs eta_k with the k-th dual iterate: theta^(1) under
    // momentum, the evaluation point itself for plain ascent
    const double gap_raw = (use_momentum ? theta1 : theta2).dot(dg.C_eta);
    const double infeas_raw =
        std::sqrt(dg.within_infeas_raw * dg.within_infeas_raw +
                  cross_infeas * cross_infeas);
    const double gap_norm = gap_raw / gap_div;
    const double infeas_norm = infeas_raw / infeas_div;

    if (cfg.record_history) {
      MetricsSnapshot snap;
      snap.iter = ell;
      snap.objective = 0.5 * (dg.eta.y - prep.data.ys).squaredNorm();
      snap.reg_objective =
          snap.objective + 0.5 * cfg.gamma * dg.eta.xi.squaredNorm();
      snap.infeas_raw = infeas_raw;
      snap.infeas_norm = infeas_norm;
      snap.gap_raw = gap_raw;
      snap.gap_norm = gap_norm;
      snap.wall_time_s = seconds_since(start);
      result.report.history.push_back(snap);
    }
    result.report.iters = ell;

    bool stop = false;
    if (std::abs(gap_norm) <= cfg.gap_norm_tol &&
        infeas_norm <= cfg.infeas_norm_tol) {
      result.report.reason = TermReason::thresholds;
      stop = true;
    } else if (ell >= cfg.max_iters) {
      result.report.reason = TermReason::iter_budget;
      stop = true;
    } else if (seconds_since(start) > cfg.max_seconds) {
      result.report.reason = TermReason::time_budget;
      stop = true;
    }

    if (stop) {
      // adaptive radius: a saturated dual norm means Q2 clipped the optimum
      const bool saturated = theta1.norm() > 0.99 * B_theta;
      if (saturated && cfg.adaptive_B_theta &&
          result.report.reason == TermReason::thresholds &&
          restarts < cfg.max_restarts) {
        B_theta *= 2.0;
        ++restarts;
        theta2 = theta1;
        theta1_prev = theta1;
        t = 1.0;
        g_star_upper = std::numeric_limits<double>::infinity();
        continue;
      }
      result.report.saturated = saturated;
      break;
    }

    if (use_momentum) {
      const double t_next = momentum_next(t);
      theta2 = theta1 + ((t - 1.0) / t_next) * (theta1 - theta1_prev);
      t = t_next;
    } else {
      theta2 = theta1;
    }
  }

  // report the primal response at the final theta^(1)
  const double final_tol = std::min(
      cfg.final_resolve_tol,
      std::min(cfg.inner_tol_floor,
               1.0 / std::pow(static_cast<double>(ell), 3.0)));
  DualGradientResult final_dg = decomp.dual_gradient(theta1, final_tol);
  result.point = final_dg.eta;
  result.g_final = final_dg.g_value;
  result.delta_estimate =
      std::max(0.0, g_star_upper - (final_dg.g_value -
                                    2.0 * final_tol * static_cast<double>(K)));
  result.dual.theta_cross = theta1.head(rows_cross);
  result.dual.theta_pos = theta1.tail(N);
  result.B_theta = B_theta;
  result.report.restarts = restarts;
  result.report.wall_seconds = seconds_since(start);
  result.report.cpu_seconds = cpu_seconds() - cpu_start;
  return result;
}

}  // namespace

PapgResult papg_solve(const ProblemOps& ops, const PreparedProblem& prep,
                      const PapgConfig& cfg, const VectorXd* theta0) {
  return dual_ascent_loop(ops, prep, cfg, theta0, /*use_momentum=*/true);
}

PapgResult dual_gradient_ascent(const ProblemOps& ops,
                                const PreparedProblem& prep,
                                const PapgConfig& cfg, const VectorXd* theta0) {
  return dual_ascent_loop(ops, prep, cfg, theta0, /*use_momentum=*/false);
}

std::pair<double, double> certificate_for_iterate(double gamma, double delta,
                                                  double B_xi_estimate,
                                                  double sigma_max_C) {
  const double spread = std::sqrt(2.0 * std::max(delta, 0.0) / gamma) * sigma_max_C;
  return {B_xi_estimate * std::sqrt(gamma) + spread, spread};
}

}  // namespace cvxreg
