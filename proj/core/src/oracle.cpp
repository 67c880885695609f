#include "cvxreg/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cvxreg/indexing.hpp"

namespace cvxreg {

namespace {

constexpr Index kDenseGuardrail = 64;

void check_guardrail(Index N) {
  if (N > kDenseGuardrail)
    throw std::invalid_argument(
        "dense reference path refuses N > 64 (memory guardrail)");
}

}  // namespace

ExplicitMatrices explicit_matrices(const Dataset& data, const Partition& part) {
  const Index N = data.N();
  const Index n = data.n();
  check_guardrail(N);
  if (part.N() != N)
    throw std::invalid_argument("explicit_matrices: partition mismatch");
  const RowIndexing idx = RowIndexing::from(part);

  ExplicitMatrices m;
  m.A1.setZero(idx.rows_total(), N);
  m.A2.setZero(idx.rows_total(), N * n);
  {
    Index r = 0;
    for (Index l1 = 0; l1 < N; ++l1)
      for (Index l2 = 0; l2 < N; ++l2) {
        if (l1 == l2) continue;
        m.A1(r, l1) = 1.0;
        m.A1(r, l2) = -1.0;
        m.A2.block(r, l2 * n, 1, n) = -(data.xs.row(l1) - data.xs.row(l2));
        ++r;
      }
  }
  m.A3.setZero(idx.rows_cross(), N);
  m.A4.setZero(idx.rows_cross(), N * n);
  {
    Index r = 0;
    const Index nbar = part.nbar;
    for (Index i = 0; i < part.K; ++i)
      for (Index j = 0; j < part.K; ++j) {
        if (i == j) continue;
        for (Index l1 = i * nbar; l1 < (i + 1) * nbar; ++l1)
          for (Index l2 = j * nbar; l2 < (j + 1) * nbar; ++l2) {
            m.A3(r, l1) = 1.0;
            m.A3(r, l2) = -1.0;
            m.A4.block(r, l2 * n, 1, n) = -(data.xs.row(l1) - data.xs.row(l2));
            ++r;
          }
      }
  }
  m.C.setZero(idx.rows_C(), N * (n + 1));
  m.C.topLeftCorner(idx.rows_cross(), N) = m.A3;
  m.C.topRightCorner(idx.rows_cross(), N * n) = m.A4;
  m.C.bottomLeftCorner(N, N) = MatrixXd::Identity(N, N);
  return m;
}

namespace {

/// Equality-constrained KKT solve on the active rows; returns false when the
/// polished point fails verification (wrong active set).
bool polish(const MatrixXd& G, const VectorXd& H_diag, const VectorXd& h,
            const std::vector<Index>& active, VectorXd& z, VectorXd& lambda) {
  const Index d = G.cols();
  const Index a = static_cast<Index>(active.size());
  MatrixXd kkt = MatrixXd::Zero(d + a, d + a);
  kkt.topLeftCorner(d, d) = H_diag.asDiagonal();
  for (Index k = 0; k < a; ++k) {
    kkt.block(k + d, 0, 1, d) = G.row(active[static_cast<size_t>(k)]);
    kkt.block(0, k + d, d, 1) =
        G.row(active[static_cast<size_t>(k)]).transpose();
  }
  VectorXd rhs = VectorXd::Zero(d + a);
  rhs.head(d) = h;
  const VectorXd sol = kkt.colPivHouseholderQr().solve(rhs);
  if (!sol.allFinite()) return false;

  const VectorXd z_new = sol.head(d);
  const VectorXd lam_active = -sol.tail(a);
  const VectorXd slack = G * z_new;

  const double feas_tol = 1e-9 * (1.0 + z_new.cwiseAbs().maxCoeff());
  if (slack.minCoeff() < -feas_tol) return false;
  if (a > 0 && lam_active.minCoeff() < -1e-7) return false;

  z = z_new;
  lambda.setZero(G.rows());
  for (Index k = 0; k < a; ++k)
    lambda(active[static_cast<size_t>(k)]) = std::max(lam_active(k), 0.0);
  return true;
}

}  // namespace

OracleSolution oracle_solve_full(const Dataset& data, double gamma,
                                 double tol) {
  check_guardrail(data.N());
  if (gamma <= 0) throw std::invalid_argument("oracle: gamma must be > 0");
  const Index N = data.N();
  const Index n = data.n();
  const Index d = N * (n + 1);

  const ExplicitMatrices mats =
      explicit_matrices(data, Partition{1, N});  // row set only; K irrelevant
  MatrixXd G(mats.A1.rows(), d);
  G << mats.A1, mats.A2;
  const Index m = G.rows();

  VectorXd H_diag(d);
  H_diag.head(N).setOnes();
  H_diag.tail(N * n).setConstant(gamma);
  VectorXd h = VectorXd::Zero(d);
  h.head(N) = data.ys;

  // strictly feasible start from the 1/2|x|^2 interpolant
  VectorXd z(d);
  for (Index l = 0; l < N; ++l) {
    z(l) = 0.5 * data.xs.row(l).squaredNorm();
    z.segment(N + l * n, n) = data.xs.row(l).transpose();
  }
  VectorXd s = (G * z).cwiseMax(1.0);
  VectorXd lambda = VectorXd::Ones(m);

  const double obj_scale = 1.0 + std::abs(0.5 * data.ys.squaredNorm());
  OracleSolution result;

  MatrixXd M(d, d);
  VectorXd dz(d), ds(m), dlam(m), rd(d), rp(m), rc(m);
  for (int it = 1; it <= 120; ++it) {
    double mu = s.dot(lambda) / static_cast<double>(m);
    rd = H_diag.asDiagonal() * z - h - G.transpose() * lambda;
    rp = G * z - s;
    result.mu_final = mu;
    result.iters = it;

    const double relgap = mu * static_cast<double>(m) / obj_scale;
    if (relgap <= tol && rd.cwiseAbs().maxCoeff() <= std::sqrt(tol) &&
        rp.cwiseAbs().maxCoeff() <= std::sqrt(tol))
      break;

    const VectorXd Dv = lambda.cwiseQuotient(s);
    M = H_diag.asDiagonal();
    M.noalias() += G.transpose() * Dv.asDiagonal() * G;
    Eigen::LDLT<MatrixXd> ldlt(M);
    if (ldlt.info() != Eigen::Success) break;

    // affine scaling direction
    rc = s.cwiseProduct(lambda);
    VectorXd rhs = -rd - G.transpose() * (Dv.cwiseProduct(rp) +
                                          rc.cwiseQuotient(s));
    dz = ldlt.solve(rhs);
    ds = G * dz + rp;
    dlam = -(rc + lambda.cwiseProduct(ds)).cwiseQuotient(s);

    auto max_step = [](const VectorXd& v, const VectorXd& dv) {
      double alpha = 1.0;
      for (Index i = 0; i < v.size(); ++i)
        if (dv(i) < 0) alpha = std::min(alpha, -v(i) / dv(i));
      return alpha;
    };
    const double ap = max_step(s, ds);
    const double ad = max_step(lambda, dlam);
    const double mu_aff = (s + ap * ds).dot(lambda + ad * dlam) /
                          static_cast<double>(m);
    const double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);

    // corrector
    rc = s.cwiseProduct(lambda) + ds.cwiseProduct(dlam) -
         VectorXd::Constant(m, sigma * mu);
    rhs = -rd - G.transpose() * (Dv.cwiseProduct(rp) + rc.cwiseQuotient(s));
    dz = ldlt.solve(rhs);
    ds = G * dz + rp;
    dlam = -(rc + lambda.cwiseProduct(ds)).cwiseQuotient(s);

    const double alpha =
        0.995 * std::min(max_step(s, ds), max_step(lambda, dlam));
    if (alpha < 1e-13) break;  // numerical stall; keep the best iterate
    z += alpha * dz;
    s += alpha * ds;
    lambda += alpha * dlam;
  }

  // active-set polish: exact KKT solve on the rows the barrier identified
  {
    const VectorXd slack = G * z;
    std::vector<Index> active;
    for (Index i = 0; i < m; ++i)
      if (lambda(i) > slack(i)) active.push_back(i);
    VectorXd z_pol = z, lam_pol = lambda;
    for (int attempt = 0; attempt < 3; ++attempt) {
      if (polish(G, H_diag, h, active, z_pol, lam_pol)) {
        z = z_pol;
        lambda = lam_pol;
        break;
      }
      // drop the weakest active rows and retry once or twice
      if (active.empty()) break;
      std::vector<Index> kept;
      for (Index i : active)
        if (lambda(i) > 1e-8 * (1.0 + lambda.maxCoeff())) kept.push_back(i);
      if (kept.size() == active.size()) break;
      active.swap(kept);
    }
  }

  result.point.y = z.head(N);
  result.point.xi = z.tail(N * n);
  result.multipliers = lambda;
  return result;
}

PrimalPoint oracle_solve(const Dataset& data, double gamma, double tol) {
  return oracle_solve_full(data, gamma, tol).point;
}

double check_A4_rank(const Dataset& data, const Partition& part) {
  check_guardrail(data.N());
  const ExplicitMatrices mats = explicit_matrices(data, part);
  if (mats.A4.rows() == 0) return 0.0;  // K = 1: no cross rows
  Eigen::BDCSVD<MatrixXd> svd(mats.A4);
  return svd.singularValues().minCoeff();
}

}  // namespace cvxreg
