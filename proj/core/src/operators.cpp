#include "cvxreg/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "cvxreg/rng.hpp"

namespace cvxreg {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

ProblemOps::ProblemOps(const Dataset& data, const Partition& part)
    : data_(&data), part_(part), idx_(RowIndexing::from(part)) {
  require(part.N() == data.N(), "operators: partition does not cover dataset");
}

void ProblemOps::apply_A1(const VectorXd& y, VectorXd& out) const {
  const Index N = data_->N();
  require(y.size() == N, "apply_A1: dimension mismatch");
  out.resize(idx_.rows_total());
  Index r = 0;
  for (Index l1 = 0; l1 < N; ++l1) {
    const double y1 = y(l1);
    for (Index l2 = 0; l2 < N; ++l2) {
      if (l1 == l2) continue;
      out(r++) = y1 - y(l2);
    }
  }
}

void ProblemOps::apply_A1_T(const VectorXd& z, VectorXd& out) const {
  const Index N = data_->N();
  require(z.size() == idx_.rows_total(), "apply_A1_T: dimension mismatch");
  out.setZero(N);
  Index r = 0;
  for (Index l1 = 0; l1 < N; ++l1) {
    for (Index l2 = 0; l2 < N; ++l2) {
      if (l1 == l2) continue;
      const double zr = z(r++);
      out(l1) += zr;
      out(l2) -= zr;
    }
  }
}

void ProblemOps::apply_A2(const VectorXd& xi, VectorXd& out) const {
  const Index N = data_->N();
  const Index n = data_->n();
  require(xi.size() == N * n, "apply_A2: dimension mismatch");
  out.resize(idx_.rows_total());
  const MatrixXd& X = data_->xs;
  Index r = 0;
  for (Index l1 = 0; l1 < N; ++l1) {
    for (Index l2 = 0; l2 < N; ++l2) {
      if (l1 == l2) continue;
      double acc = 0;
      const double* xi2 = xi.data() + l2 * n;
      for (Index j = 0; j < n; ++j) acc += xi2[j] * (X(l1, j) - X(l2, j));
      out(r++) = -acc;
    }
  }
}

void ProblemOps::apply_A2_T(const VectorXd& z, VectorXd& out) const {
  const Index N = data_->N();
  const Index n = data_->n();
  require(z.size() == idx_.rows_total(), "apply_A2_T: dimension mismatch");
  out.setZero(N * n);
  const MatrixXd& X = data_->xs;
  Index r = 0;
  for (Index l1 = 0; l1 < N; ++l1) {
    for (Index l2 = 0; l2 < N; ++l2) {
      if (l1 == l2) continue;
      const double zr = z(r++);
      double* o2 = out.data() + l2 * n;
      for (Index j = 0; j < n; ++j) o2[j] -= zr * (X(l1, j) - X(l2, j));
    }
  }
}

void ProblemOps::apply_rows(const VectorXd& y, const VectorXd& xi,
                            VectorXd& out) const {
  const Index N = data_->N();
  const Index n = data_->n();
  require(y.size() == N && xi.size() == N * n, "apply_rows: dimension mismatch");
  out.resize(idx_.rows_total());
  const MatrixXd& X = data_->xs;
  Index r = 0;
  for (Index l1 = 0; l1 < N; ++l1) {
    const double y1 = y(l1);
    for (Index l2 = 0; l2 < N; ++l2) {
      if (l1 == l2) continue;
      double acc = y1 - y(l2);
      const double* xi2 = xi.data() + l2 * n;
      for (Index j = 0; j < n; ++j) acc -= xi2[j] * (X(l1, j) - X(l2, j));
      out(r++) = acc;
    }
  }
}

void ProblemOps::rows_adjoint(const VectorXd& z, VectorXd& out_y,
                              VectorXd& out_xi) const {
  const Index N = data_->N();
  const Index n = data_->n();
  require(z.size() == idx_.rows_total(), "rows_adjoint: dimension mismatch");
  out_y.setZero(N);
  out_xi.setZero(N * n);
  const MatrixXd& X = data_->xs;
  Index r = 0;
  for (Index l1 = 0; l1 < N; ++l1) {
    for (Index l2 = 0; l2 < N; ++l2) {
      if (l1 == l2) continue;
      const double zr = z(r++);
      out_y(l1) += zr;
      out_y(l2) -= zr;
      double* o2 = out_xi.data() + l2 * n;
      for (Index j = 0; j < n; ++j) o2[j] -= zr * (X(l1, j) - X(l2, j));
    }
  }
}

void ProblemOps::apply_C(const VectorXd& y, const VectorXd& xi,
                         VectorXd& out) const {
  const Index N = data_->N();
  const Index n = data_->n();
  const Index nbar = part_.nbar;
  require(y.size() == N && xi.size() == N * n, "apply_C: dimension mismatch");
  out.resize(idx_.rows_C());
  const MatrixXd& X = data_->xs;
  Index r = 0;
  for (Index i = 0; i < part_.K; ++i) {
    for (Index j = 0; j < part_.K; ++j) {
      if (i == j) continue;
      for (Index l1 = i * nbar; l1 < (i + 1) * nbar; ++l1) {
        const double y1 = y(l1);
        for (Index l2 = j * nbar; l2 < (j + 1) * nbar; ++l2) {
          double acc = y1 - y(l2);
          const double* xi2 = xi.data() + l2 * n;
          for (Index jj = 0; jj < n; ++jj)
            acc -= xi2[jj] * (X(l1, jj) - X(l2, jj));
          out(r++) = acc;
        }
      }
    }
  }
  out.segment(idx_.rows_cross(), N) = y;
}

void ProblemOps::apply_C_T(const VectorXd& theta, VectorXd& out_y,
                           VectorXd& out_xi) const {
  const Index N = data_->N();
  const Index n = data_->n();
  const Index nbar = part_.nbar;
  require(theta.size() == idx_.rows_C(), "apply_C_T: dimension mismatch");
  out_y = theta.segment(idx_.rows_cross(), N);  // identity block
  out_xi.setZero(N * n);
  const MatrixXd& X = data_->xs;
  Index r = 0;
  for (Index i = 0; i < part_.K; ++i) {
    for (Index j = 0; j < part_.K; ++j) {
      if (i == j) continue;
      for (Index l1 = i * nbar; l1 < (i + 1) * nbar; ++l1) {
        for (Index l2 = j * nbar; l2 < (j + 1) * nbar; ++l2) {
          const double tr = theta(r++);
          out_y(l1) += tr;
          out_y(l2) -= tr;
          double* o2 = out_xi.data() + l2 * n;
          for (Index jj = 0; jj < n; ++jj)
            o2[jj] -= tr * (X(l1, jj) - X(l2, jj));
        }
      }
    }
  }
}

void ProblemOps::apply_within(Index i, const VectorXd& y_i,
                              const VectorXd& xi_i, VectorXd& out) const {
  const Index n = data_->n();
  const Index nbar = part_.nbar;
  require(i >= 0 && i < part_.K, "apply_within: bad block index");
  require(y_i.size() == nbar && xi_i.size() == nbar * n,
          "apply_within: dimension mismatch");
  out.resize(idx_.rows_within_per_block());
  const MatrixXd& X = data_->xs;
  const Index base = i * nbar;
  Index r = 0;
  for (Index a = 0; a < nbar; ++a) {
    const double ya = y_i(a);
    for (Index b = 0; b < nbar; ++b) {
      if (a == b) continue;
      double acc = ya - y_i(b);
      const double* xib = xi_i.data() + b * n;
      for (Index j = 0; j < n; ++j)
        acc -= xib[j] * (X(base + a, j) - X(base + b, j));
      out(r++) = acc;
    }
  }
}

void ProblemOps::within_adjoint(Index i, const VectorXd& z, VectorXd& out_y,
                                VectorXd& out_xi) const {
  const Index n = data_->n();
  const Index nbar = part_.nbar;
  require(i >= 0 && i < part_.K, "within_adjoint: bad block index");
  require(z.size() == idx_.rows_within_per_block(),
          "within_adjoint: dimension mismatch");
  out_y.setZero(nbar);
  out_xi.setZero(nbar * n);
  const MatrixXd& X = data_->xs;
  const Index base = i * nbar;
  Index r = 0;
  for (Index a = 0; a < nbar; ++a) {
    for (Index b = 0; b < nbar; ++b) {
      if (a == b) continue;
      const double zr = z(r++);
      out_y(a) += zr;
      out_y(b) -= zr;
      double* ob = out_xi.data() + b * n;
      for (Index j = 0; j < n; ++j)
        ob[j] -= zr * (X(base + a, j) - X(base + b, j));
    }
  }
}

void ProblemOps::apply_within_A1(Index i, const VectorXd& y_i,
                                 VectorXd& out) const {
  (void)i;
  const Index nbar = part_.nbar;
  require(y_i.size() == nbar, "apply_within_A1: dimension mismatch");
  out.resize(idx_.rows_within_per_block());
  Index r = 0;
  for (Index a = 0; a < nbar; ++a)
    for (Index b = 0; b < nbar; ++b) {
      if (a == b) continue;
      out(r++) = y_i(a) - y_i(b);
    }
}

void ProblemOps::within_A1_adjoint(Index i, const VectorXd& z,
                                   VectorXd& out) const {
  const Index nbar = part_.nbar;
  require(z.size() == idx_.rows_within_per_block(),
          "within_A1_adjoint: dimension mismatch");
  out.setZero(nbar);
  Index r = 0;
  for (Index a = 0; a < nbar; ++a)
    for (Index b = 0; b < nbar; ++b) {
      if (a == b) continue;
      const double zr = z(r++);
      out(a) += zr;
      out(b) -= zr;
    }
  (void)i;
}

void ProblemOps::apply_within_A2(Index i, const VectorXd& xi_i,
                                 VectorXd& out) const {
  const Index n = data_->n();
  const Index nbar = part_.nbar;
  require(xi_i.size() == nbar * n, "apply_within_A2: dimension mismatch");
  out.resize(idx_.rows_within_per_block());
  const MatrixXd& X = data_->xs;
  const Index base = i * nbar;
  Index r = 0;
  for (Index a = 0; a < nbar; ++a)
    for (Index b = 0; b < nbar; ++b) {
      if (a == b) continue;
      double acc = 0;
      const double* xib = xi_i.data() + b * n;
      for (Index j = 0; j < n; ++j)
        acc += xib[j] * (X(base + a, j) - X(base + b, j));
      out(r++) = -acc;
    }
}

void ProblemOps::within_A2_adjoint(Index i, const VectorXd& z,
                                   VectorXd& out) const {
  const Index n = data_->n();
  const Index nbar = part_.nbar;
  require(z.size() == idx_.rows_within_per_block(),
          "within_A2_adjoint: dimension mismatch");
  out.setZero(nbar * n);
  const MatrixXd& X = data_->xs;
  const Index base = i * nbar;
  Index r = 0;
  for (Index a = 0; a < nbar; ++a)
    for (Index b = 0; b < nbar; ++b) {
      if (a == b) continue;
      const double zr = z(r++);
      double* ob = out.data() + b * n;
      for (Index j = 0; j < n; ++j)
        ob[j] -= zr * (X(base + a, j) - X(base + b, j));
    }
}

SigmaEstimate estimate_sigma_max(const LinearOperatorRef& op, double tol,
                                 int max_iters) {
  SigmaEstimate est;
  if (op.rows == 0 || op.cols == 0) {
    est.sigma = 0;
    return est;
  }
  // fixed seeded start so the estimate is identical across runs and machines
  Xoshiro256pp gen = rng_stream(0x5eedu, 97);
  VectorXd v(op.cols);
  for (Index k = 0; k < op.cols; ++k) v(k) = gen.normal();
  v.normalize();

  VectorXd w(op.rows), u(op.cols);
  double lambda_prev = 0;
  for (int it = 1; it <= max_iters; ++it) {
    op.forward(v, w);
    const double lambda = w.squaredNorm();  // Rayleigh quotient of op^T op
    op.adjoint(w, u);
    const double norm_u = u.norm();
    if (norm_u == 0 || lambda == 0) {
      est.sigma = 0;
      est.iters = it;
      return est;
    }
    v = u / norm_u;
    est.iters = it;
    if (it > 1 && std::abs(lambda - lambda_prev) <= tol * lambda) {
      est.sigma = std::sqrt(lambda) * 1.01;
      est.converged = true;
      return est;
    }
    lambda_prev = lambda;
  }
  est.sigma = std::sqrt(lambda_prev) * 1.10;
  est.converged = false;
  return est;
}

LinearOperatorRef op_A1(const ProblemOps& ops) {
  return {ops.indexing().rows_total(), ops.data().N(),
          [&ops](const VectorXd& v, VectorXd& out) { ops.apply_A1(v, out); },
          [&ops](const VectorXd& v, VectorXd& out) { ops.apply_A1_T(v, out); }};
}

LinearOperatorRef op_A2(const ProblemOps& ops) {
  return {ops.indexing().rows_total(), ops.data().N() * ops.data().n(),
          [&ops](const VectorXd& v, VectorXd& out) { ops.apply_A2(v, out); },
          [&ops](const VectorXd& v, VectorXd& out) { ops.apply_A2_T(v, out); }};
}

LinearOperatorRef op_C(const ProblemOps& ops) {
  const Index N = ops.data().N();
  const Index n = ops.data().n();
  return {ops.indexing().rows_C(), N * (n + 1),
          [&ops, N, n](const VectorXd& v, VectorXd& out) {
            VectorXd y = v.head(N);
            VectorXd xi = v.tail(N * n);
            ops.apply_C(y, xi, out);
          },
          [&ops, N, n](const VectorXd& v, VectorXd& out) {
            VectorXd oy, oxi;
            ops.apply_C_T(v, oy, oxi);
            out.resize(N * (n + 1));
            out.head(N) = oy;
            out.tail(N * n) = oxi;
          }};
}

LinearOperatorRef op_within_A1(const ProblemOps& ops, Index block) {
  return {ops.indexing().rows_within_per_block(), ops.partition().nbar,
          [&ops, block](const VectorXd& v, VectorXd& out) {
            ops.apply_within_A1(block, v, out);
          },
          [&ops, block](const VectorXd& v, VectorXd& out) {
            ops.within_A1_adjoint(block, v, out);
          }};
}

LinearOperatorRef op_within_A2(const ProblemOps& ops, Index block) {
  return {ops.indexing().rows_within_per_block(),
          ops.partition().nbar * ops.data().n(),
          [&ops, block](const VectorXd& v, VectorXd& out) {
            ops.apply_within_A2(block, v, out);
          },
          [&ops, block](const VectorXd& v, VectorXd& out) {
            ops.within_A2_adjoint(block, v, out);
          }};
}

}  // namespace cvxreg
