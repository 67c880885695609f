#pragma once
#include <Eigen/Dense>
#include <string>

namespace cvxreg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// N observations (x_l, y_l) in dimension n. This is the only state the
/// implicit constraint operators ever read; no constraint matrix is stored.
struct Dataset {
  MatrixXd xs;  // N x n, row l is x_l
  VectorXd ys;  // length N

  Index N() const { return xs.rows(); }
  Index n() const { return xs.cols(); }
};

/// Throws std::invalid_argument on: N < n+1, non-finite entries, or two
/// identical rows of xs (duplicates make subgradient columns dependent).
void validate_dataset(const Dataset& data);

Dataset load_csv(const std::string& path);
void save_csv(const Dataset& data, const std::string& path);

/// Contiguous equal-size blocks: block i covers [i*nbar, (i+1)*nbar).
struct Partition {
  Index K = 1;
  Index nbar = 0;

  Index N() const { return K * nbar; }
  Index block_of(Index l) const { return l / nbar; }
  Index block_begin(Index i) const { return i * nbar; }
};

/// Requires N divisible by K and N/K >= n+1; throws otherwise.
Partition make_partition(const Dataset& data, Index K);

/// Fitted values and subgradients. xi is stored flat: xi_l lives in
/// xi.segment(l*n, n).
struct PrimalPoint {
  VectorXd y;
  VectorXd xi;
};

/// Multipliers for the rows of C in canonical order: the cross-block segment
/// followed by the y >= 0 segment.
struct DualPoint {
  VectorXd theta_cross;  // length N*(N - nbar)
  VectorXd theta_pos;    // length N
};

struct ProblemBounds {
  double B_theta = 0;  // dual ball radius
  double Bbar_y = 0;   // primal y-ball radius around ybar
  double Bbar_xi = 0;  // primal xi-ball radius around 0
  double gamma = 0;    // Tikhonov weight
};

}  // namespace cvxreg
