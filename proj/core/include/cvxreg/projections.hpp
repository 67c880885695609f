#pragma once
#include "cvxreg/types.hpp"

namespace cvxreg {

/// Projection onto {v >= 0, ||v||_2 <= radius}: radial scaling of the cone
/// projection (exact for the intersection of the nonnegative orthant with an
/// origin-centered ball).
inline void project_nonneg_ball_inplace(VectorXd& v, double radius) {
  v = v.cwiseMax(0.0);
  const double norm = v.norm();
  if (norm > radius) v *= radius / norm;
}

inline VectorXd project_nonneg_ball(const VectorXd& v, double radius) {
  VectorXd out = v;
  project_nonneg_ball_inplace(out, radius);
  return out;
}

inline void project_ball_inplace(VectorXd& v, const VectorXd& center,
                                 double radius) {
  const double dist = (v - center).norm();
  if (dist > radius) v = center + (radius / dist) * (v - center);
}

inline VectorXd project_ball(const VectorXd& v, const VectorXd& center,
                             double radius) {
  VectorXd out = v;
  project_ball_inplace(out, center, radius);
  return out;
}

/// Ball projection around the origin (the xi-ball of the inner solver).
inline void project_origin_ball_inplace(VectorXd& v, double radius) {
  const double norm = v.norm();
  if (norm > radius) v *= radius / norm;
}

}  // namespace cvxreg
