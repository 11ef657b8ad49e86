#pragma once

#include <optional>
#include <vector>

#include "flocksim/core.hpp"

// Shape-error evaluation: optimal translation + proper-rotation alignment of
// the live formation against the target, plus convergence diagnostics.

namespace flocksim {

// Column-major-free tiny 2x2 matrix, enough for rotations and covariances.
struct Mat2 {
  double a = 1.0, b = 0.0;  // [a b]
  double c = 0.0, d = 1.0;  // [c d]

  static Mat2 identity() { return {}; }
  static Mat2 rotation(double angle);

  Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  Mat2 transpose() const { return {a, c, b, d}; }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  double det() const { return a * d - b * c; }
};

struct AlignmentResult {
  Mat2 rotation;                    // proper rotation applied to centered actual points
  Vec2 actual_centroid{};
  Vec2 target_centroid{};
  std::vector<Vec2> aligned_points; // rotation * (actual - actual_centroid)
  double error_mean_dist = 0.0;     // (1/N) sum of residual distances
  double error_mean_sq = 0.0;       // (1/N) squared Frobenius residual
  bool reflection_corrected = false;
};

// Orthogonal Procrustes restricted to proper rotations. Centers both sets,
// solves for the rotation via SVD of the cross-covariance, and flips the
// last singular direction when the raw optimum is a reflection. Coincident
// point sets short-circuit to the identity rotation. Throws ContractError
// on length mismatch or fewer than two points.
AlignmentResult procrustes_align(const std::vector<Vec2>& actual,
                                 const std::vector<Vec2>& target);

// Greedy correspondence for runs without consistent goal indices: repeatedly
// match the globally nearest unmatched (actual, target) pair. Returns perm
// with perm[i] = target index matched to actual point i.
std::vector<int> point_correspondence(const std::vector<Vec2>& actual,
                                      const std::vector<Vec2>& target);

// Fraction of the team inside the largest plan-equal class.
double plan_agreement(const std::vector<RobotState>& states);

// First round r with curve[k] <= epsilon for every k in [r, r + window);
// nullopt when no such window exists.
std::optional<int> converged(const std::vector<double>& error_curve, double epsilon,
                             int window);

}  // namespace flocksim
