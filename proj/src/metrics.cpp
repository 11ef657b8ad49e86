#include "flocksim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flocksim {

Mat2 Mat2::rotation(double angle) {
  const double co = std::cos(angle);
  const double si = std::sin(angle);
  return {co, -si, si, co};
}

namespace {

Vec2 centroid(const std::vector<Vec2>& pts) {
  Vec2 c{};
  for (Vec2 p : pts) c += p;
  return c * (1.0 / static_cast<double>(pts.size()));
}

struct Svd2 {
  Mat2 u;
  double s1 = 0.0, s2 = 0.0;  // s1 >= s2 >= 0
  Mat2 v;
};

// SVD of a 2x2 matrix via the eigen-decomposition of M^T M. V is built as a
// proper rotation; U columns come from M V / sigma, completed orthonormally
// when a singular value vanishes.
Svd2 svd2(const Mat2& m) {
  const Mat2 mtm = m.transpose() * m;
  const double tr = mtm.a + mtm.d;
  const double diff = mtm.a - mtm.d;
  const double off = mtm.b;  // symmetric, == mtm.c
  const double root = std::hypot(diff / 2.0, off);
  const double l1 = tr / 2.0 + root;
  const double l2 = tr / 2.0 - root;

  Vec2 v1;
  if (std::abs(off) > 1e-300) {
    v1 = {off, l1 - mtm.a};
    if (v1.norm() < 1e-300) v1 = {l1 - mtm.d, off};
  } else {
    v1 = (mtm.a >= mtm.d) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  }
  const double n1 = v1.norm();
  v1 = {v1.x / n1, v1.y / n1};
  const Vec2 v2{-v1.y, v1.x};  // perpendicular; det(V) = +1

  Svd2 out;
  out.s1 = std::sqrt(std::max(l1, 0.0));
  out.s2 = std::sqrt(std::max(l2, 0.0));
  out.v = {v1.x, v2.x, v1.y, v2.y};

  Vec2 u1, u2;
  if (out.s1 > 1e-300) {
    const Vec2 mv1 = m.apply(v1);
    u1 = {mv1.x / out.s1, mv1.y / out.s1};
  } else {
    u1 = {1.0, 0.0};
  }
  if (out.s2 > 1e-12 * std::max(out.s1, 1.0)) {
    const Vec2 mv2 = m.apply(v2);
    u2 = {mv2.x / out.s2, mv2.y / out.s2};
    // Re-orthogonalize against u1 to shed rounding drift.
    const double p = dot(u2, u1);
    u2 = {u2.x - p * u1.x, u2.y - p * u1.y};
    const double n2 = u2.norm();
    u2 = (n2 > 1e-300) ? Vec2{u2.x / n2, u2.y / n2} : Vec2{-u1.y, u1.x};
  } else {
    u2 = {-u1.y, u1.x};
  }
  out.u = {u1.x, u2.x, u1.y, u2.y};
  return out;
}

}  // namespace

AlignmentResult procrustes_align(const std::vector<Vec2>& actual,
                                 const std::vector<Vec2>& target) {
  if (actual.size() != target.size())
    throw ContractError("procrustes_align: point sets differ in length");
  if (actual.size() < 2)
    throw ContractError("procrustes_align: need at least two points");
  for (Vec2 p : actual)
    if (!p.finite()) throw ContractError("procrustes_align: non-finite actual point");
  for (Vec2 p : target)
    if (!p.finite()) throw ContractError("procrustes_align: non-finite target point");

  const int n = static_cast<int>(actual.size());
  AlignmentResult res;
  res.actual_centroid = centroid(actual);
  res.target_centroid = centroid(target);

  std::vector<Vec2> xc(n), yc(n);
  double spread = 0.0;
  for (int i = 0; i < n; ++i) {
    xc[i] = actual[i] - res.actual_centroid;
    yc[i] = target[i] - res.target_centroid;
    spread = std::max({spread, xc[i].norm(), yc[i].norm()});
  }

  // Cross-covariance of centered sets: M = sum_i y_i x_i^T.
  Mat2 m{0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    m.a += yc[i].x * xc[i].x;
    m.b += yc[i].x * xc[i].y;
    m.c += yc[i].y * xc[i].x;
    m.d += yc[i].y * xc[i].y;
  }

  const double mnorm = std::sqrt(m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d);
  if (spread < 1e-12 || mnorm < 1e-12 * spread * spread) {
    // Either set collapsed to a point (or the covariance vanished): any
    // rotation is as good as any other, so report identity.
    res.rotation = Mat2::identity();
  } else {
    Svd2 svd = svd2(m);
    Mat2 r = svd.u * svd.v.transpose();
    if (r.det() < 0.0) {
      // Raw optimum is a reflection; flip the last singular direction.
      svd.u.b = -svd.u.b;
      svd.u.d = -svd.u.d;
      r = svd.u * svd.v.transpose();
      res.reflection_corrected = true;
    }
    res.rotation = r;
  }

  res.aligned_points.resize(n);
  double sum_sq = 0.0;
  double sum_dist = 0.0;
  for (int i = 0; i < n; ++i) {
    res.aligned_points[i] = res.rotation.apply(xc[i]);
    const double d = distance(res.aligned_points[i], yc[i]);
    sum_dist += d;
    sum_sq += d * d;
  }
  res.error_mean_dist = sum_dist / n;
  res.error_mean_sq = sum_sq / n;
  return res;
}

std::vector<int> point_correspondence(const std::vector<Vec2>& actual,
                                      const std::vector<Vec2>& target) {
  if (actual.size() != target.size())
    throw ContractError("point_correspondence: point sets differ in length");
  const int n = static_cast<int>(actual.size());
  std::vector<int> perm(n, -1);
  std::vector<bool> actual_used(n, false), target_used(n, false);
  for (int step = 0; step < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int i = 0; i < n; ++i) {
      if (actual_used[i]) continue;
      for (int j = 0; j < n; ++j) {
        if (target_used[j]) continue;
        const double d = distance(actual[i], target[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    perm[bi] = bj;
    actual_used[bi] = true;
    target_used[bj] = true;
  }
  return perm;
}

double plan_agreement(const std::vector<RobotState>& states) {
  if (states.empty()) throw ContractError("plan_agreement: empty state list");
  const int n = static_cast<int>(states.size());
  // Union-find over plan-equal pairs.
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (states[i].plan.size() != states[j].plan.size()) continue;
      if (states[i].plan.size() == 0 || plan_equal(states[i].plan, states[j].plan)) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::vector<int> count(n, 0);
  int largest = 0;
  for (int i = 0; i < n; ++i) largest = std::max(largest, ++count[find(i)]);
  return static_cast<double>(largest) / n;
}

std::optional<int> converged(const std::vector<double>& error_curve, double epsilon,
                             int window) {
  if (!(epsilon > 0.0)) throw ContractError("converged: epsilon must be positive");
  if (window < 1) throw ContractError("converged: window must be at least 1");
  const int n = static_cast<int>(error_curve.size());
  for (int r = 0; r + window <= n; ++r) {
    bool ok = true;
    for (int k = r; k < r + window; ++k) {
      if (!(error_curve[k] <= epsilon)) {
        ok = false;
        break;
      }
    }
    if (ok) return r;
  }
  return std::nullopt;
}

}  // namespace flocksim
