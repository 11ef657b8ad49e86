#include "flocksim/formation.hpp"

#include <cmath>
#include <numbers>

namespace flocksim {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Vec2> offsets_to_points(Vec2 center, const std::vector<Vec2>& offsets) {
  std::vector<Vec2> pts;
  pts.reserve(offsets.size());
  for (Vec2 o : offsets) pts.push_back(center + o);
  return pts;
}

// Vertices of an equilateral triangle with side `side`, first vertex at
// angle 0, counterclockwise.
std::vector<Vec2> triangle_vertices(double side) {
  const double r = side / std::sqrt(3.0);  // circumradius
  std::vector<Vec2> v;
  for (int k = 0; k < 3; ++k) {
    const double a = 2.0 * kPi * k / 3.0;
    v.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return v;
}

}  // namespace

bool formation_supported(Shape shape, int team_size) {
  switch (shape) {
    case Shape::triangle: return team_size == 3 || team_size == 6;
    case Shape::square: return team_size == 4 || team_size == 8;
    case Shape::circle: return team_size >= 3;
    case Shape::cross: return team_size == 5;
  }
  return false;
}

std::vector<Vec2> generate_formation(const ShapeTemplate& t) {
  if (!formation_supported(t.shape, t.team_size))
    throw ConfigError("generate_formation: unsupported shape '" + shape_name(t.shape) +
                      "' for team size " + std::to_string(t.team_size));
  const double d = t.desired_distance;

  switch (t.shape) {
    case Shape::triangle: {
      if (t.team_size == 3)
        return offsets_to_points(t.center, triangle_vertices(d));
      // Six robots: vertices of a side-2d triangle interleaved with the edge
      // midpoints, walking the perimeter, so neighbors sit d apart.
      const auto v = triangle_vertices(2.0 * d);
      std::vector<Vec2> offsets;
      for (int k = 0; k < 3; ++k) {
        const Vec2 a = v[k];
        const Vec2 b = v[(k + 1) % 3];
        offsets.push_back(a);
        offsets.push_back((a + b) * 0.5);
      }
      return offsets_to_points(t.center, offsets);
    }
    case Shape::square: {
      if (t.team_size == 4) {
        const double h = d / 2.0;
        return offsets_to_points(t.center, {{h, h}, {-h, h}, {-h, -h}, {h, -h}});
      }
      // Eight robots: corners plus edge midpoints of a side-2d square,
      // counterclockwise from the (+,+) corner.
      return offsets_to_points(t.center, {{d, d},
                                          {0.0, d},
                                          {-d, d},
                                          {-d, 0.0},
                                          {-d, -d},
                                          {0.0, -d},
                                          {d, -d},
                                          {d, 0.0}});
    }
    case Shape::circle: {
      // Radius chosen so adjacent chord length equals d.
      const double r = d / (2.0 * std::sin(kPi / t.team_size));
      std::vector<Vec2> offsets;
      for (int k = 0; k < t.team_size; ++k) {
        const double a = 2.0 * kPi * k / t.team_size;
        offsets.push_back({r * std::cos(a), r * std::sin(a)});
      }
      return offsets_to_points(t.center, offsets);
    }
    case Shape::cross:
      return offsets_to_points(t.center,
                               {{0.0, 0.0}, {d, 0.0}, {0.0, d}, {-d, 0.0}, {0.0, -d}});
  }
  throw ConfigError("generate_formation: unknown shape");
}

double formation_radius(const ShapeTemplate& t) {
  double r = 0.0;
  for (Vec2 p : generate_formation(t)) r = std::max(r, distance(p, t.center));
  return r;
}

}  // namespace flocksim
