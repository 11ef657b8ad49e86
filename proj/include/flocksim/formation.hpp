#pragma once

#include <vector>

#include "flocksim/core.hpp"

// Canonical target formations. These point sets serve two roles: the
// deterministic planner emits them as its plan, and the metrics module uses
// them as the alignment reference.

namespace flocksim {

struct ShapeTemplate {
  Shape shape = Shape::triangle;
  int team_size = 3;
  Vec2 center{50.0, 50.0};
  double desired_distance = 10.0;
};

// True when the (shape, team_size) pair has a defined layout:
// triangle {3, 6}, square {4, 8}, circle {N >= 3}, cross {5}.
bool formation_supported(Shape shape, int team_size);

// Returns team_size points whose centroid is the template center and whose
// adjacent spacing realizes desired_distance:
//   triangle/3  equilateral vertices, side d, first vertex at angle 0
//   triangle/6  side-2d triangle vertices plus edge midpoints, perimeter order
//   square/4    corners of a side-d axis-aligned square
//   square/8    corners plus edge midpoints of a side-2d square, perimeter order
//   circle/N    equal angular spacing from angle 0, radius d / (2 sin(pi/N))
//   cross/5     center plus four points at distance d along +x, +y, -x, -y
// Throws ConfigError for unsupported combinations.
std::vector<Vec2> generate_formation(const ShapeTemplate& t);

// Max distance from the center to any generated point.
double formation_radius(const ShapeTemplate& t);

}  // namespace flocksim
