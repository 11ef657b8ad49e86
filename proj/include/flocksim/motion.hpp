#pragma once

#include <vector>

#include "flocksim/core.hpp"

// Hard physical-constraint enforcement. Planners propose waypoints; this
// module decides what actually happens, so a misbehaving planner can request
// anything and the trajectory stays legal.

namespace flocksim {

struct MotionReport {
  int robot_id = -1;
  Vec2 requested{};
  Vec2 applied{};
  bool clamped_speed = false;      // displacement was cut to max_speed
  bool safety_hold = false;        // no forward fraction cleared the safe zone
  bool rejected_nonfinite = false; // waypoint had NaN/inf components
};

struct GuardedTarget {
  Vec2 target{};
  bool shortened = false;  // some ladder fraction below 1 was taken
  bool hold = false;       // fraction 0: stay at `from`
};

// Step-shortening ladder against the safe distance. Tries the full step,
// then fractions {0.75, 0.5, 0.25, 0} of it, and keeps the largest fraction
// whose endpoint clears `safe_distance` from every neighbor. A neighbor that
// was already closer than `safe_distance` at round start only requires the
// distance not to shrink, so an already-crowded robot may still move away.
GuardedTarget guard_step(Vec2 from, Vec2 target, const std::vector<Vec2>& neighbors,
                         double safe_distance);

// Clamp the waypoint to the speed cap, run the safe-distance ladder against
// round-start neighbor positions, and clamp the result to the arena.
// Non-finite waypoints are rejected: the robot holds position.
std::pair<Vec2, MotionReport> apply_step(const RobotState& state, Vec2 waypoint,
                                         const std::vector<Vec2>& neighbor_positions,
                                         const TaskSpec& spec);

}  // namespace flocksim
