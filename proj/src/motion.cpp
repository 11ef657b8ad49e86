#include "flocksim/motion.hpp"

namespace flocksim {

namespace {

constexpr double kEps = 1e-9;

bool clears_safe_zone(Vec2 from, Vec2 candidate, const std::vector<Vec2>& neighbors,
                      double safe_distance) {
  for (Vec2 nb : neighbors) {
    const double now = distance(candidate, nb);
    if (now >= safe_distance - kEps) continue;
    const double before = distance(from, nb);
    // Pre-existing violation: tolerate it as long as we do not get closer.
    if (before < safe_distance && now >= before - kEps) continue;
    return false;
  }
  return true;
}

}  // namespace

GuardedTarget guard_step(Vec2 from, Vec2 target, const std::vector<Vec2>& neighbors,
                         double safe_distance) {
  if (clears_safe_zone(from, target, neighbors, safe_distance))
    return {target, false, false};
  const Vec2 step = target - from;
  for (double lambda : {0.75, 0.5, 0.25}) {
    const Vec2 candidate = from + step * lambda;
    if (clears_safe_zone(from, candidate, neighbors, safe_distance))
      return {candidate, true, false};
  }
  return {from, true, true};
}

std::pair<Vec2, MotionReport> apply_step(const RobotState& state, Vec2 waypoint,
                                         const std::vector<Vec2>& neighbor_positions,
                                         const TaskSpec& spec) {
  MotionReport report;
  report.robot_id = state.id;
  report.requested = waypoint;

  if (!waypoint.finite()) {
    report.rejected_nonfinite = true;
    report.applied = state.position;
    return {state.position, report};
  }

  // Speed cap: shrink the displacement, keep the direction.
  Vec2 target = waypoint;
  const Vec2 d = waypoint - state.position;
  const double len = d.norm();
  if (len > spec.max_speed) {
    target = state.position + d * (spec.max_speed / len);
    report.clamped_speed = true;
  }

  const GuardedTarget guarded =
      guard_step(state.position, target, neighbor_positions, spec.safe_distance);
  report.safety_hold = guarded.hold;

  const Vec2 applied = spec.arena.clamp(guarded.target);
  report.applied = applied;
  return {applied, report};
}

}  // namespace flocksim
