#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flocksim/core.hpp"

// Per-robot decision making: the initial full-team plan and the per-round
// waypoint. Four interchangeable planner kinds share one interface; the
// language-model kind keeps per-robot conversation state and lives in
// llm_planner.hpp, built on the message templates and parsers defined here.

namespace flocksim {

enum class PlannerKind { oracle, llm, fault_distorted_plan, fault_overshoot };

std::string planner_kind_name(PlannerKind k);
std::optional<PlannerKind> parse_planner_kind(const std::string& name);

struct PlanResult {
  FormationPlan plan;
  int my_index = 0;  // the slot this robot claims for itself
};

// Everything a planner sees when deciding one step.
struct StepContext {
  Vec2 self_position{};
  std::vector<Vec2> neighbor_positions;  // robots currently in comm range
  FormationPlan plan;
  Vec2 goal{};
  TaskSpec spec;
};

// Deterministic plan generation. The oracle emits the canonical formation
// with my_index = robot_id mod N. The distorted-plan fault perturbs each
// coordinate of the oracle plan by a seeded uniform draw in
// [-0.4 * desired_distance, +0.4 * desired_distance]. The overshoot fault
// plans exactly like the oracle (its defect is in the step). The llm kind
// requires a session and is rejected here.
PlanResult generate_plan(PlannerKind kind, int robot_id, const TaskSpec& spec,
                         SeededRng& rng);

// Adds a uniform draw in [-amplitude, +amplitude] to every coordinate,
// x before y, in point order. Exposed so tests can replay the sequence.
FormationPlan distort_plan(FormationPlan plan, double amplitude, SeededRng& rng);

// One waypoint decision. The oracle moves straight at the goal, capped at
// max_speed, then shortens the step if it would enter a neighbor's safe
// zone. The overshoot fault always takes a full max_speed stride along the
// goal direction, reproducing the oscillation failure mode.
Vec2 propose_step(PlannerKind kind, const StepContext& ctx);

// Message templates sent to a language-model backend. Deterministic bytes:
// numbers use shortest round-trip formatting, so these render identically
// on every platform and are pinned by golden-file tests.
std::string render_system_prompt(const TaskSpec& spec);
std::string render_plan_request(const TaskSpec& spec);
std::string render_step_request(const StepContext& ctx);

enum class ParseError {
  none,
  plan_missing,      // no bracketed list-of-pairs after a "Plan:" token
  bad_length,        // plan found but not team_size points
  bad_index,         // "my plan:" index missing or out of range
  position_missing,  // no "Position: [x, y]" match
};

const char* parse_error_name(ParseError e);

struct PlanReplyParse {
  std::optional<PlanResult> result;
  ParseError error = ParseError::none;
  bool ok() const { return result.has_value(); }
};

struct PositionReplyParse {
  std::optional<Vec2> position;
  ParseError error = ParseError::none;
  bool ok() const { return position.has_value(); }
};

// Extract the LAST bracketed list-of-pairs following a "Plan:" token and the
// LAST integer following "my plan:" / "my_plan:". Model replies interleave
// intermediate coordinate math before the final answer, and the reply format
// instruction puts the answer last, so last match wins. Case-insensitive,
// whitespace-tolerant, tolerant of markdown emphasis around the tokens.
// Total: any input yields either a result or a typed error.
PlanReplyParse parse_plan_reply(const std::string& reply, int team_size);

// Extract the LAST "Position: [x, y]" match, with the same tolerance rules.
PositionReplyParse parse_position_reply(const std::string& reply);

}  // namespace flocksim
