#include "flocksim/planner.hpp"

#include <cctype>
#include <charconv>
#include <numbers>

#include "flocksim/formation.hpp"
#include "flocksim/motion.hpp"

namespace flocksim {

std::string planner_kind_name(PlannerKind k) {
  switch (k) {
    case PlannerKind::oracle: return "oracle";
    case PlannerKind::llm: return "llm";
    case PlannerKind::fault_distorted_plan: return "fault_distorted_plan";
    case PlannerKind::fault_overshoot: return "fault_overshoot";
  }
  return "unknown";
}

std::optional<PlannerKind> parse_planner_kind(const std::string& name) {
  if (name == "oracle") return PlannerKind::oracle;
  if (name == "llm") return PlannerKind::llm;
  if (name == "fault_distorted_plan") return PlannerKind::fault_distorted_plan;
  if (name == "fault_overshoot") return PlannerKind::fault_overshoot;
  return std::nullopt;
}

PlanResult generate_plan(PlannerKind kind, int robot_id, const TaskSpec& spec,
                         SeededRng& rng) {
  if (robot_id < 0) throw ContractError("generate_plan: negative robot id");
  if (kind == PlannerKind::llm)
    throw ContractError("generate_plan: llm planner needs an LlmPlannerSession");

  const ShapeTemplate tmpl{spec.shape, spec.team_size, spec.center,
                           spec.desired_distance};
  PlanResult out;
  out.plan.origin_id = robot_id;
  out.plan.points = generate_formation(tmpl);
  out.my_index = robot_id % spec.team_size;
  if (kind == PlannerKind::fault_distorted_plan)
    out.plan = distort_plan(std::move(out.plan), 0.4 * spec.desired_distance, rng);
  return out;
}

FormationPlan distort_plan(FormationPlan plan, double amplitude, SeededRng& rng) {
  for (Vec2& p : plan.points) {
    p.x += rng.uniform(-amplitude, amplitude);
    p.y += rng.uniform(-amplitude, amplitude);
  }
  return plan;
}

Vec2 propose_step(PlannerKind kind, const StepContext& ctx) {
  if (kind == PlannerKind::llm)
    throw ContractError("propose_step: llm planner needs an LlmPlannerSession");

  const Vec2 to_goal = ctx.goal - ctx.self_position;
  const double dist = to_goal.norm();
  if (kind == PlannerKind::fault_overshoot) {
    // Full stride regardless of how close the goal already is.
    const Vec2 waypoint =
        dist < 1e-12 ? ctx.self_position
                     : ctx.self_position + to_goal * (ctx.spec.max_speed / dist);
    return guard_step(ctx.self_position, waypoint, ctx.neighbor_positions,
                      ctx.spec.safe_distance)
        .target;
  }

  const Vec2 waypoint =
      dist <= ctx.spec.max_speed
          ? ctx.goal
          : ctx.self_position + to_goal * (ctx.spec.max_speed / dist);
  const GuardedTarget direct = guard_step(ctx.self_position, waypoint,
                                          ctx.neighbor_positions,
                                          ctx.spec.safe_distance);
  if (!direct.hold) return direct.target;

  // Straight path fully blocked by parked neighbors. Probe fixed detour
  // headings, nearest to the goal direction first, and take the first one
  // the guard lets through; otherwise hold. Without this a robot aiming
  // past an occupied slot can wedge permanently.
  const Vec2 step = waypoint - ctx.self_position;
  constexpr double kDetourDeg[] = {30.0, -30.0, 60.0, -60.0, 90.0, -90.0};
  for (double deg : kDetourDeg) {
    const Vec2 candidate =
        rotate_about(ctx.self_position + step, ctx.self_position,
                     deg * std::numbers::pi / 180.0);
    const GuardedTarget detour = guard_step(ctx.self_position, candidate,
                                            ctx.neighbor_positions,
                                            ctx.spec.safe_distance);
    if (!detour.hold) return detour.target;
  }
  return ctx.self_position;
}

std::string render_system_prompt(const TaskSpec& spec) {
  std::string s;
  s += "You are a drone navigating in a 2D space. Your objective is to determine "
       "your next position to contribute to forming a shape with your neighbors "
       "while maintaining specific distance constraints. Your neighbors are also "
       "moving.\n";
  s += "Key Requirements:\n";
  s += "Formation: Form a/an " + shape_name(spec.shape) + " centered at " +
       format_vec(spec.center) + ".\n";
  s += "Desired Distance: Maintain a desired distance of " +
       format_double(spec.desired_distance) + " units between each drone.\n";
  s += "Safe Distance: Keep a minimum safe distance of " +
       format_double(spec.safe_distance) + " units from other drones.\n";
  s += "Maximum Speed: Your movement per step cannot exceed " +
       format_double(spec.max_speed) + " units.\n";
  s += "Communication Range: Your communication range is " +
       format_double(spec.comm_range) + " units.\n";
  s += "Task: Decide your next position considering the above constraints and "
       "formation goal. Briefly explain your decision and provide the new position "
       "in the format 'Position: [x, y].'";
  return s;
}

std::string render_plan_request(const TaskSpec& spec) {
  std::string s;
  s += "Please make a plan of the locations for the team of " +
       std::to_string(spec.team_size) +
       " robots forming the shape. Remember the given requirements about the shape "
       "and desired distance. Please give the final answer in the form of "
       "'Plan: [[x_1, y_1], [x_2, y_2], ..., [x_n, y_n]]', and the index of the "
       "location you are taking as 'my plan: a', where a is the index of the "
       "coordinate.";
  return s;
}

std::string render_step_request(const StepContext& ctx) {
  std::string s;
  s += "Current Position: " + format_vec(ctx.self_position) + ". ";
  s += "Moving Neighbor Positions: " + format_points(ctx.neighbor_positions) + ". ";
  s += "Plan: " + format_points(ctx.plan.points) + ". ";
  s += "You will need to go to " + format_vec(ctx.goal) + " as your final destination.\n";
  s += "Task: Decide your next position considering the above constraints and the "
       "location of your neighbors. Briefly explain your decision and provide the "
       "new position in the format 'Position: [x, y].'";
  return s;
}

const char* parse_error_name(ParseError e) {
  switch (e) {
    case ParseError::none: return "none";
    case ParseError::plan_missing: return "plan-missing";
    case ParseError::bad_length: return "bad-length";
    case ParseError::bad_index: return "bad-index";
    case ParseError::position_missing: return "position-missing";
  }
  return "unknown";
}

namespace {

bool is_markup(char c) { return c == '*' || c == '`' || c == '\'' || c == '"'; }
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

std::size_t skip_markup_and_space(const std::string& s, std::size_t i) {
  while (i < s.size() && (is_markup(s[i]) || is_space(s[i]))) ++i;
  return i;
}

// Case-insensitive check that `word` (lowercase) starts at s[i].
bool matches_word(const std::string& s, std::size_t i, const char* word) {
  for (const char* w = word; *w; ++w, ++i) {
    if (i >= s.size() || std::tolower(static_cast<unsigned char>(s[i])) != *w)
      return false;
  }
  return true;
}

std::optional<double> parse_number(const std::string& s, std::size_t& i) {
  std::size_t j = i;
  if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
  std::size_t digits_start = j;
  while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
  if (j == digits_start) return std::nullopt;
  if (j < s.size() && s[j] == '.') {
    ++j;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
  }
  double value = 0.0;
  const auto res = std::from_chars(s.data() + i, s.data() + j, value);
  if (res.ec != std::errc()) return std::nullopt;
  i = j;
  return value;
}

// Parse "[x, y]" starting at s[i] (i on the '['); advances i past it.
std::optional<Vec2> parse_pair(const std::string& s, std::size_t& i) {
  std::size_t j = i;
  if (j >= s.size() || s[j] != '[') return std::nullopt;
  j = skip_markup_and_space(s, j + 1);
  const auto x = parse_number(s, j);
  if (!x) return std::nullopt;
  j = skip_markup_and_space(s, j);
  if (j >= s.size() || s[j] != ',') return std::nullopt;
  j = skip_markup_and_space(s, j + 1);
  const auto y = parse_number(s, j);
  if (!y) return std::nullopt;
  j = skip_markup_and_space(s, j);
  if (j >= s.size() || s[j] != ']') return std::nullopt;
  i = j + 1;
  return Vec2{*x, *y};
}

// Parse "[[x, y], [x, y], ...]" starting at s[i].
std::optional<std::vector<Vec2>> parse_pair_list(const std::string& s, std::size_t& i) {
  std::size_t j = i;
  if (j >= s.size() || s[j] != '[') return std::nullopt;
  j = skip_markup_and_space(s, j + 1);
  std::vector<Vec2> pts;
  while (true) {
    const auto p = parse_pair(s, j);
    if (!p) return std::nullopt;
    pts.push_back(*p);
    j = skip_markup_and_space(s, j);
    if (j < s.size() && s[j] == ',') {
      j = skip_markup_and_space(s, j + 1);
      continue;
    }
    break;
  }
  if (j >= s.size() || s[j] != ']') return std::nullopt;
  i = j + 1;
  return pts;
}

// After a token word, expect optional markup, a colon, more optional markup.
std::optional<std::size_t> skip_token_colon(const std::string& s, std::size_t after_word) {
  std::size_t j = after_word;
  while (j < s.size() && is_markup(s[j])) ++j;
  if (j >= s.size() || s[j] != ':') return std::nullopt;
  return skip_markup_and_space(s, j + 1);
}

}  // namespace

PlanReplyParse parse_plan_reply(const std::string& reply, int team_size) {
  PlanReplyParse out;

  std::optional<std::vector<Vec2>> last_points;
  for (std::size_t i = 0; i + 4 <= reply.size(); ++i) {
    if (!matches_word(reply, i, "plan")) continue;
    const auto body = skip_token_colon(reply, i + 4);
    if (!body) continue;
    std::size_t j = *body;
    const auto pts = parse_pair_list(reply, j);
    if (pts) last_points = pts;
  }
  if (!last_points) {
    out.error = ParseError::plan_missing;
    return out;
  }
  if (static_cast<int>(last_points->size()) != team_size) {
    out.error = ParseError::bad_length;
    return out;
  }

  std::optional<long> last_index;
  for (std::size_t i = 0; i + 2 <= reply.size(); ++i) {
    if (!matches_word(reply, i, "my")) continue;
    std::size_t j = i + 2;
    while (j < reply.size() && (reply[j] == ' ' || reply[j] == '_' || reply[j] == '\t'))
      ++j;
    if (!matches_word(reply, j, "plan")) continue;
    const auto body = skip_token_colon(reply, j + 4);
    if (!body) continue;
    std::size_t k = *body;
    const auto v = parse_number(reply, k);
    if (v) last_index = static_cast<long>(*v);
  }
  if (!last_index || *last_index < 0 || *last_index >= team_size) {
    out.error = ParseError::bad_index;
    return out;
  }

  PlanResult result;
  result.plan.origin_id = -1;  // provenance attached by the caller
  result.plan.points = std::move(*last_points);
  result.my_index = static_cast<int>(*last_index);
  out.result = std::move(result);
  return out;
}

PositionReplyParse parse_position_reply(const std::string& reply) {
  PositionReplyParse out;
  std::optional<Vec2> last;
  for (std::size_t i = 0; i + 8 <= reply.size(); ++i) {
    if (!matches_word(reply, i, "position")) continue;
    const auto body = skip_token_colon(reply, i + 8);
    if (!body) continue;
    std::size_t j = *body;
    const auto p = parse_pair(reply, j);
    if (p) last = p;
  }
  if (!last) {
    out.error = ParseError::position_missing;
    return out;
  }
  out.position = *last;
  return out;
}

}  // namespace flocksim
