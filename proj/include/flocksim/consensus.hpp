#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flocksim/comm_graph.hpp"
#include "flocksim/core.hpp"

// One synchronous round of influence-based plan consensus plus decentralized
// goal assignment. Everything reads round-start snapshots, so the result is
// independent of robot iteration order.

namespace flocksim {

// The broadcast payload each robot sends its neighbors every round.
struct ConsensusMessage {
  int sender_id = -1;
  FormationPlan plan;
  double influence = 0.0;
  int claimed_goal_index = -1;  // -1 while unassigned
};

struct AdoptionEvent {
  int robot_id = -1;
  int adopted_from = -1;
};

// How influence ties are resolved. Adoption always requires the best
// neighbor's plan to differ; `strict` additionally requires strictly higher
// influence (and deadlocks on influence-symmetric graphs). `neighbor_id`
// also adopts from an equal-influence best neighbor with a lower id.
// `origin_id` also adopts when the best neighbor's plan has a lower origin
// id, which floods one plan through any connected equal-influence region.
enum class TieRule { strict, neighbor_id, origin_id };

// Which robots contribute to the goal-claim cohort: direct same-plan
// neighbors only, or every robot reachable through same-plan members
// (positions relayed along the chain). The component cohort gives all
// members an identical view, so their greedy claims are conflict-free.
enum class GoalCohort { one_hop, component };

std::string tie_rule_name(TieRule t);
std::optional<TieRule> parse_tie_rule(const std::string& name);
std::string goal_cohort_name(GoalCohort c);
std::optional<GoalCohort> parse_goal_cohort(const std::string& name);

struct ConsensusOptions {
  TieRule tie_rule = TieRule::strict;
  GoalCohort goal_cohort = GoalCohort::one_hop;
  double plan_tol = 1e-6;
};

struct GoalAssignment {
  Vec2 goal{};
  int index = -1;
};

// Local greedy resolution of nearest-available-goal assignment: walk the
// known cohort in ascending id order, each robot claiming its nearest
// remaining plan point (ties by lowest index); report robot_id's claim.
// Re-run every round, the claims become conflict-free across any set of
// mutually visible robots sharing a plan.
GoalAssignment assign_goal(int robot_id, const FormationPlan& plan,
                           const std::map<int, Vec2>& known_positions);

// Apply one consensus round: each robot looks at its highest-influence
// neighbor (ties by lowest id), adopts that neighbor's plan when the
// neighbor has strictly higher influence and a different plan, then
// re-derives its goal from the robots it can see that share its plan.
// Returns the updated states and the adoption events of this round.
std::pair<std::vector<RobotState>, std::vector<AdoptionEvent>> consensus_round(
    const std::vector<RobotState>& states, const CommGraph& graph,
    const ConsensusOptions& opts = {});

}  // namespace flocksim
