#include "flocksim/consensus.hpp"

#include <limits>
#include <queue>

namespace flocksim {

std::string tie_rule_name(TieRule t) {
  switch (t) {
    case TieRule::strict: return "strict";
    case TieRule::neighbor_id: return "neighbor_id";
    case TieRule::origin_id: return "origin_id";
  }
  return "unknown";
}

std::optional<TieRule> parse_tie_rule(const std::string& name) {
  if (name == "strict") return TieRule::strict;
  if (name == "neighbor_id") return TieRule::neighbor_id;
  if (name == "origin_id") return TieRule::origin_id;
  return std::nullopt;
}

std::string goal_cohort_name(GoalCohort c) {
  switch (c) {
    case GoalCohort::one_hop: return "one_hop";
    case GoalCohort::component: return "component";
  }
  return "unknown";
}

std::optional<GoalCohort> parse_goal_cohort(const std::string& name) {
  if (name == "one_hop") return GoalCohort::one_hop;
  if (name == "component") return GoalCohort::component;
  return std::nullopt;
}

GoalAssignment assign_goal(int robot_id, const FormationPlan& plan,
                           const std::map<int, Vec2>& known_positions) {
  if (known_positions.find(robot_id) == known_positions.end())
    throw ContractError("assign_goal: robot_id missing from known_positions");
  if (static_cast<int>(known_positions.size()) > plan.size())
    throw ContractError("assign_goal: more robots than plan points");

  std::vector<bool> taken(plan.points.size(), false);
  for (const auto& [id, pos] : known_positions) {  // std::map iterates ascending
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int p = 0; p < plan.size(); ++p) {
      if (taken[p]) continue;
      const double d = distance(pos, plan.points[p]);
      if (d < best_dist) {
        best_dist = d;
        best = p;
      }
    }
    taken[best] = true;
    if (id == robot_id) return {plan.points[best], best};
  }
  throw ContractError("assign_goal: unreachable");
}

std::pair<std::vector<RobotState>, std::vector<AdoptionEvent>> consensus_round(
    const std::vector<RobotState>& states, const CommGraph& graph,
    const ConsensusOptions& opts) {
  if (static_cast<int>(states.size()) != graph.size())
    throw ContractError("consensus_round: states and graph disagree on team size");

  const std::vector<RobotState>& snap = states;  // round-start snapshot
  std::vector<RobotState> next = states;
  std::vector<AdoptionEvent> log;

  auto plans_match = [&](const FormationPlan& a, const FormationPlan& b) {
    return a.size() == b.size() && plan_equal(a, b, opts.plan_tol);
  };

  // The per-round broadcast: every robot sends its plan, influence, and
  // current goal claim once; receivers below only read these messages.
  std::vector<ConsensusMessage> broadcast(snap.size());
  for (std::size_t i = 0; i < snap.size(); ++i)
    broadcast[i] = {snap[i].id, snap[i].plan, snap[i].influence, snap[i].goal_index};

  for (int i = 0; i < graph.size(); ++i) {
    const auto& nbrs = graph.neighbors(i);
    if (nbrs.empty()) continue;
    // Highest-influence sender; neighbor lists are ascending, so keeping
    // strict improvement picks the lowest id among maximizers. Under the
    // origin tie rule the candidate among tied maximizers is instead the one
    // carrying the lowest-origin plan, so that plan can flood through
    // influence-symmetric regions (origins only ever decrease, which rules
    // out adoption cycles).
    const ConsensusMessage* best = &broadcast[nbrs.front()];
    for (int j : nbrs) {
      const ConsensusMessage& msg = broadcast[j];
      if (msg.influence > best->influence) {
        best = &msg;
      } else if (opts.tie_rule == TieRule::origin_id &&
                 msg.influence == best->influence &&
                 msg.plan.origin_id < best->plan.origin_id) {
        best = &msg;
      }
    }
    bool adopt = best->influence > snap[i].influence;
    if (!adopt && best->influence == snap[i].influence) {
      if (opts.tie_rule == TieRule::neighbor_id) adopt = best->sender_id < i;
      if (opts.tie_rule == TieRule::origin_id)
        adopt = best->plan.origin_id < snap[i].plan.origin_id;
    }
    if (adopt && !plans_match(best->plan, snap[i].plan)) {
      next[i].plan = best->plan;
      log.push_back({i, best->sender_id});
    }
  }

  // Goal reassignment happens every round, adoption or not: the cohort of
  // robots sharing a plan grows as consensus spreads, and re-running the
  // greedy claim repairs transient goal conflicts.
  for (int i = 0; i < graph.size(); ++i) {
    std::map<int, Vec2> known;
    known[i] = snap[i].position;
    if (opts.goal_cohort == GoalCohort::one_hop) {
      for (int j : graph.neighbors(i)) {
        if (plans_match(snap[j].plan, next[i].plan)) known[j] = snap[j].position;
      }
    } else {
      // Positions relayed along chains of robots that now hold this plan.
      std::queue<int> frontier;
      frontier.push(i);
      while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int j : graph.neighbors(u)) {
          if (known.count(j)) continue;
          if (plans_match(next[j].plan, next[i].plan)) {
            known[j] = snap[j].position;
            frontier.push(j);
          }
        }
      }
    }
    const GoalAssignment ga = assign_goal(i, next[i].plan, known);
    next[i].goal = ga.goal;
    next[i].goal_index = ga.index;
  }
  return {std::move(next), std::move(log)};
}

}  // namespace flocksim
