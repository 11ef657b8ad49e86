#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flocksim/consensus.hpp"
#include "flocksim/core.hpp"
#include "flocksim/llm_client.hpp"
#include "flocksim/motion.hpp"
#include "flocksim/planner.hpp"

// The round loop (plan generation once, then alternating consensus and
// motion), seeded trial batches, aggregation, and artifact persistence.

namespace flocksim {

// Which robot-to-target pairing feeds the shape error. `auto_mode` resolves
// to goal_index when consensus is on and greedy otherwise (baseline goal
// indices conflict by construction, so index pairing would be meaningless).
enum class Correspondence { auto_mode, goal_index, greedy };

std::string correspondence_name(Correspondence c);
std::optional<Correspondence> parse_correspondence(const std::string& name);

struct RunConfig {
  TaskSpec task;
  PlannerKind planner = PlannerKind::oracle;
  std::map<int, PlannerKind> planner_overrides;  // robot id -> kind, for mixed runs
  bool consensus_enabled = true;
  // Defaults favor reliable convergence: the strict rule is the literal
  // protocol but permanently deadlocks once the formation topology makes
  // influences symmetric, and one-hop goal claims can cycle forever on
  // large formations. Select `strict`/`one_hop` to study those behaviors.
  TieRule tie_rule = TieRule::origin_id;
  GoalCohort goal_cohort = GoalCohort::component;
  // Give robot i the canonical plan rotated by i * 2*pi/N about the center.
  // Identical deterministic plans would make consensus a no-op; rotated
  // copies create genuine disagreement for consensus/baseline studies.
  bool conflicting_plans = false;
  int max_rounds = 30;
  std::vector<std::uint64_t> seeds{1};
  double epsilon = 0.5;
  int window = 3;
  Correspondence correspondence = Correspondence::auto_mode;
  bool export_svg = false;
  std::optional<LlmConfig> llm;

  void validate() const;
  Correspondence resolved_correspondence() const;
};

// Everything observable about one round.
struct Frame {
  int round = 0;
  std::vector<Vec2> positions;
  std::vector<int> plan_origins;
  std::vector<int> my_indices;  // self-assigned plan slots from generation
  std::vector<Vec2> goals;
  std::vector<int> goal_indices;
  std::vector<double> influences;
  std::vector<std::vector<int>> neighbors;
  std::vector<AdoptionEvent> adoptions;   // empty at round 0
  std::vector<MotionReport> motion;       // empty at round 0
  double error_mean_dist = 0.0;
  double error_mean_sq = 0.0;
  double agreement = 0.0;
  double wall_ms = 0.0;  // excluded from record equality
};

struct TrialRecord {
  std::uint64_t seed = 0;
  std::vector<Frame> frames;
  std::vector<double> error_dist_curve;
  std::vector<double> error_sq_curve;
  std::vector<double> agreement_curve;
  std::optional<int> convergence_round;
  bool failed = false;
  std::string failure_reason;
  int llm_replies = 0;
  int llm_fallbacks = 0;
};

// Equality modulo wall-clock, used by the serialization round-trip test.
bool records_equivalent(const TrialRecord& a, const TrialRecord& b);

struct BatchSummary {
  std::vector<double> mean_error_dist;  // per round, shorter trials padded with
  std::vector<double> ci95_half_width;  // their final value
  std::vector<double> mean_agreement;
  int trials = 0;
  int failed_trials = 0;
  int converged_trials = 0;
  double mean_convergence_round = 0.0;  // among converged trials
};

TrialRecord run_trial(const RunConfig& config, std::uint64_t seed);

struct BatchResult {
  BatchSummary summary;
  std::vector<TrialRecord> records;
};

// Runs every seed independently; per-trial failures are recorded, not fatal.
BatchResult run_batch(const RunConfig& config);

BatchSummary summarize(const std::vector<TrialRecord>& records);

// Writes frames.jsonl + curves.csv (+ frames/<round>.svg when enabled) into
// `directory`, creating it as needed.
void export_trial(const TrialRecord& record, const std::filesystem::path& directory,
                  const RunConfig& config);

// Inverse of the frames.jsonl serialization (wall-clock not restored).
TrialRecord import_trial(const std::filesystem::path& frames_jsonl);

// Full batch layout: <out>/<seed>/..., <out>/summary.csv, <out>/aggregate.csv,
// and a resolved-config snapshot.
void export_batch(const BatchResult& result, const RunConfig& config,
                  const std::filesystem::path& out_dir);

}  // namespace flocksim
