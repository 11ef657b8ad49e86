#include "flocksim/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>

#include <json.hpp>

#include "flocksim/config.hpp"
#include "flocksim/formation.hpp"
#include "flocksim/metrics.hpp"
#include "flocksim/svg.hpp"

namespace flocksim {

namespace fs = std::filesystem;
using nlohmann::json;

std::string correspondence_name(Correspondence c) {
  switch (c) {
    case Correspondence::auto_mode: return "auto";
    case Correspondence::goal_index: return "goal_index";
    case Correspondence::greedy: return "greedy";
  }
  return "unknown";
}

std::optional<Correspondence> parse_correspondence(const std::string& name) {
  if (name == "auto") return Correspondence::auto_mode;
  if (name == "goal_index") return Correspondence::goal_index;
  if (name == "greedy") return Correspondence::greedy;
  return std::nullopt;
}

void RunConfig::validate() const {
  task.validate();
  if (!formation_supported(task.shape, task.team_size))
    throw ConfigError("config: shape '" + shape_name(task.shape) +
                      "' is not defined for " + std::to_string(task.team_size) +
                      " robots");
  if (max_rounds < 1) throw ConfigError("config: max_rounds must be at least 1");
  if (seeds.empty()) throw ConfigError("config: at least one seed required");
  if (!(epsilon > 0.0)) throw ConfigError("config: epsilon must be positive");
  if (window < 1) throw ConfigError("config: window must be at least 1");
  for (const auto& [id, kind] : planner_overrides) {
    if (id < 0 || id >= task.team_size)
      throw ConfigError("config: planner override for robot " + std::to_string(id) +
                        " is out of range");
    (void)kind;
  }
  const bool uses_llm =
      planner == PlannerKind::llm ||
      std::any_of(planner_overrides.begin(), planner_overrides.end(),
                  [](const auto& kv) { return kv.second == PlannerKind::llm; });
  if (uses_llm && !llm)
    throw ConfigError("config: llm planner selected but no [llm] settings given");
}

Correspondence RunConfig::resolved_correspondence() const {
  if (correspondence != Correspondence::auto_mode) return correspondence;
  return consensus_enabled ? Correspondence::goal_index : Correspondence::greedy;
}

bool records_equivalent(const TrialRecord& a, const TrialRecord& b) {
  auto frame_eq = [](const Frame& x, const Frame& y) {
    auto motion_eq = [](const MotionReport& m, const MotionReport& n) {
      return m.robot_id == n.robot_id && m.requested == n.requested &&
             m.applied == n.applied && m.clamped_speed == n.clamped_speed &&
             m.safety_hold == n.safety_hold &&
             m.rejected_nonfinite == n.rejected_nonfinite;
    };
    if (x.round != y.round || x.positions != y.positions ||
        x.plan_origins != y.plan_origins || x.my_indices != y.my_indices ||
        x.goals != y.goals || x.goal_indices != y.goal_indices ||
        x.influences != y.influences || x.neighbors != y.neighbors ||
        x.error_mean_dist != y.error_mean_dist || x.error_mean_sq != y.error_mean_sq ||
        x.agreement != y.agreement)
      return false;
    if (x.adoptions.size() != y.adoptions.size() || x.motion.size() != y.motion.size())
      return false;
    for (std::size_t i = 0; i < x.adoptions.size(); ++i) {
      if (x.adoptions[i].robot_id != y.adoptions[i].robot_id ||
          x.adoptions[i].adopted_from != y.adoptions[i].adopted_from)
        return false;
    }
    for (std::size_t i = 0; i < x.motion.size(); ++i)
      if (!motion_eq(x.motion[i], y.motion[i])) return false;
    return true;
  };

  if (a.seed != b.seed || a.failed != b.failed ||
      a.failure_reason != b.failure_reason ||
      a.convergence_round != b.convergence_round || a.llm_replies != b.llm_replies ||
      a.llm_fallbacks != b.llm_fallbacks || a.frames.size() != b.frames.size() ||
      a.error_dist_curve != b.error_dist_curve ||
      a.error_sq_curve != b.error_sq_curve || a.agreement_curve != b.agreement_curve)
    return false;
  for (std::size_t i = 0; i < a.frames.size(); ++i)
    if (!frame_eq(a.frames[i], b.frames[i])) return false;
  return true;
}

namespace {

struct ErrorPair {
  double mean_dist = 0.0;
  double mean_sq = 0.0;
};

ErrorPair shape_error(const std::vector<Vec2>& positions,
                      const std::vector<RobotState>& states,
                      const std::vector<Vec2>& target, Correspondence mode) {
  std::vector<Vec2> matched(target.size());
  if (mode == Correspondence::goal_index) {
    for (std::size_t i = 0; i < states.size(); ++i)
      matched[i] = target[static_cast<std::size_t>(states[i].goal_index)];
  } else {
    const std::vector<int> perm = point_correspondence(positions, target);
    for (std::size_t i = 0; i < positions.size(); ++i)
      matched[i] = target[static_cast<std::size_t>(perm[i])];
  }
  const AlignmentResult res = procrustes_align(positions, matched);
  return {res.error_mean_dist, res.error_mean_sq};
}

}  // namespace

TrialRecord run_trial(const RunConfig& config, std::uint64_t seed) {
  config.validate();
  const TaskSpec& task = config.task;
  const int n = task.team_size;
  const Correspondence correspondence = config.resolved_correspondence();
  ConsensusOptions consensus_opts;
  consensus_opts.tie_rule = config.tie_rule;
  consensus_opts.goal_cohort = config.goal_cohort;

  TrialRecord rec;
  rec.seed = seed;

  auto kind_of = [&](int i) {
    const auto it = config.planner_overrides.find(i);
    return it == config.planner_overrides.end() ? config.planner : it->second;
  };

  SeededRng rng(seed);
  std::vector<Vec2> positions = random_initial_positions(task, rng);


  const std::vector<Vec2> target =
      generate_formation({task.shape, n, task.center, task.desired_distance});

  std::vector<std::unique_ptr<LlmPlannerSession>> sessions(n);
  std::vector<RobotState> states(n);
  std::vector<int> my_indices(n, 0);

  // Reply counters live in the sessions; mirror them into the record at
  // every exit so partial (failed) records stay accurate.
  auto sync_llm_counters = [&] {
    rec.llm_replies = 0;
    for (const auto& s : sessions)
      if (s) rec.llm_replies += s->replies_total();
  };

  for (int i = 0; i < n; ++i) {
    states[i].id = i;
    states[i].position = positions[i];
    const PlannerKind kind = kind_of(i);
    PlanResult pr;
    try {
      if (kind == PlannerKind::llm) {
        sessions[i] = std::make_unique<LlmPlannerSession>(i, task, *config.llm);
        pr = sessions[i]->generate_plan();
      } else {
        // Substream per robot so draw order never depends on loop order.
        SeededRng plan_rng = rng.fork(static_cast<std::uint64_t>(i) + 1);
        pr = generate_plan(kind, i, task, plan_rng);
      }
    } catch (const LlmTransportError& e) {
      rec.failed = true;
      rec.failure_reason = std::string("planner-unavailable: ") + e.what();
      sync_llm_counters();
      return rec;
    } catch (const LlmParseError& e) {
      rec.failed = true;
      rec.failure_reason = std::string("parse-failure: ") + e.what();
      sync_llm_counters();
      return rec;
    }
    if (config.conflicting_plans && kind != PlannerKind::llm) {
      const double angle = 2.0 * std::numbers::pi * i / n;
      for (Vec2& p : pr.plan.points) p = rotate_about(p, task.center, angle);
    }
    states[i].plan = std::move(pr.plan);
    my_indices[i] = pr.my_index;
    const GoalAssignment ga =
        assign_goal(i, states[i].plan, {{i, states[i].position}});
    states[i].goal = ga.goal;
    states[i].goal_index = ga.index;
  }

  auto record_frame = [&](int round, const std::vector<AdoptionEvent>& adoptions,
                          const std::vector<MotionReport>& motion, double wall_ms) {
    Frame f;
    f.round = round;
    f.my_indices = my_indices;
    for (const RobotState& s : states) {
      f.positions.push_back(s.position);
      f.plan_origins.push_back(s.plan.origin_id);
      f.goals.push_back(s.goal);
      f.goal_indices.push_back(s.goal_index);
      f.influences.push_back(s.influence);
      f.neighbors.push_back(s.neighbor_ids);
    }
    f.adoptions = adoptions;
    f.motion = motion;
    const ErrorPair err = shape_error(f.positions, states, target, correspondence);
    f.error_mean_dist = err.mean_dist;
    f.error_mean_sq = err.mean_sq;
    f.agreement = plan_agreement(states);
    f.wall_ms = wall_ms;
    rec.error_dist_curve.push_back(f.error_mean_dist);
    rec.error_sq_curve.push_back(f.error_mean_sq);
    rec.agreement_curve.push_back(f.agreement);
    rec.frames.push_back(std::move(f));
  };

  // Round 0: no consensus or motion yet, but the topology is observable.
  {
    const CommGraph g0 = build_graph(positions, task.comm_range);
    for (int i = 0; i < n; ++i) {
      states[i].neighbor_ids = g0.neighbors(i);
      states[i].influence = influence(g0, i);
    }
    record_frame(0, {}, {}, 0.0);
  }

  for (int round = 1; round <= config.max_rounds; ++round) {
    const auto t0 = std::chrono::steady_clock::now();

    const CommGraph graph = build_graph(positions, task.comm_range);
    for (int i = 0; i < n; ++i) {
      states[i].neighbor_ids = graph.neighbors(i);
      states[i].influence = influence(graph, i);
    }

    std::vector<AdoptionEvent> adoptions;
    if (config.consensus_enabled) {
      auto [next, log] = consensus_round(states, graph, consensus_opts);
      states = std::move(next);
      adoptions = std::move(log);
    }

    // Planner stage: all waypoints decided from round-start positions.
    std::vector<Vec2> waypoints(n);
    std::vector<std::vector<Vec2>> neighbor_positions(n);
    for (int i = 0; i < n; ++i) {
      for (int j : graph.neighbors(i)) neighbor_positions[i].push_back(positions[j]);
      StepContext ctx{positions[i], neighbor_positions[i], states[i].plan,
                      states[i].goal, task};
      const PlannerKind kind = kind_of(i);
      if (kind == PlannerKind::llm) {
        try {
          bool used_fallback = false;
          waypoints[i] = sessions[i]->propose_step(ctx, used_fallback);
          if (used_fallback) ++rec.llm_fallbacks;
        } catch (const LlmTransportError& e) {
          rec.failed = true;
          rec.failure_reason = std::string("planner-unavailable: ") + e.what();
          sync_llm_counters();
          return rec;
        }
      } else {
        waypoints[i] = propose_step(kind, ctx);
      }
    }

    // Motion stage: simultaneous application against round-start snapshots.
    std::vector<MotionReport> reports(n);
    std::vector<Vec2> new_positions(n);
    for (int i = 0; i < n; ++i) {
      auto [pos, report] = apply_step(states[i], waypoints[i], neighbor_positions[i], task);
      new_positions[i] = pos;
      reports[i] = report;
    }
    for (int i = 0; i < n; ++i) {
      positions[i] = new_positions[i];
      states[i].position = new_positions[i];
    }

    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    record_frame(round, adoptions, reports, wall_ms);

    // Stop once the error has stayed under epsilon for a full window and,
    // with consensus on, the team agrees on one plan.
    const auto& curve = rec.error_dist_curve;
    if (static_cast<int>(curve.size()) >= config.window) {
      bool settled = true;
      for (int k = 0; k < config.window; ++k) {
        if (!(curve[curve.size() - 1 - k] <= config.epsilon)) {
          settled = false;
          break;
        }
      }
      const bool agreed =
          !config.consensus_enabled || rec.agreement_curve.back() == 1.0;
      if (settled && agreed) break;
    }
  }

  rec.convergence_round = converged(rec.error_dist_curve, config.epsilon, config.window);
  sync_llm_counters();
  return rec;
}

BatchResult run_batch(const RunConfig& config) {
  config.validate();
  BatchResult result;
  for (std::uint64_t seed : config.seeds) {
    try {
      result.records.push_back(run_trial(config, seed));
    } catch (const PlacementError& e) {
      TrialRecord rec;
      rec.seed = seed;
      rec.failed = true;
      rec.failure_reason = e.what();
      result.records.push_back(std::move(rec));
    }
  }
  result.summary = summarize(result.records);
  return result;
}

BatchSummary summarize(const std::vector<TrialRecord>& records) {
  BatchSummary s;
  s.trials = static_cast<int>(records.size());
  std::vector<const TrialRecord*> ok;
  for (const TrialRecord& r : records) {
    if (r.failed) {
      ++s.failed_trials;
    } else if (!r.frames.empty()) {
      ok.push_back(&r);
    }
  }
  double conv_sum = 0.0;
  for (const TrialRecord* r : ok) {
    if (r->convergence_round) {
      ++s.converged_trials;
      conv_sum += *r->convergence_round;
    }
  }
  s.mean_convergence_round =
      s.converged_trials > 0 ? conv_sum / s.converged_trials : 0.0;

  std::size_t longest = 0;
  for (const TrialRecord* r : ok) longest = std::max(longest, r->error_dist_curve.size());
  for (std::size_t round = 0; round < longest; ++round) {
    double sum = 0.0, sum_agree = 0.0;
    std::vector<double> vals;
    for (const TrialRecord* r : ok) {
      // A trial that stopped early stays at its final value: it terminated
      // because it had settled.
      const auto& curve = r->error_dist_curve;
      const double v = curve[std::min(round, curve.size() - 1)];
      vals.push_back(v);
      sum += v;
      const auto& ag = r->agreement_curve;
      sum_agree += ag[std::min(round, ag.size() - 1)];
    }
    const int m = static_cast<int>(vals.size());
    const double mean = m > 0 ? sum / m : 0.0;
    double hw = 0.0;
    if (m > 1) {
      double ss = 0.0;
      for (double v : vals) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / (m - 1));
      hw = 1.96 * sd / std::sqrt(static_cast<double>(m));
    }
    s.mean_error_dist.push_back(mean);
    s.ci95_half_width.push_back(hw);
    s.mean_agreement.push_back(m > 0 ? sum_agree / m : 0.0);
  }
  return s;
}

namespace {

json vec_to_json(Vec2 v) { return json::array({v.x, v.y}); }
Vec2 vec_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json frame_to_json(const Frame& f) {
  json j;
  j["round"] = f.round;
  j["positions"] = json::array();
  for (Vec2 p : f.positions) j["positions"].push_back(vec_to_json(p));
  j["plan_origins"] = f.plan_origins;
  j["my_indices"] = f.my_indices;
  j["goals"] = json::array();
  for (Vec2 g : f.goals) j["goals"].push_back(vec_to_json(g));
  j["goal_indices"] = f.goal_indices;
  j["influences"] = f.influences;
  j["neighbors"] = f.neighbors;
  j["adoptions"] = json::array();
  for (const AdoptionEvent& a : f.adoptions)
    j["adoptions"].push_back({{"robot", a.robot_id}, {"from", a.adopted_from}});
  j["motion"] = json::array();
  for (const MotionReport& m : f.motion) {
    j["motion"].push_back({{"robot", m.robot_id},
                           {"requested", vec_to_json(m.requested)},
                           {"applied", vec_to_json(m.applied)},
                           {"clamped_speed", m.clamped_speed},
                           {"safety_hold", m.safety_hold},
                           {"rejected", m.rejected_nonfinite}});
  }
  j["error_mean_dist"] = f.error_mean_dist;
  j["error_mean_sq"] = f.error_mean_sq;
  j["agreement"] = f.agreement;
  j["wall_ms"] = f.wall_ms;
  return j;
}

Frame frame_from_json(const json& j) {
  Frame f;
  f.round = j.at("round").get<int>();
  for (const auto& p : j.at("positions")) f.positions.push_back(vec_from_json(p));
  f.plan_origins = j.at("plan_origins").get<std::vector<int>>();
  f.my_indices = j.at("my_indices").get<std::vector<int>>();
  for (const auto& g : j.at("goals")) f.goals.push_back(vec_from_json(g));
  f.goal_indices = j.at("goal_indices").get<std::vector<int>>();
  f.influences = j.at("influences").get<std::vector<double>>();
  f.neighbors = j.at("neighbors").get<std::vector<std::vector<int>>>();
  for (const auto& a : j.at("adoptions"))
    f.adoptions.push_back({a.at("robot").get<int>(), a.at("from").get<int>()});
  for (const auto& m : j.at("motion")) {
    MotionReport r;
    r.robot_id = m.at("robot").get<int>();
    r.requested = vec_from_json(m.at("requested"));
    r.applied = vec_from_json(m.at("applied"));
    r.clamped_speed = m.at("clamped_speed").get<bool>();
    r.safety_hold = m.at("safety_hold").get<bool>();
    r.rejected_nonfinite = m.at("rejected").get<bool>();
    f.motion.push_back(std::move(r));
  }
  f.error_mean_dist = j.at("error_mean_dist").get<double>();
  f.error_mean_sq = j.at("error_mean_sq").get<double>();
  f.agreement = j.at("agreement").get<double>();
  f.wall_ms = j.at("wall_ms").get<double>();
  return f;
}

void write_curves_csv(const TrialRecord& rec, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "round,error_mean_dist,error_mean_sq,agreement\n";
  for (std::size_t r = 0; r < rec.error_dist_curve.size(); ++r) {
    out << r << "," << format_double(rec.error_dist_curve[r]) << ","
        << format_double(rec.error_sq_curve[r]) << ","
        << format_double(rec.agreement_curve[r]) << "\n";
  }
}

}  // namespace

void export_trial(const TrialRecord& record, const fs::path& directory,
                  const RunConfig& config) {
  fs::create_directories(directory);
  {
    std::ofstream out(directory / "frames.jsonl", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (directory / "frames.jsonl").string());
    json meta;
    meta["seed"] = record.seed;
    if (record.convergence_round)
      meta["convergence_round"] = *record.convergence_round;
    else
      meta["convergence_round"] = nullptr;
    meta["failed"] = record.failed;
    meta["failure_reason"] = record.failure_reason;
    meta["llm_replies"] = record.llm_replies;
    meta["llm_fallbacks"] = record.llm_fallbacks;
    out << meta.dump() << "\n";
    for (const Frame& f : record.frames) out << frame_to_json(f).dump() << "\n";
  }
  write_curves_csv(record, directory / "curves.csv");
  if (config.export_svg) {
    fs::create_directories(directory / "frames");
    for (const Frame& f : record.frames) {
      FrameView view{f.round, f.positions, f.plan_origins, f.goals, f.influences};
      std::ofstream svg(directory / "frames" / (std::to_string(f.round) + ".svg"),
                        std::ios::binary);
      svg << render_frame_svg(view, config.task);
    }
  }
}

TrialRecord import_trial(const fs::path& frames_jsonl) {
  std::ifstream in(frames_jsonl);
  if (!in) throw std::runtime_error("cannot read " + frames_jsonl.string());
  TrialRecord rec;
  std::string line;
  bool have_meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    if (!have_meta) {
      rec.seed = j.at("seed").get<std::uint64_t>();
      if (!j.at("convergence_round").is_null())
        rec.convergence_round = j.at("convergence_round").get<int>();
      rec.failed = j.at("failed").get<bool>();
      rec.failure_reason = j.at("failure_reason").get<std::string>();
      rec.llm_replies = j.at("llm_replies").get<int>();
      rec.llm_fallbacks = j.at("llm_fallbacks").get<int>();
      have_meta = true;
      continue;
    }
    Frame f = frame_from_json(j);
    rec.error_dist_curve.push_back(f.error_mean_dist);
    rec.error_sq_curve.push_back(f.error_mean_sq);
    rec.agreement_curve.push_back(f.agreement);
    rec.frames.push_back(std::move(f));
  }
  if (!have_meta) throw std::runtime_error("empty trial file: " + frames_jsonl.string());
  return rec;
}

void export_batch(const BatchResult& result, const RunConfig& config,
                  const fs::path& out_dir) {
  fs::create_directories(out_dir);

  {
    std::ofstream cfg(out_dir / "config.cfg", std::ios::binary);
    cfg << serialize_config(config);
  }

  std::map<std::uint64_t, int> seen;
  std::ofstream summary(out_dir / "summary.csv", std::ios::binary);
  summary << "seed,frames,converged,convergence_round,final_error_mean_dist,"
             "final_error_mean_sq,final_agreement,failed,llm_replies,llm_fallbacks\n";
  for (const TrialRecord& rec : result.records) {
    std::string dir_name = std::to_string(rec.seed);
    const int dup = seen[rec.seed]++;
    if (dup > 0) dir_name += "_" + std::to_string(dup);
    export_trial(rec, out_dir / dir_name, config);

    summary << rec.seed << "," << rec.frames.size() << ","
            << (rec.convergence_round ? "true" : "false") << ",";
    if (rec.convergence_round) summary << *rec.convergence_round;
    summary << ",";
    summary << (rec.error_dist_curve.empty() ? ""
                                             : format_double(rec.error_dist_curve.back()))
            << ",";
    summary << (rec.error_sq_curve.empty() ? ""
                                           : format_double(rec.error_sq_curve.back()))
            << ",";
    summary << (rec.agreement_curve.empty() ? ""
                                            : format_double(rec.agreement_curve.back()))
            << ",";
    summary << (rec.failed ? "true" : "false") << "," << rec.llm_replies << ","
            << rec.llm_fallbacks << "\n";
  }

  std::ofstream agg(out_dir / "aggregate.csv", std::ios::binary);
  agg << "round,mean_error_mean_dist,ci95_half_width,mean_agreement\n";
  for (std::size_t r = 0; r < result.summary.mean_error_dist.size(); ++r) {
    agg << r << "," << format_double(result.summary.mean_error_dist[r]) << ","
        << format_double(result.summary.ci95_half_width[r]) << ","
        << format_double(result.summary.mean_agreement[r]) << "\n";
  }
}

}  // namespace flocksim
