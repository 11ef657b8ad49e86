#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "flocksim/config.hpp"
#include "flocksim/formation.hpp"
#include "flocksim/harness.hpp"
#include "flocksim/metrics.hpp"
#include "flocksim/planner.hpp"
#include "flocksim/svg.hpp"

namespace fs = std::filesystem;
using namespace flocksim;

namespace {

struct CliOverrides {
  std::string config_path;
  std::string shape;
  int robots = 0;
  std::vector<double> center;
  double distance = 0.0, safe_distance = 0.0, speed = 0.0, comm_range = 0.0;
  std::string planner;
  bool no_consensus = false, tie_break = false, conflict_plans = false, svg = false;
  std::string tie_rule, goal_cohort;
  int max_rounds = 0;
  std::uint64_t seed = 0;
  int seed_count = 0;
  double epsilon = 0.0;
  int window = 0;
  std::string match;
  std::string out = "out";
  std::string llm_base_url, llm_model;
};

// Register the shared run/batch flags on a subcommand. Flag values override
// config-file values; the CLI11 count() check keeps untouched flags from
// clobbering the file.
void add_run_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "run configuration file");
  cmd->add_option("--shape", o.shape, "formation shape: triangle|square|circle|cross");
  cmd->add_option("--robots", o.robots, "team size");
  cmd->add_option("--center", o.center, "formation center, two values (default 50 50)")->expected(2);
  cmd->add_option("--distance", o.distance, "desired inter-robot distance (default 10)");
  cmd->add_option("--safe-distance", o.safe_distance, "minimum safe distance (default 3)");
  cmd->add_option("--speed", o.speed, "max displacement per round (default 6)");
  cmd->add_option("--comm-range", o.comm_range, "communication range (default 15)");
  cmd->add_option("--planner", o.planner,
                  "oracle|llm|fault_distorted_plan|fault_overshoot");
  cmd->add_flag("--no-consensus", o.no_consensus,
                "baseline mode: robots keep their initial plans");
  cmd->add_flag("--tie-break", o.tie_break,
                "influence ties: adopt from the lower-id best neighbor");
  cmd->add_option("--tie-rule", o.tie_rule,
                  "influence-tie policy: strict|neighbor_id|origin_id (default origin_id)");
  cmd->add_option("--goal-cohort", o.goal_cohort,
                  "goal-claim cohort: one_hop|component (default component)");
  cmd->add_flag("--conflict-plans", o.conflict_plans,
                "give each robot a rotated copy of the canonical plan");
  cmd->add_option("--max-rounds", o.max_rounds, "round budget per trial (default 30)");
  cmd->add_option("--seed", o.seed, "base seed (default 1)");
  cmd->add_option("--seeds", o.seed_count, "number of consecutive seeds to run (default 1)");
  cmd->add_option("--epsilon", o.epsilon, "convergence error threshold (default 0.5)");
  cmd->add_option("--window", o.window, "rounds the error must stay converged (default 3)");
  cmd->add_option("--match", o.match, "error correspondence: auto|goal_index|greedy (default auto)");
  cmd->add_flag("--svg", o.svg, "render one SVG per frame");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--llm-base-url", o.llm_base_url, "chat-completions endpoint base URL");
  cmd->add_option("--llm-model", o.llm_model, "model name for the llm planner");
}

RunConfig build_config(const CLI::App* cmd, const CliOverrides& o, bool batch_mode) {
  RunConfig config;
  if (cmd->count("--config")) config = load_config_file(o.config_path);

  if (cmd->count("--shape")) {
    const auto s = parse_shape(o.shape);
    if (!s) throw ConfigError("unknown shape: " + o.shape);
    config.task.shape = *s;
  }
  if (cmd->count("--robots")) config.task.team_size = o.robots;
  if (cmd->count("--center")) config.task.center = {o.center[0], o.center[1]};
  if (cmd->count("--distance")) config.task.desired_distance = o.distance;
  if (cmd->count("--safe-distance")) config.task.safe_distance = o.safe_distance;
  if (cmd->count("--speed")) config.task.max_speed = o.speed;
  if (cmd->count("--comm-range")) config.task.comm_range = o.comm_range;
  if (cmd->count("--planner")) {
    const auto k = parse_planner_kind(o.planner);
    if (!k) throw ConfigError("unknown planner: " + o.planner);
    config.planner = *k;
  }
  if (cmd->count("--no-consensus")) config.consensus_enabled = false;
  if (cmd->count("--tie-break")) config.tie_rule = TieRule::neighbor_id;
  if (cmd->count("--tie-rule")) {
    const auto t = parse_tie_rule(o.tie_rule);
    if (!t) throw ConfigError("unknown tie rule: " + o.tie_rule);
    config.tie_rule = *t;
  }
  if (cmd->count("--goal-cohort")) {
    const auto c = parse_goal_cohort(o.goal_cohort);
    if (!c) throw ConfigError("unknown goal cohort: " + o.goal_cohort);
    config.goal_cohort = *c;
  }
  if (cmd->count("--conflict-plans")) config.conflicting_plans = true;
  if (cmd->count("--max-rounds")) config.max_rounds = o.max_rounds;
  if (cmd->count("--epsilon")) config.epsilon = o.epsilon;
  if (cmd->count("--window")) config.window = o.window;
  if (cmd->count("--match")) {
    const auto c = parse_correspondence(o.match);
    if (!c) throw ConfigError("unknown correspondence: " + o.match);
    config.correspondence = *c;
  }
  if (cmd->count("--svg")) config.export_svg = true;

  if (cmd->count("--seed") || cmd->count("--seeds")) {
    const std::uint64_t base = cmd->count("--seed") ? o.seed : 1;
    const int count =
        cmd->count("--seeds") ? std::max(o.seed_count, 1) : (batch_mode ? 1 : 1);
    config.seeds.clear();
    for (int i = 0; i < count; ++i) config.seeds.push_back(base + i);
  } else if (!batch_mode) {
    config.seeds.resize(1);
  }

  if (cmd->count("--llm-base-url") || cmd->count("--llm-model")) {
    LlmConfig llm = config.llm.value_or(LlmConfig{});
    if (cmd->count("--llm-base-url")) llm.base_url = o.llm_base_url;
    if (cmd->count("--llm-model")) llm.model = o.llm_model;
    config.llm = llm;
  }
  return config;
}

void log_trial_events(const TrialRecord& rec) {
  for (const Frame& f : rec.frames) {
    for (const AdoptionEvent& a : f.adoptions)
      std::cerr << "round=" << f.round << " robot=" << a.robot_id
                << " event=adopt from=" << a.adopted_from << "\n";
    for (const MotionReport& m : f.motion) {
      if (m.safety_hold)
        std::cerr << "round=" << f.round << " robot=" << m.robot_id
                  << " event=safety_hold\n";
      if (m.rejected_nonfinite)
        std::cerr << "round=" << f.round << " robot=" << m.robot_id
                  << " event=rejected_waypoint\n";
    }
  }
  if (rec.failed)
    std::cerr << "event=trial_failed reason=\"" << rec.failure_reason << "\"\n";
  else if (rec.convergence_round)
    std::cerr << "event=converged round=" << *rec.convergence_round << "\n";
  else
    std::cerr << "event=not_converged rounds=" << rec.frames.size() - 1 << "\n";
}

std::vector<Vec2> load_points_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open point file: " + path.string());
  std::vector<Vec2> pts;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0.0, y = 0.0;
    if (row >> x >> y) pts.push_back({x, y});
  }
  if (pts.empty()) throw ConfigError("no points parsed from " + path.string());
  return pts;
}

int cmd_run(const CLI::App* cmd, const CliOverrides& o) {
  RunConfig config = build_config(cmd, o, false);
  config.validate();
  const std::uint64_t seed = config.seeds.front();
  TrialRecord rec = run_trial(config, seed);
  log_trial_events(rec);

  BatchResult result;
  result.records.push_back(std::move(rec));
  result.summary = summarize(result.records);
  export_batch(result, config, o.out);

  const TrialRecord& r = result.records.front();
  std::cout << "seed " << seed << ": " << r.frames.size() << " frames, final error "
            << (r.error_dist_curve.empty() ? std::string("n/a")
                                           : format_double(r.error_dist_curve.back()))
            << ", agreement "
            << (r.agreement_curve.empty() ? std::string("n/a")
                                          : format_double(r.agreement_curve.back()))
            << (r.convergence_round
                    ? ", converged at round " + std::to_string(*r.convergence_round)
                    : ", not converged")
            << "\n";
  std::cout << "wrote " << (fs::path(o.out) / std::to_string(seed)).string() << "\n";
  return r.failed ? 2 : 0;
}

int cmd_batch(const CLI::App* cmd, const CliOverrides& o) {
  RunConfig config = build_config(cmd, o, true);
  config.validate();
  BatchResult result = run_batch(config);
  export_batch(result, config, o.out);

  const BatchSummary& s = result.summary;
  std::cout << "trials: " << s.trials << " (" << s.failed_trials << " failed)\n";
  std::cout << "converged: " << s.converged_trials << "/" << s.trials;
  if (s.converged_trials > 0)
    std::cout << ", mean convergence round " << format_double(s.mean_convergence_round);
  std::cout << "\n";
  if (!s.mean_error_dist.empty())
    std::cout << "final mean error: " << format_double(s.mean_error_dist.back())
              << " (ci95 " << format_double(s.ci95_half_width.back()) << ")\n";
  std::cout << "wrote " << o.out << "/summary.csv\n";
  return 0;
}

int cmd_align(const std::string& actual_path, const std::string& target_path) {
  const auto actual = load_points_csv(actual_path);
  const auto target = load_points_csv(target_path);
  const AlignmentResult res = procrustes_align(actual, target);
  std::cout << "points: " << actual.size() << "\n";
  std::cout << "actual centroid: " << format_vec(res.actual_centroid) << "\n";
  std::cout << "target centroid: " << format_vec(res.target_centroid) << "\n";
  const double angle = std::atan2(res.rotation.c, res.rotation.a);
  std::cout << "rotation: " << format_double(angle * 180.0 / 3.14159265358979323846)
            << " deg, det " << format_double(res.rotation.det()) << "\n";
  std::cout << "reflection_corrected: " << (res.reflection_corrected ? "true" : "false")
            << "\n";
  std::cout << "error_mean_dist: " << format_double(res.error_mean_dist) << "\n";
  std::cout << "error_mean_sq: " << format_double(res.error_mean_sq) << "\n";
  return 0;
}

int cmd_render(const CLI::App* cmd, const CliOverrides& o, const std::string& frames_path) {
  RunConfig config = build_config(cmd, o, false);
  const TrialRecord rec = import_trial(frames_path);
  fs::create_directories(fs::path(o.out));
  for (const Frame& f : rec.frames) {
    FrameView view{f.round, f.positions, f.plan_origins, f.goals, f.influences};
    std::ofstream svg(fs::path(o.out) / (std::to_string(f.round) + ".svg"),
                      std::ios::binary);
    svg << render_frame_svg(view, config.task);
  }
  std::cout << "wrote " << rec.frames.size() << " frames to " << o.out << "\n";
  return 0;
}

int cmd_prompts(const CLI::App* cmd, const CliOverrides& o) {
  RunConfig config = build_config(cmd, o, false);
  config.task.validate();
  fs::create_directories(fs::path(o.out));

  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(fs::path(o.out) / name, std::ios::binary);
    out << text;
  };
  write("system.txt", render_system_prompt(config.task));
  write("plan_request.txt", render_plan_request(config.task));

  // Fixed demonstration context so the emitted step request is reproducible.
  StepContext ctx;
  ctx.spec = config.task;
  ctx.self_position = {12.63, 70.48};
  ctx.neighbor_positions = {{22.67, 96.23}, {8.52, 24.74}};
  ctx.plan.origin_id = 0;
  ctx.plan.points = generate_formation({config.task.shape, config.task.team_size,
                                        config.task.center,
                                        config.task.desired_distance});
  ctx.goal = ctx.plan.points.front();
  write("step_request.txt", render_step_request(ctx));
  std::cout << "wrote prompt files to " << o.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flocksim: decentralized multi-robot formation simulator with "
               "influence-based plan consensus"};
  app.require_subcommand(1);

  CliOverrides run_o, batch_o, render_o, prompts_o;
  std::string align_a, align_b, frames_path;

  CLI::App* run = app.add_subcommand("run", "run a single seeded trial");
  add_run_flags(run, run_o);

  CLI::App* batch = app.add_subcommand("batch", "run a batch of seeded trials");
  add_run_flags(batch, batch_o);

  CLI::App* render = app.add_subcommand("render", "render a trial's frames to SVG");
  render->add_option("frames", frames_path, "frames.jsonl of a recorded trial")
      ->required();
  add_run_flags(render, render_o);

  CLI::App* align = app.add_subcommand("align", "Procrustes-align two point files");
  align->add_option("actual", align_a, "CSV of x,y points")->required();
  align->add_option("target", align_b, "CSV of x,y points")->required();

  CLI::App* prompts = app.add_subcommand("prompts", "emit the rendered message templates");
  add_run_flags(prompts, prompts_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(run, run_o);
    if (batch->parsed()) return cmd_batch(batch, batch_o);
    if (render->parsed()) return cmd_render(render, render_o, frames_path);
    if (align->parsed()) return cmd_align(align_a, align_b);
    if (prompts->parsed()) return cmd_prompts(prompts, prompts_o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
