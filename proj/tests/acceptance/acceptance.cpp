// End-to-end acceptance suite. Each numbered check prints one PASS/FAIL
// line; the binary exits nonzero if any check fails. The live-endpoint
// smoke test is manual and reported as SKIP (see README).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "flocksim/config.hpp"
#include "flocksim/consensus.hpp"
#include "flocksim/formation.hpp"
#include "flocksim/harness.hpp"
#include "flocksim/metrics.hpp"
#include "flocksim/planner.hpp"
#include "../support/consensus_oracle.hpp"
#include "../support/procrustes_oracle.hpp"

using namespace flocksim;
namespace fs = std::filesystem;

namespace {

struct CheckFailure {
  std::string message;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw CheckFailure{message};
}

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(FLOCK_FIXTURE_DIR) + "/" + name);
  require(in.good(), "missing fixture " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  require(in.good(), "cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool close(double value, double expected, double tol) {
  return std::abs(value - expected) <= tol;
}

TaskSpec benchmark_task(Shape shape, int team_size) {
  TaskSpec spec;  // benchmark defaults: d=10, safe=3, speed=6, range=15
  spec.shape = shape;
  spec.team_size = team_size;
  return spec;
}

RunConfig convergence_config(Shape shape, int team_size, bool consensus) {
  RunConfig config;
  config.task = benchmark_task(shape, team_size);
  config.planner = PlannerKind::oracle;
  config.conflicting_plans = true;
  config.consensus_enabled = consensus;
  config.max_rounds = 20;
  config.epsilon = 1.0;
  config.window = 1;
  config.seeds.clear();
  for (std::uint64_t s = 1; s <= 10; ++s) config.seeds.push_back(s);
  return config;
}

// Shared state between checks 8, 9 and 10.
struct ConvergenceRuns {
  std::vector<BatchResult> consensus;  // triangle, square, circle
  std::vector<BatchResult> baseline;
  std::vector<RunConfig> consensus_configs;
};

ConvergenceRuns run_convergence_batches() {
  ConvergenceRuns runs;
  const std::vector<std::pair<Shape, int>> shapes = {
      {Shape::triangle, 3}, {Shape::square, 8}, {Shape::circle, 10}};
  for (const auto& [shape, n] : shapes) {
    RunConfig on = convergence_config(shape, n, true);
    runs.consensus.push_back(run_batch(on));
    runs.consensus_configs.push_back(on);
    runs.baseline.push_back(run_batch(convergence_config(shape, n, false)));
  }
  return runs;
}

int hit_round(const TrialRecord& rec) {
  for (std::size_t r = 0; r < rec.frames.size(); ++r) {
    if (rec.error_dist_curve[r] <= 1.0 && rec.agreement_curve[r] == 1.0)
      return static_cast<int>(r);
  }
  return -1;
}

}  // namespace

int main() {
  int failures = 0;
  ConvergenceRuns runs;  // populated by check 8, reused by 9 and 10

  struct Check {
    int id;
    std::string name;
    std::function<std::string()> fn;  // returns detail text
  };

  std::vector<Check> checks;

  checks.push_back({1, "oracle plan reproduces the worked triangle plan", [] {
    SeededRng rng(1);
    const PlanResult pr =
        generate_plan(PlannerKind::oracle, 0, benchmark_task(Shape::triangle, 3), rng);
    const std::vector<Vec2> expected = {{55.77, 50}, {47.11, 55}, {47.11, 45}};
    require(pr.plan.size() == 3, "plan length");
    for (int i = 0; i < 3; ++i) {
      require(close(pr.plan.points[i].x, expected[i].x, 0.01),
              "x of point " + std::to_string(i));
      require(close(pr.plan.points[i].y, expected[i].y, 0.01),
              "y of point " + std::to_string(i));
    }
    return std::string("all coordinates within 0.01");
  }});

  checks.push_back({2, "oracle step reproduces the worked step", [] {
    StepContext ctx;
    ctx.spec = benchmark_task(Shape::triangle, 3);
    ctx.self_position = {12.63, 70.48};
    ctx.plan = {0, {{55.77, 50}, {47.11, 55}, {47.11, 45}}};
    ctx.goal = {55.77, 50};
    const Vec2 w = propose_step(PlannerKind::oracle, ctx);
    require(close(w.x, 18.05, 0.01) && close(w.y, 67.91, 0.01),
            "waypoint " + format_vec(w) + " != [18.05, 67.91] within 0.01");
    return "waypoint " + format_vec(w);
  }});

  checks.push_back({3, "overshoot trace and closed-loop divergence", [] {
    StepContext ctx;
    ctx.spec = benchmark_task(Shape::triangle, 3);
    ctx.self_position = {46.12, 42.29};
    ctx.neighbor_positions = {{56.8, 51.93}, {47.11, 55.0}};
    ctx.plan = {0, {{56.8, 51.93}, {47.11, 55.0}, {47.11, 45.0}}};
    ctx.goal = {47.11, 45.0};
    const Vec2 w = propose_step(PlannerKind::fault_overshoot, ctx);
    require(close(w.x, 48.18, 0.01) && close(w.y, 47.92, 0.01),
            "waypoint " + format_vec(w) + " != [48.18, 47.92] within 0.01");

    RunConfig config;
    config.task = benchmark_task(Shape::triangle, 3);
    config.max_rounds = 20;
    config.epsilon = 0.5;
    config.window = 3;
    config.planner = PlannerKind::fault_overshoot;
    const TrialRecord fault = run_trial(config, 42);
    config.planner = PlannerKind::oracle;
    const TrialRecord oracle = run_trial(config, 42);
    require(!fault.convergence_round.has_value(),
            "overshoot run unexpectedly converged");
    require(oracle.convergence_round.has_value(),
            "oracle run with the same seed failed to converge");
    return "waypoint " + format_vec(w) + "; oracle converged at round " +
           std::to_string(*oracle.convergence_round) + ", overshoot never";
  }});

  checks.push_back({4, "parsers reproduce the worked replies", [] {
    const auto plan = parse_plan_reply(read_fixture("reply_plan_triangle.txt"), 3);
    require(plan.result.has_value(), "plan reply did not parse");
    require(plan.result->my_index == 0, "index != 0");
    const std::vector<Vec2> expected = {{55.77, 50}, {47.11, 55}, {47.11, 45}};
    for (int i = 0; i < 3; ++i) {
      require(close(plan.result->plan.points[i].x, expected[i].x, 1e-9) &&
                  close(plan.result->plan.points[i].y, expected[i].y, 1e-9),
              "plan point " + std::to_string(i));
    }
    const auto step = parse_position_reply(read_fixture("reply_step_triangle.txt"));
    require(step.position.has_value(), "step reply did not parse");
    require(close(step.position->x, 18.05, 1e-9) && close(step.position->y, 67.91, 1e-9),
            "step position mismatch");
    const auto fault = parse_position_reply(read_fixture("reply_step_overshoot.txt"));
    require(fault.position.has_value(), "overshoot reply did not parse");
    require(close(fault.position->x, 48.18, 1e-9) &&
                close(fault.position->y, 47.92, 1e-9),
            "overshoot position mismatch");
    return std::string("plan, index, and both step positions extracted");
  }});

  checks.push_back({5, "consensus propagation: path, chain, exhaustive brute force", [] {
    using namespace testsupport;
    {
      auto states = make_states({1.0 / 3, 2.0 / 3, 1.0 / 3}, {{0, 0}, {10, 0}, {20, 0}});
      const auto graph = graph_from_adjacency({{1}, {0, 2}, {1}});
      const auto [next, log] = consensus_round(states, graph);
      require(next[0].plan.origin_id == 1 && next[2].plan.origin_id == 1 &&
                  next[1].plan.origin_id == 1 && log.size() == 2,
              "one-round path adoption failed");
    }
    // Ten robots on a static path, influences strictly increasing toward
    // robot 9 (the unique maximum). Diameter is 9 rounds.
    {
      std::vector<double> influences;
      std::vector<Vec2> positions;
      std::vector<std::vector<int>> adj(10);
      for (int i = 0; i < 10; ++i) {
        influences.push_back((i + 1.0) / 10.0);
        positions.push_back({i * 10.0, 0});
        if (i > 0) adj[i].push_back(i - 1);
        if (i + 1 < 10) adj[i].push_back(i + 1);
      }
      auto states = make_states(influences, positions);
      const auto graph = graph_from_adjacency(adj);
      for (int round = 0; round < 9; ++round)
        states = consensus_round(states, graph).first;
      for (const auto& s : states)
        require(s.plan.origin_id == 9, "plan did not reach robot " +
                                           std::to_string(s.id) +
                                           " within diameter rounds");
    }
    // Exhaustive: every connected graph on up to 5 nodes, random distinct
    // influence ranking, several rounds compared against the brute force.
    SeededRng rng(20240808);
    int cases = 0;
    for (int n = 2; n <= 5; ++n) {
      for (const auto& adj : connected_graphs(n)) {
        std::vector<int> ranks(n);
        for (int i = 0; i < n; ++i) ranks[i] = i;
        for (int i = n - 1; i > 0; --i)
          std::swap(ranks[i], ranks[rng.uniform_int(i + 1)]);
        std::vector<double> influences(n);
        for (int i = 0; i < n; ++i) influences[i] = (ranks[i] + 1.0) / n;
        std::vector<Vec2> positions;
        for (int i = 0; i < n; ++i) positions.push_back({i * 10.0, 0});
        auto states = make_states(influences, positions);
        const auto graph = graph_from_adjacency(adj);
        std::vector<int> origins(n);
        for (int i = 0; i < n; ++i) origins[i] = i;
        for (int round = 0; round < n; ++round) {
          const auto expected = brute_force_round(adj, influences, origins);
          states = consensus_round(states, graph).first;
          for (int i = 0; i < n; ++i)
            require(states[i].plan.origin_id == expected[i],
                    "brute-force mismatch on a graph with " + std::to_string(n) +
                        " nodes");
          origins = expected;
        }
        ++cases;
      }
    }
    require(cases >= 200, "only " + std::to_string(cases) + " graphs enumerated");
    return std::to_string(cases) + " connected graphs checked against brute force";
  }});

  checks.push_back({6, "influence-tie deadlock and tie-break recovery", [] {
    using namespace testsupport;
    const int n = 6;
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) adj[i].push_back(j);
    std::vector<Vec2> positions;
    for (int i = 0; i < n; ++i) positions.push_back({i * 5.0, 0});
    const auto graph = graph_from_adjacency(adj);
    const std::vector<double> influences(n, (n - 1.0) / n);

    auto states = make_states(influences, positions);
    for (int round = 0; round < 50; ++round) {
      const auto [next, log] = consensus_round(states, graph);
      require(log.empty(), "strict rule adopted on an influence tie");
      states = next;
    }
    require(plan_agreement(states) == 1.0 / n, "plans changed under the strict rule");

    ConsensusOptions opts;
    opts.tie_rule = TieRule::neighbor_id;
    states = make_states(influences, positions);
    int rounds = 0;
    while (plan_agreement(states) < 1.0 && rounds < 50) {
      states = consensus_round(states, graph, opts).first;
      ++rounds;
    }
    require(plan_agreement(states) == 1.0, "tie-break never unified the plans");
    return "0 adoptions in 50 strict rounds; tie-break agreement after " +
           std::to_string(rounds) + " round(s)";
  }});

  checks.push_back({7, "shape alignment properties and grid oracle", [] {
    const auto t0 = std::chrono::steady_clock::now();
    SeededRng rng(777);
    int grid_checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 3 + static_cast<int>(rng.uniform_int(10));
      std::vector<Vec2> x, y;
      for (int i = 0; i < n; ++i) {
        x.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
        y.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
      }
      const AlignmentResult base = procrustes_align(x, y);

      const Vec2 offset{rng.uniform(-40, 40), rng.uniform(-40, 40)};
      std::vector<Vec2> moved;
      for (Vec2 p : x) moved.push_back(p + offset);
      const AlignmentResult shifted = procrustes_align(moved, y);
      require(std::abs(shifted.error_mean_dist - base.error_mean_dist) < 1e-9 &&
                  std::abs(shifted.error_mean_sq - base.error_mean_sq) < 1e-9,
              "translation changed the error");

      const double angle = rng.uniform(0, 2 * M_PI);
      const Vec2 pivot{rng.uniform(0, 100), rng.uniform(0, 100)};
      std::vector<Vec2> rotated;
      for (Vec2 p : x) rotated.push_back(rotate_about(p, pivot, angle));
      const AlignmentResult rot = procrustes_align(rotated, y);
      require(std::abs(rot.error_mean_dist - base.error_mean_dist) < 1e-9 &&
                  std::abs(rot.error_mean_sq - base.error_mean_sq) < 1e-9,
              "rotation changed the error");

      require(base.error_mean_dist * base.error_mean_dist <=
                  base.error_mean_sq + 1e-12,
              "mean-distance squared exceeded mean squared error");

      // Mirror images of non-degenerate sets cannot align to zero.
      std::vector<Vec2> mirrored;
      for (Vec2 p : x) mirrored.push_back({-p.x, p.y});
      const AlignmentResult mir = procrustes_align(mirrored, x);
      require(mir.error_mean_sq > 1e-12 || !mir.reflection_corrected,
              "mirror aligned to zero error");

      if (trial % 10 == 0) {  // dense grid oracle on 100 instances
        const double oracle = testsupport::grid_min_mean_sq(x, y);
        require(std::abs(base.error_mean_sq - oracle) < 1e-3,
                "grid oracle disagreed by more than 1e-3");
        require(base.error_mean_sq <= oracle + 1e-9,
                "solver beaten by the grid oracle");
        ++grid_checked;
      }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(secs < 30.0, "criterion exceeded its 30 s budget");
    return "1000 property sets, " + std::to_string(grid_checked) +
           " grid-oracle instances in " + format_double(secs) + " s";
  }});

  checks.push_back({8, "deterministic convergence study beats its baseline", [&runs] {
    const auto t0 = std::chrono::steady_clock::now();
    runs = run_convergence_batches();
    const char* names[] = {"triangle/3", "square/8", "circle/10"};
    std::string detail;
    for (int s = 0; s < 3; ++s) {
      int hits = 0;
      for (const TrialRecord& rec : runs.consensus[s].records)
        if (hit_round(rec) >= 0) ++hits;
      require(hits >= 9, std::string(names[s]) + ": only " + std::to_string(hits) +
                             "/10 seeds converged with consensus on");

      double base_sum = 0.0, cons_sum = 0.0;
      for (const TrialRecord& rec : runs.baseline[s].records) {
        require(rec.agreement_curve.back() < 1.0,
                std::string(names[s]) + ": baseline trial reached full agreement");
        base_sum += rec.error_dist_curve.back();
      }
      for (const TrialRecord& rec : runs.consensus[s].records)
        cons_sum += rec.error_dist_curve.back();
      require(base_sum / 10.0 > cons_sum / 10.0,
              std::string(names[s]) + ": baseline error not strictly greater");
      detail += std::string(names[s]) + " " + std::to_string(hits) +
                "/10 (baseline err " + format_double(base_sum / 10.0) + " vs " +
                format_double(cons_sum / 10.0) + "); ";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(secs < 60.0, "criterion exceeded its 60 s budget");
    return detail + "in " + format_double(secs) + " s";
  }});

  checks.push_back({9, "engine safety audit over every recorded frame", [&runs] {
    require(!runs.consensus.empty(), "criterion 8 runs unavailable");
    long frames_audited = 0;
    auto audit = [&](const BatchResult& batch) {
      for (const TrialRecord& rec : batch.records) {
        for (std::size_t r = 1; r < rec.frames.size(); ++r) {
          const auto& prev = rec.frames[r - 1].positions;
          const auto& cur = rec.frames[r].positions;
          for (std::size_t i = 0; i < cur.size(); ++i) {
            require(distance(prev[i], cur[i]) <= 6.0 + 1e-9, "speed cap violated");
            for (std::size_t j = 0; j < prev.size(); ++j) {
              if (i == j) continue;
              if (distance(prev[i], prev[j]) >= 3.0)
                require(distance(cur[i], prev[j]) >= 3.0 - 1e-9,
                        "new safe-distance violation created by the engine");
            }
          }
          ++frames_audited;
        }
      }
    };
    for (const BatchResult& b : runs.consensus) audit(b);
    for (const BatchResult& b : runs.baseline) audit(b);
    return std::to_string(frames_audited) + " frames audited";
  }});

  checks.push_back({10, "re-running the study is byte-identical", [&runs] {
    require(!runs.consensus.empty(), "criterion 8 runs unavailable");
    const fs::path base = fs::temp_directory_path() / "flocksim_acceptance_repro";
    fs::remove_all(base);
    int files_compared = 0;
    for (std::size_t s = 0; s < runs.consensus_configs.size(); ++s) {
      const RunConfig& config = runs.consensus_configs[s];
      const BatchResult again = run_batch(config);
      export_batch(runs.consensus[s], config, base / ("first_" + std::to_string(s)));
      export_batch(again, config, base / ("second_" + std::to_string(s)));
      for (std::uint64_t seed : config.seeds) {
        const std::string a = slurp(base / ("first_" + std::to_string(s)) /
                                    std::to_string(seed) / "curves.csv");
        const std::string b = slurp(base / ("second_" + std::to_string(s)) /
                                    std::to_string(seed) / "curves.csv");
        require(a == b, "curves.csv differs for seed " + std::to_string(seed));
        ++files_compared;
      }
    }
    fs::remove_all(base);
    return std::to_string(files_compared) + " curve files byte-identical";
  }});

  checks.push_back({11, "prompt templates match their frozen golden files", [] {
    const TaskSpec spec = benchmark_task(Shape::triangle, 3);
    const std::string sys = read_fixture("prompts_triangle/system.txt");
    const std::string plan = read_fixture("prompts_triangle/plan_request.txt");
    const std::string step = read_fixture("prompts_triangle/step_request.txt");
    require(render_system_prompt(spec) == sys, "system prompt drifted from golden file");
    require(render_plan_request(spec) == plan, "plan request drifted from golden file");
    StepContext ctx;
    ctx.spec = spec;
    ctx.self_position = {12.63, 70.48};
    ctx.neighbor_positions = {{22.67, 96.23}, {8.52, 24.74}};
    ctx.plan.origin_id = 0;
    ctx.plan.points = generate_formation(
        {spec.shape, spec.team_size, spec.center, spec.desired_distance});
    ctx.goal = ctx.plan.points.front();
    require(render_step_request(ctx) == step, "step request drifted from golden file");
    require(sys.find("maintaining specific distance constraints") != std::string::npos,
            "system fixture lost its template phrase");
    require(plan.find("Please make a plan of the locations") != std::string::npos,
            "plan fixture lost its template phrase");
    require(step.find("Moving Neighbor Positions") != std::string::npos,
            "step fixture lost its template phrase");
    return std::string("three templates byte-identical, phrases present");
  }});

  for (const Check& check : checks) {
    try {
      const std::string detail = check.fn();
      std::printf("[PASS] criterion %2d: %s — %s\n", check.id, check.name.c_str(),
                  detail.c_str());
    } catch (const CheckFailure& f) {
      ++failures;
      std::printf("[FAIL] criterion %2d: %s — %s\n", check.id, check.name.c_str(),
                  f.message.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] criterion %2d: %s — unexpected error: %s\n", check.id,
                  check.name.c_str(), e.what());
    }
  }
  std::printf("[SKIP] criterion 12: live-endpoint smoke test (manual; run the CLI "
              "against a configured endpoint, see README)\n");

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all automated criteria passed\n");
  return 0;
}
