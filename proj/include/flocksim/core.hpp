#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Shared domain types for the flocking simulator: 2D vectors, task
// parameters, robot state, formation plans, and deterministic randomness.

namespace flocksim {

// Thrown when a caller breaks a documented precondition.
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// Thrown when random placement cannot satisfy the pairwise spacing bound.
struct PlacementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown for invalid run configuration (bad shape/team-size combos, etc.).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  bool operator==(const Vec2&) const = default;

  double norm_sq() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Rotate `p` by `angle` radians counterclockwise about `pivot`.
inline Vec2 rotate_about(Vec2 p, Vec2 pivot, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Vec2 d = p - pivot;
  return {pivot.x + c * d.x - s * d.y, pivot.y + s * d.x + c * d.y};
}

enum class Shape { triangle, square, circle, cross };

std::string shape_name(Shape s);
std::optional<Shape> parse_shape(const std::string& name);

// Axis-aligned arena bounds. Robots never leave these.
struct Arena {
  Vec2 min{0.0, 0.0};
  Vec2 max{100.0, 100.0};

  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  Vec2 clamp(Vec2 p) const {
    return {std::clamp(p.x, min.x, max.x), std::clamp(p.y, min.y, max.y)};
  }
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
};

// Mission definition: what shape to form, where, and under which physical
// constraints. Defaults mirror the standard benchmark setup.
struct TaskSpec {
  Shape shape = Shape::triangle;
  Vec2 center{50.0, 50.0};
  double desired_distance = 10.0;  // target spacing between adjacent robots
  double safe_distance = 3.0;      // hard minimum pairwise spacing
  double max_speed = 6.0;          // per-round displacement cap
  double comm_range = 15.0;        // broadcast radius
  int team_size = 3;
  Arena arena{};

  // Throws ConfigError when any invariant is broken.
  void validate() const;
};

// One robot's full formation proposal: a target position for every robot,
// tagged with the id of the robot whose planner produced it.
struct FormationPlan {
  int origin_id = -1;
  std::vector<Vec2> points;

  int size() const { return static_cast<int>(points.size()); }
};

// Two plans are equal when they share an origin or when every corresponding
// point pair lies within `tol`. Origin tagging keeps adoption well-defined
// even when numerically perturbed copies of one plan circulate.
bool plan_equal(const FormationPlan& a, const FormationPlan& b, double tol = 1e-6);

struct RobotState {
  int id = -1;
  Vec2 position{};
  FormationPlan plan;
  Vec2 goal{};
  int goal_index = -1;  // index of `goal` within `plan.points`
  double influence = 0.0;
  std::vector<int> neighbor_ids;  // kept sorted; influence = size / N
};

// Deterministic 64-bit generator (xoshiro256++ seeded via splitmix64).
// Identical seeds produce identical draw sequences on every platform;
// std::mt19937 with std distributions would not guarantee that.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);

  // Independent generator for a named substream of this seed. Used to give
  // each robot its own draw sequence regardless of iteration order.
  SeededRng fork(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_[4];
};

// Draw `spec.team_size` arena-uniform positions with every pair at least
// `spec.safe_distance` apart (rejection sampling). Throws PlacementError
// after 10000 failed draws so degenerate arenas fail fast.
std::vector<Vec2> random_initial_positions(const TaskSpec& spec, SeededRng& rng);

// Shortest round-trip decimal rendering, shared by prompts and file output
// so identical runs serialize byte-identically.
std::string format_double(double v);
std::string format_vec(Vec2 v);
std::string format_points(const std::vector<Vec2>& pts);

}  // namespace flocksim
