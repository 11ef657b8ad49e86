#include "flocksim/core.hpp"

#include <algorithm>
#include <charconv>

namespace flocksim {

std::string shape_name(Shape s) {
  switch (s) {
    case Shape::triangle: return "triangle";
    case Shape::square: return "square";
    case Shape::circle: return "circle";
    case Shape::cross: return "cross";
  }
  return "unknown";
}

std::optional<Shape> parse_shape(const std::string& name) {
  if (name == "triangle") return Shape::triangle;
  if (name == "square") return Shape::square;
  if (name == "circle") return Shape::circle;
  if (name == "cross") return Shape::cross;
  return std::nullopt;
}

void TaskSpec::validate() const {
  if (!(safe_distance > 0.0 && safe_distance < desired_distance))
    throw ConfigError("task: require 0 < safe_distance < desired_distance");
  if (!(max_speed > 0.0)) throw ConfigError("task: max_speed must be positive");
  if (!(comm_range > 0.0)) throw ConfigError("task: comm_range must be positive");
  if (team_size < 2) throw ConfigError("task: team_size must be at least 2");
  if (!center.finite() || !arena.contains(center))
    throw ConfigError("task: center must lie within the arena");
  if (!(arena.max.x > arena.min.x && arena.max.y > arena.min.y))
    throw ConfigError("task: arena must have positive extent");
}

bool plan_equal(const FormationPlan& a, const FormationPlan& b, double tol) {
  if (a.size() != b.size())
    throw ContractError("plan_equal: plans have different lengths");
  if (a.origin_id >= 0 && a.origin_id == b.origin_id) return true;
  for (int i = 0; i < a.size(); ++i) {
    if (distance(a.points[i], b.points[i]) > tol) return false;
  }
  return true;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

}  // namespace

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& s : state_) s = splitmix64(sm);
}

std::uint64_t SeededRng::next_u64() {
  // xoshiro256++ step.
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double SeededRng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

std::uint64_t SeededRng::uniform_int(std::uint64_t n) {
  if (n == 0) throw ContractError("uniform_int: n must be positive");
  // Rejection to avoid modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
  std::uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % n;
}

SeededRng SeededRng::fork(std::uint64_t stream) const {
  std::uint64_t sm = seed_ ^ (0x6a09e667f3bcc909ull + stream * 0x9e3779b97f4a7c15ull);
  return SeededRng(splitmix64(sm));
}

std::vector<Vec2> random_initial_positions(const TaskSpec& spec, SeededRng& rng) {
  if (spec.team_size < 2)
    throw ContractError("random_initial_positions: team_size must be >= 2");
  constexpr int kMaxAttempts = 10000;
  std::vector<Vec2> out;
  out.reserve(spec.team_size);
  int attempts = 0;
  while (static_cast<int>(out.size()) < spec.team_size) {
    if (++attempts > kMaxAttempts)
      throw PlacementError(
          "random_initial_positions: could not place " + std::to_string(spec.team_size) +
          " robots at pairwise distance >= " + format_double(spec.safe_distance));
    Vec2 p{rng.uniform(spec.arena.min.x, spec.arena.max.x),
           rng.uniform(spec.arena.min.y, spec.arena.max.y)};
    bool ok = true;
    for (Vec2 q : out) {
      if (distance(p, q) < spec.safe_distance) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(p);
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_vec(Vec2 v) {
  return "[" + format_double(v.x) + ", " + format_double(v.y) + "]";
}

std::string format_points(const std::vector<Vec2>& pts) {
  std::string s = "[";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s += ", ";
    s += format_vec(pts[i]);
  }
  s += "]";
  return s;
}

}  // namespace flocksim
