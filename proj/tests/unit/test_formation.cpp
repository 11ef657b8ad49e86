#include <doctest.h>

#include <cmath>

#include "flocksim/formation.hpp"
#include "flocksim/metrics.hpp"

using namespace flocksim;

namespace {

Vec2 centroid_of(const std::vector<Vec2>& pts) {
  Vec2 c{};
  for (Vec2 p : pts) c += p;
  return c * (1.0 / pts.size());
}

}  // namespace

TEST_CASE("triangle of three matches the worked trace") {
  const auto pts = generate_formation({Shape::triangle, 3, {50, 50}, 10});
  REQUIRE(pts.size() == 3);
  CHECK(std::abs(pts[0].x - 55.77) < 0.01);
  CHECK(std::abs(pts[0].y - 50.0) < 0.01);
  CHECK(std::abs(pts[1].x - 47.11) < 0.01);
  CHECK(std::abs(pts[1].y - 55.0) < 0.01);
  CHECK(std::abs(pts[2].x - 47.11) < 0.01);
  CHECK(std::abs(pts[2].y - 45.0) < 0.01);
  // Equilateral with side 10.
  for (int i = 0; i < 3; ++i)
    CHECK(distance(pts[i], pts[(i + 1) % 3]) == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(formation_radius({Shape::triangle, 3, {50, 50}, 10}) ==
        doctest::Approx(10.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("circle spacing follows the chord formula") {
  const ShapeTemplate t{Shape::circle, 10, {50, 50}, 10};
  const auto pts = generate_formation(t);
  REQUIRE(pts.size() == 10);
  const double expected_radius = 10.0 / (2.0 * std::sin(M_PI / 10.0));
  CHECK(expected_radius == doctest::Approx(16.1803).epsilon(1e-4));
  for (const Vec2& p : pts)
    CHECK(distance(p, t.center) == doctest::Approx(expected_radius).epsilon(1e-12));
  // Adjacent chords realize the desired distance; verified by measuring.
  for (int i = 0; i < 10; ++i)
    CHECK(distance(pts[i], pts[(i + 1) % 10]) == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(formation_radius(t) == doctest::Approx(expected_radius).epsilon(1e-12));
}

TEST_CASE("square of four is axis-aligned with side d") {
  const auto pts = generate_formation({Shape::square, 4, {0, 0}, 10});
  REQUIRE(pts.size() == 4);
  for (const Vec2& p : pts) {
    CHECK(std::abs(std::abs(p.x) - 5.0) < 1e-12);
    CHECK(std::abs(std::abs(p.y) - 5.0) < 1e-12);
  }
  const Vec2 c = centroid_of(pts);
  CHECK(c.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.y == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("square of eight walks the perimeter with spacing d") {
  const auto pts = generate_formation({Shape::square, 8, {50, 50}, 10});
  REQUIRE(pts.size() == 8);
  for (int i = 0; i < 8; ++i)
    CHECK(distance(pts[i], pts[(i + 1) % 8]) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(formation_radius({Shape::square, 8, {50, 50}, 10}) ==
        doctest::Approx(10.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("triangle of six interleaves vertices and midpoints") {
  const auto pts = generate_formation({Shape::triangle, 6, {50, 50}, 10});
  REQUIRE(pts.size() == 6);
  for (int i = 0; i < 6; ++i)
    CHECK(distance(pts[i], pts[(i + 1) % 6]) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("cross of five places center plus four arms") {
  const auto pts = generate_formation({Shape::cross, 5, {50, 50}, 10});
  REQUIRE(pts.size() == 5);
  CHECK(distance(pts[0], {50, 50}) == doctest::Approx(0.0));
  for (int i = 1; i < 5; ++i)
    CHECK(distance(pts[i], {50, 50}) == doctest::Approx(10.0));
  CHECK(formation_radius({Shape::cross, 5, {50, 50}, 10}) == doctest::Approx(10.0));
}

TEST_CASE("every supported formation is centered on the template center") {
  const std::vector<ShapeTemplate> cases = {
      {Shape::triangle, 3, {50, 50}, 10}, {Shape::triangle, 6, {20, 80}, 7},
      {Shape::square, 4, {50, 50}, 10},   {Shape::square, 8, {60, 40}, 5},
      {Shape::circle, 3, {50, 50}, 10},   {Shape::circle, 10, {50, 50}, 10},
      {Shape::circle, 17, {30, 30}, 4},   {Shape::cross, 5, {50, 50}, 12},
  };
  for (const auto& t : cases) {
    const Vec2 c = centroid_of(generate_formation(t));
    CHECK(std::abs(c.x - t.center.x) < 1e-9);
    CHECK(std::abs(c.y - t.center.y) < 1e-9);
  }
}

TEST_CASE("degenerate distance collapses to the center") {
  CHECK(formation_radius({Shape::triangle, 3, {50, 50}, 0}) == doctest::Approx(0.0));
  CHECK(formation_radius({Shape::circle, 8, {50, 50}, 0}) == doctest::Approx(0.0));
  CHECK(formation_radius({Shape::cross, 5, {50, 50}, 0}) == doctest::Approx(0.0));
}

TEST_CASE("unsupported combinations are rejected") {
  CHECK_THROWS_AS(generate_formation({Shape::triangle, 4, {50, 50}, 10}), ConfigError);
  CHECK_THROWS_AS(generate_formation({Shape::square, 5, {50, 50}, 10}), ConfigError);
  CHECK_THROWS_AS(generate_formation({Shape::circle, 2, {50, 50}, 10}), ConfigError);
  CHECK_THROWS_AS(generate_formation({Shape::cross, 4, {50, 50}, 10}), ConfigError);
  CHECK(formation_supported(Shape::triangle, 6));
  CHECK_FALSE(formation_supported(Shape::cross, 6));
}

TEST_CASE("rotated formations align back with negligible error") {
  // Cross-module property: rotating any formation about its center is
  // invisible to the alignment metric.
  const std::vector<ShapeTemplate> cases = {
      {Shape::triangle, 3, {50, 50}, 10},
      {Shape::square, 8, {50, 50}, 10},
      {Shape::circle, 10, {50, 50}, 10},
  };
  for (const auto& t : cases) {
    const auto pts = generate_formation(t);
    for (double angle : {0.3, 1.7, 4.4}) {
      std::vector<Vec2> rotated;
      for (Vec2 p : pts) rotated.push_back(rotate_about(p, t.center, angle));
      const AlignmentResult res = procrustes_align(rotated, pts);
      CHECK(res.error_mean_dist < 1e-9);
      CHECK(res.error_mean_sq < 1e-9);
    }
  }
}
