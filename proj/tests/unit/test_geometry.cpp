#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mobinfer/geometry.hpp"
#include "mobinfer/rng.hpp"

using namespace mobinfer;

namespace {

// Independent oracle: minimum distance over the 9 translated images of q.
double nine_image_distance(const Geometry& g, Vec2 p, Vec2 q) {
  double best = std::numeric_limits<double>::infinity();
  for (int ax = -1; ax <= 1; ++ax) {
    for (int ay = -1; ay <= 1; ++ay) {
      const Vec2 image{q.x + ax * g.width(), q.y + ay * g.height()};
      best = std::min(best, norm(image - p));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("plane distance is Euclidean") {
  const Geometry g = Geometry::plane();
  CHECK(g.distance({0, 0}, {3, 4}) == 5.0);
  CHECK(g.distance({1, 1}, {1, 1}) == 0.0);
}

TEST_CASE("torus distance wraps around the edges") {
  const Geometry g = Geometry::torus(1000, 1000);
  CHECK(g.distance({10, 10}, {990, 10}) == 20.0);
  CHECK(g.distance({10, 990}, {10, 5}) == 15.0);
}

TEST_CASE("torus distance equals the nine-image minimum") {
  const Geometry g = Geometry::torus(1000, 1000);
  // Frozen from the oracle below: both deltas wrap to 500, not 400.
  const double expected = 500.0 * std::numbers::sqrt2;
  CHECK(nine_image_distance(g, {100, 100}, {600, 600}) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(g.distance({100, 100}, {600, 600}) ==
        doctest::Approx(expected).epsilon(1e-12));

  SplitMix64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const Vec2 p{rng.uniform(0, 1000), rng.uniform(0, 1000)};
    const Vec2 q{rng.uniform(0, 1000), rng.uniform(0, 1000)};
    CHECK(g.distance(p, q) ==
          doctest::Approx(nine_image_distance(g, p, q)).epsilon(1e-12));
  }
}

TEST_CASE("torus displacement ties resolve toward the positive image") {
  const Geometry g = Geometry::torus(100, 100);
  CHECK(g.displacement({0, 0}, {50, 0}).x == 50.0);
  CHECK(g.displacement({50, 0}, {0, 0}).x == 50.0);  // -50 wraps to +50
  CHECK(g.displacement({0, 0}, {60, 0}).x == -40.0);
}

TEST_CASE("distance properties") {
  const Geometry torus = Geometry::torus(200, 120);
  const Geometry plane = Geometry::plane();
  const double bound = std::sqrt(100.0 * 100.0 + 60.0 * 60.0);

  SplitMix64 rng(99);
  for (int i = 0; i < 500; ++i) {
    const Vec2 p{rng.uniform(0, 200), rng.uniform(0, 120)};
    const Vec2 q{rng.uniform(0, 200), rng.uniform(0, 120)};
    const double d = torus.distance(p, q);
    CHECK(d >= 0.0);
    CHECK(d == torus.distance(q, p));
    CHECK(d <= plane.distance(p, q) + 1e-12);  // canonical representatives
    CHECK(d <= bound + 1e-12);
    if (p == q) CHECK(d == 0.0);
  }
  CHECK(torus.distance({5, 5}, {5, 5}) == 0.0);
  // equal canonical coordinates, distinct raw ones
  CHECK(torus.distance(torus.canonical({205, 5}), {5, 5}) == 0.0);
}

TEST_CASE("canonical wraps into the box") {
  const Geometry g = Geometry::torus(10, 10);
  SplitMix64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Vec2 c = g.canonical(p);
    CHECK(c.x >= 0.0);
    CHECK(c.x < 10.0);
    CHECK(c.y >= 0.0);
    CHECK(c.y < 10.0);
  }
  CHECK(g.canonical({-1e-300, 0}).x == 0.0);
  CHECK(g.canonical({10, 10}) == Vec2{0, 0});
}

TEST_CASE("degenerate torus dimensions are rejected") {
  CHECK_THROWS_AS(Geometry::torus(0, 10), ConfigError);
  CHECK_THROWS_AS(Geometry::torus(10, -1), ConfigError);
}
