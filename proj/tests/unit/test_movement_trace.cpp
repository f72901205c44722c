#include <doctest.h>

#include <sstream>

#include "mobinfer/movement_trace.hpp"
#include "mobinfer/rng.hpp"

using namespace mobinfer;

namespace {

MovementTrace line_trace(int frames, double step_per_frame, double dt = 1.0) {
  std::vector<Vec2> positions;
  for (int k = 0; k < frames; ++k) {
    positions.push_back({k * step_per_frame, 0.0});
  }
  return MovementTrace(1, dt, Geometry::plane(), std::move(positions));
}

}  // namespace

TEST_CASE("construction validates shape") {
  CHECK_THROWS_AS(MovementTrace(2, 1.0, Geometry::plane(), {{0, 0}, {1, 1}, {2, 2}}),
                  ValidationError);
  CHECK_THROWS_AS(MovementTrace(1, 0.0, Geometry::plane(), {{0, 0}}),
                  ValidationError);
  CHECK_THROWS_AS(MovementTrace(1, 1.0, Geometry::plane(), {}), ValidationError);
}

TEST_CASE("torus coordinates are canonicalized on construction") {
  const MovementTrace trace(1, 1.0, Geometry::torus(10, 10), {{12, -3}});
  CHECK(trace.position(0, 0) == Vec2{2, 7});
}

TEST_CASE("positions_at picks the nearest frame without interpolation") {
  const auto trace = line_trace(5, 10.0, 0.5);  // times 0, 0.5, ..., 2.0
  CHECK(trace.positions_at(0)[0] == Vec2{0, 0});
  CHECK(trace.positions_at(1.2)[0] == Vec2{20, 0});  // round(2.4) = 2
  CHECK(trace.positions_at(2.0)[0] == Vec2{40, 0});  // last frame
  CHECK_THROWS_AS(trace.positions_at(2.1), std::domain_error);
  CHECK_THROWS_AS(trace.positions_at(-0.1), std::domain_error);
}

TEST_CASE("max_speed_violations") {
  SUBCASE("stationary node never violates") {
    std::vector<Vec2> positions(4, Vec2{5, 5});
    const MovementTrace trace(1, 1.0, Geometry::plane(), std::move(positions));
    CHECK(max_speed_violations(trace, 0.001).empty());
  }
  SUBCASE("every step flagged when too fast") {
    const auto trace = line_trace(4, 2.0);  // 2 m per 1 s frame
    const auto v = max_speed_violations(trace, 1.0);
    REQUIRE(v.size() == 3);
    CHECK(v[0] == SpeedViolation{0, 0});
    CHECK(v[2] == SpeedViolation{0, 2});
  }
  SUBCASE("exact boundary speed passes") {
    const auto trace = line_trace(10, 1.0);
    CHECK(max_speed_violations(trace, 1.0).empty());
  }
  SUBCASE("torus wrap is not a jump") {
    const MovementTrace trace(1, 1.0, Geometry::torus(100, 100),
                              {{99, 0}, {1, 0}});
    CHECK(max_speed_violations(trace, 2.0).empty());
    CHECK(max_speed_violations(trace, 1.9).size() == 1);
  }
  SUBCASE("needs two frames") {
    const auto trace = line_trace(1, 0.0);
    CHECK_THROWS_AS(max_speed_violations(trace, 1.0), std::domain_error);
  }
}

TEST_CASE("CSV round trip, plane and torus") {
  SplitMix64 rng(17);
  for (const bool torus : {false, true}) {
    std::vector<Vec2> positions;
    for (int i = 0; i < 3 * 4; ++i) {
      positions.push_back({rng.uniform(torus ? 0 : -500, 500),
                           rng.uniform(torus ? 0 : -500, 500)});
    }
    const MovementTrace trace(
        3, 0.5, torus ? Geometry::torus(500, 500) : Geometry::plane(),
        std::move(positions));
    std::stringstream buf;
    save_movement_trace(buf, trace);
    const auto loaded = load_movement_trace(buf);
    CHECK(loaded == trace);

    std::stringstream again;
    save_movement_trace(again, loaded);
    std::stringstream first;
    save_movement_trace(first, trace);
    CHECK(again.str() == first.str());
  }
}

TEST_CASE("movement CSV parsing errors") {
  SUBCASE("missing preamble") {
    std::stringstream in("t,node_id,x,y\n0,0,1,2\n");
    CHECK_THROWS_AS(load_movement_trace(in), ParseError);
  }
  SUBCASE("unknown geometry") {
    std::stringstream in("# geometry=sphere,dt=1,n=1\nt,node_id,x,y\n0,0,1,2\n");
    CHECK_THROWS_AS(load_movement_trace(in), ParseError);
  }
  SUBCASE("node ids out of order") {
    std::stringstream in(
        "# geometry=plane,dt=1,n=2\nt,node_id,x,y\n0,1,1,2\n0,0,3,4\n");
    CHECK_THROWS_AS(load_movement_trace(in), ParseError);
  }
  SUBCASE("incomplete frame") {
    std::stringstream in(
        "# geometry=plane,dt=1,n=2\nt,node_id,x,y\n0,0,1,2\n0,1,3,4\n1,0,5,6\n");
    CHECK_THROWS_AS(load_movement_trace(in), ParseError);
  }
  SUBCASE("row time inconsistent with frame index") {
    std::stringstream in(
        "# geometry=plane,dt=1,n=1\nt,node_id,x,y\n0,0,1,2\n2,0,3,4\n");
    CHECK_THROWS_AS(load_movement_trace(in), ParseError);
  }
}

TEST_CASE("resample keeps every stride-th frame") {
  const auto trace = line_trace(11, 1.0, 0.5);  // 0..5 s
  const auto coarse = resample(trace, 1.0);
  CHECK(coarse.dt() == 1.0);
  CHECK(coarse.frame_count() == 6);
  for (int k = 0; k < coarse.frame_count(); ++k) {
    CHECK(coarse.position(k, 0) == trace.position(2 * k, 0));
  }
  CHECK_THROWS_AS(resample(trace, 0.75), ConfigError);
  CHECK(resample(trace, 0.5) == trace);
}
