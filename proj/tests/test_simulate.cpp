#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "parkdet/simulate.hpp"

using namespace parkdet;

TEST_CASE("scenario generation is deterministic and respects the layout") {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::OFF_STREET;
  cfg.n_spaces = 10;
  cfg.occupancy_rate = 0.6;
  cfg.n_passes = 3;
  cfg.event_rate = 2.0;
  cfg.seed = 123;
  const Scenario a = generate_scenario(cfg);
  const Scenario b = generate_scenario(cfg);
  REQUIRE(a.map.spaces.size() == 10);
  REQUIRE(a.truth.size() == 3);
  CHECK(a.truth == b.truth);
  CHECK(a.n_events == b.n_events);
  CHECK(a.n_events == 4);  // floor(rate * p) increments over two transitions

  // Perpendicular default geometry: 4.5 m pitch along the row.
  for (std::size_t i = 0; i < a.map.spaces.size(); ++i) {
    CHECK(a.map.spaces[i].center.x ==
          doctest::Approx((i + 0.5) * 4.5));
    CHECK(a.map.spaces[i].kind == SpaceKind::PERPENDICULAR);
  }
  REQUIRE(a.map.rows.size() == 1);
  CHECK(a.map.rows[0].space_ids.size() == 10);

  cfg.kind = ScenarioKind::ON_STREET;
  const Scenario c = generate_scenario(cfg);
  CHECK(c.map.spaces[1].center.x == doctest::Approx(1.5 * 6.5));
  CHECK(c.map.spaces[1].kind == SpaceKind::PARALLEL);
}

TEST_CASE("fixed free lists override the occupancy rate") {
  ScenarioConfig cfg = preset_fig1(7);
  const Scenario sc = generate_scenario(cfg);
  REQUIRE(sc.map.spaces.size() == 17);
  int occupied = 0;
  for (const auto& [id, st] : sc.truth[0]) {
    const bool fixed_free = id == 2 || id == 6 || id == 10 || id == 14;
    CHECK((st == SpaceState::FREE) == fixed_free);
    if (st == SpaceState::OCCUPIED) ++occupied;
  }
  CHECK(occupied == 13);
}

TEST_CASE("scenario generation rejects bad parameters") {
  ScenarioConfig cfg;
  cfg.n_spaces = 0;
  CHECK_THROWS_AS(generate_scenario(cfg), std::invalid_argument);
  cfg.n_spaces = 5;
  cfg.occupancy_rate = 1.5;
  CHECK_THROWS_AS(generate_scenario(cfg), std::invalid_argument);
  cfg.occupancy_rate = 0.5;
  cfg.n_passes = 0;
  CHECK_THROWS_AS(generate_scenario(cfg), std::invalid_argument);
}

namespace {

Scenario small_scene(std::uint64_t seed = 11) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::OFF_STREET;
  cfg.n_spaces = 6;
  cfg.fixed_free = {2, 4};
  cfg.seed = seed;
  return generate_scenario(cfg);
}

}  // namespace

TEST_CASE("trip generation is bit-identical per seed") {
  const Scenario sc = small_scene();
  const SensorConfig sensors = default_sensor_config();
  const TripData a = generate_trip(sc.map, sc.truth[0], {}, sensors, 42);
  const TripData b = generate_trip(sc.map, sc.truth[0], {}, sensors, 42);
  REQUIRE(a.detections.size() == b.detections.size());
  for (std::size_t i = 0; i < a.detections.size(); ++i) {
    CHECK(a.detections[i].t == b.detections[i].t);
    CHECK(a.detections[i].zx_local == b.detections[i].zx_local);
    CHECK(a.detections[i].zy_local == b.detections[i].zy_local);
    CHECK(a.detections[i].sensor_id == b.detections[i].sensor_id);
  }
  const TripData c = generate_trip(sc.map, sc.truth[0], {}, sensors, 43);
  bool differs = a.detections.size() != c.detections.size();
  for (std::size_t i = 0; !differs && i < a.detections.size(); ++i)
    differs = a.detections[i].zx_local != c.detections[i].zx_local;
  CHECK(differs);
}

TEST_CASE("poses land on the GPS grid and detections stay in range") {
  const Scenario sc = small_scene();
  const SensorConfig sensors = default_sensor_config();
  const PathSpec path;
  const TripData trip = generate_trip(sc.map, sc.truth[0], path, sensors, 9);
  REQUIRE(trip.poses.size() > 2);
  for (std::size_t i = 0; i < trip.poses.size(); ++i) {
    CHECK(trip.poses[i].t == doctest::Approx(i / sensors.gps_rate_hz));
    if (i > 0) CHECK(trip.poses[i].t > trip.poses[i - 1].t);
    CHECK(trip.poses[i].y == doctest::Approx(-path.offset));
  }
  CHECK(!trip.detections.empty());
  for (const auto& d : trip.detections) {
    const double r = std::hypot(d.zx_local, d.zy_local);
    CHECK(r > 0.0);
    CHECK(r <= sensors.range_m);
    CHECK(d.sensor_id >= 0);
    CHECK(d.sensor_id < static_cast<int>(sensors.mounts.size()));
  }
}

TEST_CASE("no emitters and no clutter means no detections") {
  const Scenario sc = small_scene();
  SensorConfig sensors = default_sensor_config();
  sensors.detection_prob = 0.0;
  sensors.clutter_rate = 0.0;
  std::map<int, SpaceState> empty_truth;
  for (const auto& s : sc.map.spaces) empty_truth[s.id] = SpaceState::FREE;
  CHECK(generate_trip(sc.map, sc.truth[0], {}, sensors, 1).detections.empty());
  sensors.detection_prob = 0.9;
  CHECK(generate_trip(sc.map, empty_truth, {}, sensors, 1).detections.empty());
}

TEST_CASE("suppressed face returns leave only corner echoes") {
  const Scenario sc = small_scene();
  SensorConfig sensors = default_sensor_config();
  sensors.detection_prob = 1.0;
  sensors.face_detection_scale = 0.0;
  sensors.noise_sigma = 1e-9;
  sensors.clutter_rate = 0.0;
  const PathSpec path;
  const TripData trip = generate_trip(sc.map, sc.truth[0], path, sensors, 3);
  REQUIRE(!trip.detections.empty());

  // Straight pass along y = -offset: the pose is directly computable, so
  // each local return can be mapped back to the global frame and checked
  // against the vehicle rectangles.
  double lo = 1e300, hi = -1e300;
  for (const auto& s : sc.map.spaces) {
    lo = std::min(lo, s.center.x);
    hi = std::max(hi, s.center.x);
  }
  const double x0 = lo - 6.0;  // lead-in
  int on_corner = 0;
  for (const auto& d : trip.detections) {
    const double px = x0 + path.speed * d.t;
    const Vec2 g{px + d.zx_local, -path.offset + d.zy_local};
    bool corner = false;
    for (const auto& s : sc.map.spaces) {
      if (sc.truth[0].at(s.id) != SpaceState::OCCUPIED) continue;
      // Perpendicular stall: vehicle 1.8 wide along the row, 4.5 deep.
      const double cx = std::abs(std::abs(g.x - s.center.x) - 0.9);
      const double cy = std::abs(std::abs(g.y - s.center.y) - 2.25);
      if (cx <= sensors.corner_extent + 1e-6 &&
          cy <= sensors.corner_extent + 1e-6)
        corner = true;
    }
    if (corner) ++on_corner;
  }
  CHECK(on_corner == static_cast<int>(trip.detections.size()));
}

TEST_CASE("a round trip retraces the row in the opposite heading") {
  const Scenario sc = small_scene();
  PathSpec path;
  path.round_trip = true;
  const TripData trip =
      generate_trip(sc.map, sc.truth[0], path, default_sensor_config(), 5);
  CHECK(trip.poses.front().phi == doctest::Approx(0.0));
  CHECK(trip.poses.back().phi == doctest::Approx(M_PI));
  CHECK(trip.poses.back().x < trip.poses.front().x + 1.0);
  // The return leg runs below the outbound one.
  CHECK(trip.poses.back().y < trip.poses.front().y - 1.0);
}

TEST_CASE("trip generation rejects bad parameters") {
  const Scenario sc = small_scene();
  const SensorConfig sensors = default_sensor_config();
  PathSpec path;
  path.speed = 0.0;
  CHECK_THROWS_AS(generate_trip(sc.map, sc.truth[0], path, sensors, 1),
                  std::invalid_argument);
  path.speed = 2.0;
  path.offset = 11.0;  // beyond sensor range
  CHECK_THROWS_AS(generate_trip(sc.map, sc.truth[0], path, sensors, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      generate_trip(ParkingMap{}, sc.truth[0], PathSpec{}, sensors, 1),
      std::invalid_argument);
}
