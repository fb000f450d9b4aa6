#include "parkdet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "parkdet/rng.hpp"

namespace parkdet {

std::vector<double> SensorConfig::bearings() const {
  std::vector<double> out;
  out.reserve(mounts.size());
  for (const auto& m : mounts) out.push_back(m.bearing);
  return out;
}

SensorConfig default_sensor_config() {
  SensorConfig cfg;
  cfg.mounts = {
      {{2.0, 0.9}, M_PI / 4.0},       // front corners, angled outward
      {{2.0, -0.9}, -M_PI / 4.0},
      {{0.0, 0.9}, M_PI / 2.0},       // broadside pair
      {{0.0, -0.9}, -M_PI / 2.0},
      {{-2.0, 0.9}, 3.0 * M_PI / 4.0},  // rear corners
      {{-2.0, -0.9}, -3.0 * M_PI / 4.0},
  };
  return cfg;
}

namespace {

struct Rect {  // axis-aligned vehicle footprint in the global frame
  Vec2 center;
  double half_x = 0.0;
  double half_y = 0.0;

  Vec2 nearest(const Vec2& p) const {
    return {std::clamp(p.x, center.x - half_x, center.x + half_x),
            std::clamp(p.y, center.y - half_y, center.y + half_y)};
  }

  bool near_corner(const Vec2& p, double extent) const {
    return std::abs(std::abs(p.x - center.x) - half_x) <= extent &&
           std::abs(std::abs(p.y - center.y) - half_y) <= extent;
  }
};

Rect vehicle_rect(const ParkingSpace& s, ScenarioKind kind) {
  Rect r;
  r.center = s.center;
  if (kind == ScenarioKind::OFF_STREET) {  // nose-in, long axis off the row
    r.half_x = kVehicleWidth / 2.0;
    r.half_y = kVehicleLength / 2.0;
  } else {
    r.half_x = kVehicleLength / 2.0;
    r.half_y = kVehicleWidth / 2.0;
  }
  return r;
}

struct PathPose {
  Vec2 p;
  double phi = 0.0;
};

// Piecewise path: straight pass, optional U-turn arc plus return leg.
struct PathModel {
  double x0 = 0.0, x1 = 0.0, y = 0.0, speed = 1.0;
  bool round_trip = false;
  double turn_radius = 3.0;
  double t_leg = 0.0, t_turn = 0.0;

  double duration() const {
    return round_trip ? 2.0 * t_leg + t_turn : t_leg;
  }

  PathPose at(double t) const {
    if (t <= t_leg || !round_trip) return {{x0 + speed * std::min(t, t_leg), y}, 0.0};
    const Vec2 turn_center{x1, y - turn_radius};
    if (t <= t_leg + t_turn) {
      const double a = (t - t_leg) * speed / turn_radius;  // 0..pi, clockwise
      return {turn_center + Vec2{std::sin(a), std::cos(a)} * turn_radius,
              wrap_angle(-a)};
    }
    const double back = speed * (t - t_leg - t_turn);
    return {{x1 - back, y - 2.0 * turn_radius}, M_PI};
  }
};

PathModel make_path(const ParkingMap& map, const PathSpec& spec) {
  double lo = 1e300, hi = -1e300;
  for (const auto& s : map.spaces) {
    lo = std::min(lo, s.center.x);
    hi = std::max(hi, s.center.x);
  }
  PathModel pm;
  pm.x0 = lo - spec.lead_in;
  pm.x1 = hi + spec.lead_in;
  pm.y = -spec.offset;
  pm.speed = spec.speed;
  pm.round_trip = spec.round_trip;
  pm.t_leg = (pm.x1 - pm.x0) / spec.speed;
  pm.t_turn = M_PI * pm.turn_radius / spec.speed;
  return pm;
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& cfg) {
  if (cfg.n_spaces <= 0)
    throw std::invalid_argument("generate_scenario: n_spaces must be positive");
  if (!(cfg.occupancy_rate >= 0.0 && cfg.occupancy_rate <= 1.0))
    throw std::invalid_argument("generate_scenario: occupancy_rate outside [0,1]");
  if (cfg.n_passes <= 0)
    throw std::invalid_argument("generate_scenario: n_passes must be positive");

  const bool perp = cfg.kind == ScenarioKind::OFF_STREET;
  const double pitch = cfg.space_pitch > 0.0 ? cfg.space_pitch : (perp ? 4.5 : 6.5);
  const double depth = cfg.space_depth > 0.0 ? cfg.space_depth : (perp ? 5.0 : 2.2);

  Scenario sc;
  ParkingRow row;
  for (int i = 0; i < cfg.n_spaces; ++i) {
    ParkingSpace s;
    s.id = i;
    s.center = {(i + 0.5) * pitch, depth / 2.0};
    s.kind = perp ? SpaceKind::PERPENDICULAR : SpaceKind::PARALLEL;
    s.orientation = perp ? M_PI / 2.0 : 0.0;
    if (perp) {
      s.width = pitch;
      s.length = depth;
    } else {
      s.length = pitch;
      s.width = depth;
    }
    sc.map.spaces.push_back(s);
    row.space_ids.push_back(i);
  }
  sc.map.rows.push_back(row);

  auto rng = substream(cfg.seed, "occupancy");
  std::map<int, SpaceState> initial;
  if (!cfg.fixed_free.empty()) {
    for (int i = 0; i < cfg.n_spaces; ++i)
      initial[i] = std::find(cfg.fixed_free.begin(), cfg.fixed_free.end(), i) !=
                           cfg.fixed_free.end()
                       ? SpaceState::FREE
                       : SpaceState::OCCUPIED;
  } else {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < cfg.n_spaces; ++i)
      initial[i] =
          u(rng) < cfg.occupancy_rate ? SpaceState::OCCUPIED : SpaceState::FREE;
  }
  sc.truth.push_back(initial);

  auto event_rng = substream(cfg.seed, "events");
  for (int p = 1; p < cfg.n_passes; ++p) {
    std::map<int, SpaceState> next = sc.truth.back();
    const int n_events = static_cast<int>(std::floor(cfg.event_rate * p)) -
                         static_cast<int>(std::floor(cfg.event_rate * (p - 1)));
    for (int e = 0; e < n_events; ++e) {
      const int id = static_cast<int>(event_rng() % cfg.n_spaces);
      next[id] = next[id] == SpaceState::OCCUPIED ? SpaceState::FREE
                                                  : SpaceState::OCCUPIED;
      ++sc.n_events;
    }
    sc.truth.push_back(std::move(next));
  }
  return sc;
}

TripData generate_trip(const ParkingMap& map,
                       const std::map<int, SpaceState>& truth,
                       const PathSpec& path, const SensorConfig& sensors,
                       std::uint64_t seed) {
  if (map.spaces.empty())
    throw std::invalid_argument("generate_trip: empty map");
  if (path.speed <= 0.0)
    throw std::invalid_argument("generate_trip: speed must be positive");
  if (path.offset <= 0.0 || path.offset > sensors.range_m)
    throw std::invalid_argument("generate_trip: path outside the mapped row");
  if (sensors.radar_rate_hz <= 0.0 || sensors.gps_rate_hz <= 0.0)
    throw std::invalid_argument("generate_trip: sensor rates must be positive");

  const ScenarioKind kind = map.spaces.front().kind == SpaceKind::PERPENDICULAR
                                ? ScenarioKind::OFF_STREET
                                : ScenarioKind::ON_STREET;
  const PathModel pm = make_path(map, path);
  const double total = pm.duration();

  TripData out;
  for (double t = 0.0; t <= total + 1e-9; t += 1.0 / sensors.gps_rate_hz) {
    const PathPose pp = pm.at(t);
    out.poses.push_back({t, pp.p.x, pp.p.y, pp.phi});
  }

  auto rng = substream(seed, "radar");
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, sensors.noise_sigma);
  std::poisson_distribution<int> clutter(sensors.clutter_rate /
                                         sensors.radar_rate_hz);
  const double half_fov = sensors.fov_deg * M_PI / 360.0;

  const int n_ticks = static_cast<int>(total * sensors.radar_rate_hz) + 1;
  for (int k = 0; k < n_ticks; ++k) {
    const double t = k / sensors.radar_rate_hz;
    const PathPose pp = pm.at(t);

    for (const auto& s : map.spaces) {
      const auto it = truth.find(s.id);
      if (it == truth.end() || it->second != SpaceState::OCCUPIED) continue;
      const Rect rect = vehicle_rect(s, kind);
      int seen_by = -1;
      Vec2 surface;
      for (std::size_t m = 0; m < sensors.mounts.size(); ++m) {
        const Vec2 spos = pp.p + rotate(sensors.mounts[m].position, pp.phi);
        const Vec2 np = rect.nearest(spos);
        const Vec2 d = np - spos;
        if (d.norm() > sensors.range_m) continue;
        const double rel =
            wrap_angle(std::atan2(d.y, d.x) - pp.phi - sensors.mounts[m].bearing);
        if (std::abs(rel) <= half_fov) {
          seen_by = static_cast<int>(m);
          surface = np;
          break;
        }
      }
      if (seen_by < 0) continue;
      double p_det = sensors.detection_prob;
      if (!rect.near_corner(surface, sensors.corner_extent))
        p_det *= sensors.face_detection_scale;
      if (uni(rng) >= p_det) continue;
      const Vec2 noisy = surface + Vec2{gauss(rng), gauss(rng)};
      const Vec2 local = rotate(noisy - pp.p, -pp.phi);
      const double r = local.norm();
      if (r == 0.0 || r > sensors.range_m) continue;
      out.detections.push_back({t, local.x, local.y, seen_by});
    }

    const int n_clutter = clutter(rng);
    for (int c = 0; c < n_clutter; ++c) {
      const auto m = rng() % sensors.mounts.size();
      const double r = 0.5 + uni(rng) * (sensors.range_m - 0.5);
      const double a = (uni(rng) * 2.0 - 1.0) * half_fov;
      const Vec2 spos = pp.p + rotate(sensors.mounts[m].position, pp.phi);
      const Vec2 g =
          spos + unit_from_angle(pp.phi + sensors.mounts[m].bearing + a) * r;
      const Vec2 local = rotate(g - pp.p, -pp.phi);
      if (local.norm() > sensors.range_m || local.norm() == 0.0) continue;
      out.detections.push_back({t, local.x, local.y, static_cast<int>(m)});
    }
  }
  return out;
}

ScenarioConfig preset_fig1(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::OFF_STREET;
  cfg.n_spaces = 17;
  cfg.fixed_free = {2, 6, 10, 14};  // 13 parked vehicles on 17 stalls
  cfg.n_passes = 1;
  cfg.seed = seed;
  return cfg;
}

ScenarioConfig preset_offstreet(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::OFF_STREET;
  cfg.n_spaces = 20;
  cfg.occupancy_rate = 0.7;
  cfg.n_passes = 4;
  cfg.event_rate = 1.0;
  cfg.seed = seed;
  return cfg;
}

ScenarioConfig preset_onstreet(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::ON_STREET;
  cfg.n_spaces = 12;
  cfg.occupancy_rate = 0.7;
  cfg.n_passes = 4;
  cfg.event_rate = 1.0;
  cfg.seed = seed;
  return cfg;
}

}  // namespace parkdet
