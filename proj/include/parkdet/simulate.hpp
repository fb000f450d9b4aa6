#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "parkdet/geo_sync.hpp"
#include "parkdet/mapmatch.hpp"

namespace parkdet {

constexpr double kVehicleLength = 4.5;  // meters
constexpr double kVehicleWidth = 1.8;   // meters
constexpr double kMphToMps = 0.44704;

enum class ScenarioKind { OFF_STREET, ON_STREET };

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::OFF_STREET;
  int n_spaces = 17;
  // Along-row pitch and stall depth; 0 picks the per-kind default
  // (perpendicular 4.5 x 5.0, parallel 6.5 x 2.2).
  double space_pitch = 0.0;
  double space_depth = 0.0;
  double occupancy_rate = 0.75;
  int n_passes = 1;
  double event_rate = 0.0;  // in/out events per pass transition
  std::uint64_t seed = 0;
  // Explicit free-space ids; when non-empty this overrides occupancy_rate
  // for the initial pass (used by the pilot-layout preset).
  std::vector<int> fixed_free;
};

struct SensorMount {
  Vec2 position;        // vehicle frame, meters
  double bearing = 0.0; // radians relative to heading
};

struct SensorConfig {
  double fov_deg = 80.0;
  double range_m = 10.0;
  double radar_rate_hz = 50.0;
  double gps_rate_hz = 10.0;
  double noise_sigma = 0.25;     // meters, isotropic
  double clutter_rate = 0.5;     // points per second
  double detection_prob = 0.9;   // per radar tick per visible object
  // Flat body panels return far less energy at oblique incidence than
  // corners (bumpers, wheel wells), so mid-face returns are down-weighted.
  double face_detection_scale = 0.55;
  double corner_extent = 0.3;    // meters from a corner that still counts as one
  std::vector<SensorMount> mounts;  // default: six wide-FOV short-range units

  std::vector<double> bearings() const;
};

SensorConfig default_sensor_config();

struct PathSpec {
  double offset = 2.032;          // D: lateral distance to the stall front line
  double speed = 5.0 * kMphToMps; // m/s
  double lead_in = 6.0;           // meters of straight approach past the row
  bool round_trip = false;        // forward pass, U-turn, return pass
};

struct Scenario {
  ParkingMap map;
  std::vector<std::map<int, SpaceState>> truth;  // one state map per pass
  int n_events = 0;
};

struct TripData {
  std::vector<ProbePose> poses;
  std::vector<LocalDetection> detections;
};

// Builds the row geometry and the per-pass occupancy truth, including
// scheduled in/out events; deterministic per seed.
Scenario generate_scenario(const ScenarioConfig& cfg);

// Simulates one pass: GPS poses on the gps-rate grid, radar detections on
// the radar-rate grid. Each occupied stall whose nearest vehicle-surface
// point lies in a sensor wedge emits one noisy detection per tick with
// probability detection_prob; clutter is Poisson in the wedges.
TripData generate_trip(const ParkingMap& map,
                       const std::map<int, SpaceState>& truth,
                       const PathSpec& path, const SensorConfig& sensors,
                       std::uint64_t seed);

// Experiment presets.
ScenarioConfig preset_fig1(std::uint64_t seed);      // 17 stalls, 13 occupied
ScenarioConfig preset_offstreet(std::uint64_t seed); // perpendicular lot
ScenarioConfig preset_onstreet(std::uint64_t seed);  // parallel road side

}  // namespace parkdet
