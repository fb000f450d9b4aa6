#pragma once

#include <cstddef>
#include <vector>

#include "parkdet/geometry.hpp"

namespace parkdet {

// Timestamped global position and heading of the probe vehicle.
// Heading is CCW from +x, wrapped to (-pi, pi]. Times strictly increase
// within a stream.
struct ProbePose {
  double t = 0.0;    // seconds
  double x = 0.0;    // meters, planar easting
  double y = 0.0;    // meters, planar northing
  double phi = 0.0;  // radians
};

// One sparse radar point in the vehicle frame (origin at the centroid).
struct LocalDetection {
  double t = 0.0;
  double zx_local = 0.0;
  double zy_local = 0.0;
  int sensor_id = 0;  // 0..5
};

// A detection converted to the global planar frame.
struct GlobalDetection {
  double t = 0.0;
  double zx = 0.0;
  double zy = 0.0;
  double source_pose_t = 0.0;  // timestamp of the pose used for conversion
};

struct TripSegment {
  std::vector<ProbePose> poses;
  std::vector<GlobalDetection> detections;
  int segment_id = 0;
  double mean_speed = 0.0;  // m/s
};

struct UtmCoord {
  double easting = 0.0;
  double northing = 0.0;
  int zone = 0;
  bool south = false;
};

// Forward UTM projection (WGS84, Krueger series). lat in [-80, 84] degrees,
// lon in [-180, 180). Southern hemisphere gets the 10,000 km false northing.
UtmCoord latlon_to_planar(double lat_deg, double lon_deg);

// Optional per-sensor rigid mounting offset applied before rotation.
struct SensorOffset {
  Vec2 translation;   // meters, vehicle frame
  double rotation = 0.0;  // radians
};

// Rotates the local point by pose heading (range/bearing form, full-quadrant
// arctangent) and translates by the pose centroid. Throws on a zero-length
// detection vector.
GlobalDetection local_to_global(const ProbePose& pose, const LocalDetection& det,
                                const SensorOffset* offset = nullptr);

struct SyncResult {
  std::vector<GlobalDetection> detections;
  std::size_t dropped = 0;  // beyond-tolerance detections
};

// Pairs each detection with the nearest-in-time pose within tol seconds
// (earlier pose wins ties), then converts to global coordinates. Unmatched
// detections are dropped and counted. Both streams must be time-sorted.
SyncResult synchronize(const std::vector<ProbePose>& poses,
                       const std::vector<LocalDetection>& dets,
                       double tol = 0.1,
                       const std::vector<SensorOffset>* offsets = nullptr);

struct SegmentOptions {
  double split_threshold = M_PI / 2.0;  // cumulative unwrapped heading change
  double turn_exclusion = 1.0;          // seconds discarded either side of a split
};

// Splits a synchronized trip at accumulated heading changes beyond the
// threshold. Detections follow their paired pose. Poses inside the
// turn-exclusion window around a split are discarded from both segments.
std::vector<TripSegment> segment_trip(const std::vector<ProbePose>& poses,
                                      const std::vector<GlobalDetection>& dets,
                                      const SegmentOptions& opts = {});

}  // namespace parkdet
