#include "parkdet/geo_sync.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parkdet {

namespace {

constexpr double kA = 6378137.0;                // WGS84 semi-major axis
constexpr double kF = 1.0 / 298.257223563;      // flattening
constexpr double kK0 = 0.9996;                  // UTM scale on central meridian
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;

}  // namespace

UtmCoord latlon_to_planar(double lat_deg, double lon_deg) {
  if (!(lat_deg >= -80.0 && lat_deg <= 84.0))
    throw std::domain_error("latlon_to_planar: latitude outside UTM domain");
  if (!(lon_deg >= -180.0 && lon_deg < 180.0))
    throw std::domain_error("latlon_to_planar: longitude outside [-180, 180)");

  const int zone = static_cast<int>(std::floor((lon_deg + 180.0) / 6.0)) + 1;
  const double lon0 = (zone * 6 - 183) * M_PI / 180.0;

  const double n = kF / (2.0 - kF);
  const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
  const double rect_radius =
      kA / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
  const double alpha[6] = {
      n / 2.0 - 2.0 * n2 / 3.0 + 5.0 * n3 / 16.0 + 41.0 * n4 / 180.0 -
          127.0 * n5 / 288.0 + 7891.0 * n6 / 37800.0,
      13.0 * n2 / 48.0 - 3.0 * n3 / 5.0 + 557.0 * n4 / 1440.0 +
          281.0 * n5 / 630.0 - 1983433.0 * n6 / 1935360.0,
      61.0 * n3 / 240.0 - 103.0 * n4 / 140.0 + 15061.0 * n5 / 26880.0 +
          167603.0 * n6 / 181440.0,
      49561.0 * n4 / 161280.0 - 179.0 * n5 / 168.0 + 6601661.0 * n6 / 7257600.0,
      34729.0 * n5 / 80640.0 - 3418889.0 * n6 / 1995840.0,
      212378941.0 * n6 / 319334400.0};

  const double e = std::sqrt(kF * (2.0 - kF));
  const double phi = lat_deg * M_PI / 180.0;
  const double dlam = lon_deg * M_PI / 180.0 - lon0;

  const double s = std::sin(phi);
  const double tau = std::sinh(std::atanh(s) - e * std::atanh(e * s));
  const double xi_p = std::atan2(tau, std::cos(dlam));
  const double eta_p = std::asinh(std::sin(dlam) / std::hypot(tau, std::cos(dlam)));

  double xi = xi_p, eta = eta_p;
  for (int j = 1; j <= 6; ++j) {
    xi += alpha[j - 1] * std::sin(2.0 * j * xi_p) * std::cosh(2.0 * j * eta_p);
    eta += alpha[j - 1] * std::cos(2.0 * j * xi_p) * std::sinh(2.0 * j * eta_p);
  }

  UtmCoord out;
  out.zone = zone;
  out.south = lat_deg < 0.0;
  out.easting = kFalseEasting + kK0 * rect_radius * eta;
  out.northing = kK0 * rect_radius * xi + (out.south ? kFalseNorthingSouth : 0.0);
  return out;
}

GlobalDetection local_to_global(const ProbePose& pose, const LocalDetection& det,
                                const SensorOffset* offset) {
  double zx = det.zx_local;
  double zy = det.zy_local;
  if (offset) {
    const Vec2 r = rotate({zx, zy}, offset->rotation) + offset->translation;
    zx = r.x;
    zy = r.y;
  }
  const double range = std::hypot(zx, zy);
  if (range == 0.0)
    throw std::invalid_argument("local_to_global: zero-length detection vector");
  const double theta = std::atan2(zy, zx);

  GlobalDetection g;
  g.t = det.t;
  g.zx = pose.x + range * std::cos(pose.phi + theta);
  g.zy = pose.y + range * std::sin(pose.phi + theta);
  g.source_pose_t = pose.t;
  return g;
}

SyncResult synchronize(const std::vector<ProbePose>& poses,
                       const std::vector<LocalDetection>& dets, double tol,
                       const std::vector<SensorOffset>* offsets) {
  if (poses.empty()) throw std::invalid_argument("synchronize: empty pose stream");
  if (tol <= 0.0) throw std::invalid_argument("synchronize: tol must be positive");
  for (std::size_t i = 1; i < poses.size(); ++i)
    if (poses[i].t <= poses[i - 1].t)
      throw std::invalid_argument("synchronize: pose stream not strictly sorted");
  for (std::size_t i = 1; i < dets.size(); ++i)
    if (dets[i].t < dets[i - 1].t)
      throw std::invalid_argument("synchronize: detection stream not sorted");

  SyncResult out;
  out.detections.reserve(dets.size());
  std::size_t lo = 0;  // poses and dets both sorted: sweep once
  for (const auto& d : dets) {
    while (lo + 1 < poses.size() && poses[lo + 1].t <= d.t) ++lo;
    // Candidates: poses[lo] (<= d.t, or the first pose) and poses[lo+1].
    std::size_t best = lo;
    double best_dt = std::abs(poses[lo].t - d.t);
    if (lo + 1 < poses.size()) {
      const double dt = std::abs(poses[lo + 1].t - d.t);
      if (dt < best_dt) {  // ties keep the earlier pose
        best = lo + 1;
        best_dt = dt;
      }
    }
    if (best_dt > tol) {
      ++out.dropped;
      continue;
    }
    const SensorOffset* off = nullptr;
    if (offsets && d.sensor_id >= 0 &&
        static_cast<std::size_t>(d.sensor_id) < offsets->size())
      off = &(*offsets)[d.sensor_id];
    out.detections.push_back(local_to_global(poses[best], d, off));
  }
  return out;
}

std::vector<TripSegment> segment_trip(const std::vector<ProbePose>& poses,
                                      const std::vector<GlobalDetection>& dets,
                                      const SegmentOptions& opts) {
  std::vector<TripSegment> segments;
  if (poses.empty()) return segments;

  // Split indices: first pose index of each new segment.
  std::vector<std::size_t> starts{0};
  double accum = 0.0;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    accum += wrap_angle(poses[i].phi - poses[i - 1].phi);
    if (std::abs(accum) > opts.split_threshold) {
      starts.push_back(i);
      accum = 0.0;
    }
  }
  starts.push_back(poses.size());

  std::vector<int> seg_of_pose(poses.size(), -1);
  for (std::size_t s = 0; s + 1 < starts.size(); ++s) {
    const std::size_t begin = starts[s], end = starts[s + 1];
    const double t_lo = poses[begin].t;
    const double t_hi = poses[end - 1].t;
    TripSegment seg;
    seg.segment_id = static_cast<int>(s);
    for (std::size_t i = begin; i < end; ++i) {
      // Discard poses within the turn-exclusion window around either split.
      const bool near_prev_split = s > 0 && poses[i].t - t_lo < opts.turn_exclusion;
      const bool near_next_split =
          s + 2 < starts.size() && t_hi - poses[i].t < opts.turn_exclusion;
      if (near_prev_split || near_next_split) continue;
      seg_of_pose[i] = static_cast<int>(s);
      seg.poses.push_back(poses[i]);
    }
    if (seg.poses.size() >= 2) {
      double dist = 0.0;
      for (std::size_t i = 1; i < seg.poses.size(); ++i)
        dist += std::hypot(seg.poses[i].x - seg.poses[i - 1].x,
                           seg.poses[i].y - seg.poses[i - 1].y);
      const double dt = seg.poses.back().t - seg.poses.front().t;
      seg.mean_speed = dt > 0.0 ? dist / dt : 0.0;
    }
    segments.push_back(std::move(seg));
  }

  // Detections follow the segment of their paired pose.
  std::size_t pi = 0;
  for (const auto& d : dets) {
    while (pi + 1 < poses.size() && poses[pi].t < d.source_pose_t) ++pi;
    // d.source_pose_t is an exact pose timestamp from synchronize().
    std::size_t idx = pi;
    if (poses[idx].t != d.source_pose_t && idx > 0 &&
        poses[idx - 1].t == d.source_pose_t)
      idx = pi - 1;
    if (seg_of_pose[idx] >= 0)
      segments[static_cast<std::size_t>(seg_of_pose[idx])].detections.push_back(d);
  }
  return segments;
}

}  // namespace parkdet
