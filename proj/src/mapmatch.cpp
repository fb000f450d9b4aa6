#include "parkdet/mapmatch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parkdet {

std::vector<int> coverage_mask(const TripSegment& segment, const ParkingMap& map,
                               double fov_deg, double range_m,
                               const std::vector<double>& sensor_bearings) {
  if (!(fov_deg > 0.0 && fov_deg <= 360.0))
    throw std::invalid_argument("coverage_mask: fov_deg outside (0, 360]");
  if (range_m <= 0.0)
    throw std::invalid_argument("coverage_mask: range_m must be positive");

  const double half_fov = fov_deg * M_PI / 360.0;
  std::vector<int> observed;
  for (const auto& s : map.spaces) {
    bool seen = false;
    for (const auto& pose : segment.poses) {
      const Vec2 d = s.center - Vec2{pose.x, pose.y};
      const double r = d.norm();
      if (r > range_m) continue;  // range boundary inclusive
      const double bearing = std::atan2(d.y, d.x);
      for (double sb : sensor_bearings) {
        if (std::abs(wrap_angle(bearing - pose.phi - sb)) <= half_fov) {
          seen = true;
          break;
        }
      }
      if (seen) break;
    }
    if (seen) observed.push_back(s.id);
  }
  return observed;
}

SegmentEstimate match_segment(const ClusterSet& clusters,
                              const std::vector<GapReport>& gaps,
                              const ParkingMap& map, const TripSegment& segment,
                              const std::vector<int>& observed,
                              const MatchOptions& opts) {
  if (map.spaces.empty())
    throw std::invalid_argument("match_segment: empty map");

  SegmentEstimate est;
  est.segment_id = segment.segment_id;
  est.mean_speed = segment.mean_speed;
  for (const auto& s : map.spaces) est.states[s.id] = SpaceState::UNOBSERVED;

  // Along-track direction from the segment path endpoints.
  Vec2 axis{1.0, 0.0};
  if (segment.poses.size() >= 2) {
    const Vec2 d{segment.poses.back().x - segment.poses.front().x,
                 segment.poses.back().y - segment.poses.front().y};
    const double n = d.norm();
    if (n > 1e-9) axis = d / n;
  } else if (!segment.poses.empty()) {
    axis = unit_from_angle(segment.poses.front().phi);
  }
  const Vec2 perp = axis.perp();

  struct Candidate {
    double dist;
    int space_id;
    int cluster;
  };
  std::vector<Candidate> candidates;
  const int k = static_cast<int>(clusters.cluster_count());
  for (int c = 0; c < k; ++c) {
    const Vec2& cen = clusters.centroids[c];
    for (const auto& s : map.spaces) {
      if (std::find(observed.begin(), observed.end(), s.id) == observed.end())
        continue;
      const Vec2 d = cen - s.center;
      if (std::abs(d.dot(perp)) > opts.max_lateral) continue;
      const double along = std::abs(d.dot(axis));
      const double extent =
          s.kind == SpaceKind::PERPENDICULAR ? s.width : s.length;
      if (along > opts.assign_radius_factor * extent) continue;
      candidates.push_back({along, s.id, c});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a,
                                                     const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.space_id != b.space_id) return a.space_id < b.space_id;
    return a.cluster < b.cluster;
  });

  std::vector<bool> cluster_done(k, false);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& cand = candidates[i];
    if (cluster_done[cand.cluster]) continue;
    if (est.states[cand.space_id] == SpaceState::OCCUPIED) continue;
    if (i + 1 < candidates.size() && candidates[i + 1].dist == cand.dist &&
        candidates[i + 1].cluster == cand.cluster)
      ++est.ties;  // equidistant spaces; lower id wins by the sort order
    est.states[cand.space_id] = SpaceState::OCCUPIED;
    cluster_done[cand.cluster] = true;
  }
  for (int c = 0; c < k; ++c)
    if (!cluster_done[c]) ++est.surplus_clusters;

  if (opts.one_step) {
    for (int id : observed)
      if (est.states[id] != SpaceState::OCCUPIED)
        est.states[id] = SpaceState::FREE;
    return est;
  }

  // Two-step: FREE is asserted only where a detected gap covers the space.
  for (const auto& g : gaps) {
    if (g.free_spaces < 1) continue;
    if (g.left_cluster >= k || g.right_cluster >= k) continue;
    const double t_left = clusters.centroids[g.left_cluster].dot(axis);
    const double t_right = clusters.centroids[g.right_cluster].dot(axis);
    const double mid = 0.5 * (t_left + t_right);
    const double half = 0.5 * g.gap_distance;
    for (int id : observed) {
      if (est.states[id] == SpaceState::OCCUPIED) continue;
      const ParkingSpace* s = map.find(id);
      if (!s) continue;
      if (std::abs((s->center - clusters.centroids[g.left_cluster]).dot(perp)) >
          opts.max_lateral)
        continue;
      if (std::abs(s->center.dot(axis) - mid) <= half)
        est.states[id] = SpaceState::FREE;
    }
  }
  // Covered spaces between the outermost clusters with no supporting gap
  // evidence are reported as not available: availability claims are the
  // costly ones to get wrong. Beyond the detected structure the matcher
  // abstains.
  if (k > 0) {
    double lo = 1e300, hi = -1e300;
    for (int c = 0; c < k; ++c) {
      const double t = clusters.centroids[c].dot(axis);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    for (int id : observed) {
      if (est.states[id] != SpaceState::UNOBSERVED) continue;
      const ParkingSpace* s = map.find(id);
      if (!s) continue;
      const double extent =
          s->kind == SpaceKind::PERPENDICULAR ? s->width : s->length;
      const double t = s->center.dot(axis);
      if (t >= lo - 0.5 * extent && t <= hi + 0.5 * extent)
        est.states[id] = SpaceState::OCCUPIED;
    }
  }
  return est;
}

}  // namespace parkdet
