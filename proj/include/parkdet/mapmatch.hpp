#pragma once

#include <map>
#include <vector>

#include "parkdet/clustering.hpp"
#include "parkdet/geo_sync.hpp"
#include "parkdet/geometry.hpp"
#include "parkdet/margins.hpp"

namespace parkdet {

enum class SpaceKind { PARALLEL, PERPENDICULAR };

struct ParkingSpace {
  int id = 0;
  Vec2 center;             // meters, global frame
  double orientation = 0.0;  // radians, long axis direction
  double length = 4.5;
  double width = 1.8;
  SpaceKind kind = SpaceKind::PERPENDICULAR;
};

struct ParkingRow {
  std::vector<int> space_ids;  // adjacency order along the row
};

struct ParkingMap {
  std::vector<ParkingSpace> spaces;
  std::vector<ParkingRow> rows;

  const ParkingSpace* find(int id) const {
    for (const auto& s : spaces)
      if (s.id == id) return &s;
    return nullptr;
  }
};

enum class SpaceState { FREE = 0, OCCUPIED = 1, UNOBSERVED = 2 };

struct SegmentEstimate {
  std::map<int, SpaceState> states;  // space_id -> state
  int segment_id = 0;
  double mean_speed = 0.0;
  int surplus_clusters = 0;  // clusters that could not be assigned
  int ties = 0;              // equidistant assignments broken by lower id
};

struct MatchOptions {
  double max_lateral = 10.0;  // meters; sensor range
  // A cluster may take a space whose along-row offset is at most this factor
  // times the space's along-row extent.
  double assign_radius_factor = 0.75;
  // One-step mode: observed spaces with no assigned cluster become FREE
  // directly (the baseline the two-step scheme improves on).
  bool one_step = false;
};

// Returns the ids of spaces whose center falls inside any pose's sensor
// wedge (FOV centered on each configured bearing, range inclusive).
std::vector<int> coverage_mask(const TripSegment& segment, const ParkingMap& map,
                               double fov_deg, double range_m,
                               const std::vector<double>& sensor_bearings = {
                                   M_PI / 2.0, -M_PI / 2.0});

// One-to-one assignment of cluster centroids to space centers along the row,
// gap intervals marked FREE, everything else in coverage left UNOBSERVED.
SegmentEstimate match_segment(const ClusterSet& clusters,
                              const std::vector<GapReport>& gaps,
                              const ParkingMap& map, const TripSegment& segment,
                              const std::vector<int>& observed,
                              const MatchOptions& opts = {});

}  // namespace parkdet
