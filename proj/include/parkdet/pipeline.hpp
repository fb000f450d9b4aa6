#pragma once

#include <cstdint>
#include <vector>

#include "parkdet/clustering.hpp"
#include "parkdet/geo_sync.hpp"
#include "parkdet/mapmatch.hpp"
#include "parkdet/margins.hpp"

namespace parkdet {

// Full four-step detection chain: preprocessing, clustering, margin fitting,
// map matching.
struct DetectConfig {
  ClusterMethod method = ClusterMethod::MSC;
  MscConfig msc;
  int k_max = 20;                  // baseline model-order sweep bound
  double c_soft = 10.0;
  double reference_dim = kMinBandwidth;  // set from the scenario kind
  double threshold_ratio = 1.0;
  std::size_t min_cluster_points = 12;    // clutter rejection
  double sync_tol = 0.1;
  SegmentOptions segmentation;
  MatchOptions match;
  double fov_deg = 80.0;
  double range_m = 10.0;
  std::vector<double> sensor_bearings;   // empty: side-looking defaults
  std::uint64_t seed = 0;                // baselines' initialization stream
};

struct SegmentResult {
  TripSegment segment;
  Vec2 axis;  // along-track unit direction used downstream
  ClusterSet clusters;
  std::vector<LinearBoundary> boundaries;
  std::vector<GapReport> gaps;
  SegmentEstimate estimate;
};

std::vector<SegmentResult> run_detection(const std::vector<ProbePose>& poses,
                                         const std::vector<LocalDetection>& dets,
                                         const ParkingMap& map,
                                         const DetectConfig& cfg);

}  // namespace parkdet
