#include "parkdet/pipeline.hpp"

#include <cmath>

namespace parkdet {

std::vector<SegmentResult> run_detection(const std::vector<ProbePose>& poses,
                                         const std::vector<LocalDetection>& dets,
                                         const ParkingMap& map,
                                         const DetectConfig& cfg) {
  const SyncResult synced = synchronize(poses, dets, cfg.sync_tol);
  const std::vector<TripSegment> segments =
      segment_trip(poses, synced.detections, cfg.segmentation);

  std::vector<SegmentResult> results;
  results.reserve(segments.size());
  for (const auto& seg : segments) {
    SegmentResult r;
    r.segment = seg;

    Vec2 axis{1.0, 0.0};
    if (seg.poses.size() >= 2) {
      const Vec2 d{seg.poses.back().x - seg.poses.front().x,
                   seg.poses.back().y - seg.poses.front().y};
      const double n = d.norm();
      if (n > 1e-9) axis = d / n;
    }
    r.axis = axis;

    const std::vector<int> observed = coverage_mask(
        seg, map, cfg.fov_deg, cfg.range_m,
        cfg.sensor_bearings.empty()
            ? std::vector<double>{M_PI / 2.0, -M_PI / 2.0}
            : cfg.sensor_bearings);

    if (seg.detections.empty()) {
      // Nothing sensed: everything stays UNOBSERVED.
      r.estimate.segment_id = seg.segment_id;
      r.estimate.mean_speed = seg.mean_speed;
      for (const auto& s : map.spaces)
        r.estimate.states[s.id] = SpaceState::UNOBSERVED;
      results.push_back(std::move(r));
      continue;
    }

    switch (cfg.method) {
      case ClusterMethod::MSC:
        r.clusters = mean_shift_cluster(seg.detections, cfg.msc, axis);
        break;
      case ClusterMethod::KMEANS:
        r.clusters = kmeans_cluster(seg.detections, cfg.k_max, cfg.seed, axis);
        break;
      case ClusterMethod::GMM_AIC:
        r.clusters = gmm_aic_cluster(seg.detections, cfg.k_max, cfg.seed, axis);
        break;
      case ClusterMethod::GMM_Y:
        r.clusters =
            gmm_y_collapsed_cluster(seg.detections, cfg.k_max, cfg.seed, axis);
        break;
    }
    r.clusters = filter_small_clusters(r.clusters, cfg.min_cluster_points);

    if (r.clusters.cluster_count() >= 2) {
      r.boundaries = fit_pairwise_boundaries(r.clusters, cfg.c_soft, axis);
      r.gaps = detect_gaps(r.boundaries, cfg.reference_dim, cfg.threshold_ratio,
                           axis);
    }
    r.estimate = match_segment(r.clusters, r.gaps, map, seg, observed, cfg.match);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace parkdet
