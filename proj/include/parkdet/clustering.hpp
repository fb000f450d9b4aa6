#pragma once

#include <cstdint>
#include <vector>

#include "parkdet/geo_sync.hpp"
#include "parkdet/geometry.hpp"

namespace parkdet {

enum class ClusterMethod { MSC, GMM_AIC, GMM_Y, KMEANS };

// Admissible mean-shift bandwidth range: no less than the width of a
// passenger vehicle, no greater than the maximum length.
constexpr double kMinBandwidth = 1.5;
constexpr double kMaxBandwidth = 5.5;

// Segments are kept small upstream; a single clustering call is capped.
constexpr std::size_t kMaxPointsPerSegment = 10000;

struct ClusterSet {
  std::vector<GlobalDetection> points;
  std::vector<int> labels;       // one per point; -1 = noise
  std::vector<Vec2> centroids;   // one per cluster, global frame
  double bandwidth = 0.0;        // MSC only
  ClusterMethod method = ClusterMethod::MSC;

  std::size_t cluster_count() const { return centroids.size(); }
};

struct MscConfig {
  double bandwidth = 2.0;        // meters (the flat-kernel window radius)
  double convergence_eps = 1e-3; // meters
  double merge_radius = 0.0;     // meters; 0 means bandwidth / 2
  int max_iters = 300;
};

// Flat kernel: 1 iff ||offset|| <= lambda (boundary inclusive).
int flat_kernel(const Vec2& offset, double lambda);

// One mean-shift iteration: arithmetic mean of the points within lambda of
// x_c. Throws if the window is empty.
Vec2 mean_shift_step(const std::vector<Vec2>& points, const Vec2& x_c,
                     double lambda);

// Mean-shift clustering with flat kernel, seeded from every data point.
// Labels are canonicalized by ascending centroid projection on `axis`
// (the along-track direction). The parallel variant runs the per-seed mode
// search with OpenMP; results are identical to the serial reference.
ClusterSet mean_shift_cluster(const std::vector<GlobalDetection>& points,
                              const MscConfig& cfg, Vec2 axis = {1.0, 0.0});
ClusterSet mean_shift_cluster_serial(const std::vector<GlobalDetection>& points,
                                     const MscConfig& cfg,
                                     Vec2 axis = {1.0, 0.0});

// K-means baseline with seeded farthest-point init; k selected over 1..k_max
// by mean silhouette (k = 1 when the best silhouette is below 0.25).
ClusterSet kmeans_cluster(const std::vector<GlobalDetection>& points, int k_max,
                          std::uint64_t seed, Vec2 axis = {1.0, 0.0});

// Full-covariance 2-D Gaussian mixture fitted by EM, model order selected by
// minimum AIC over 1..k_max. Hard labels by maximum responsibility.
ClusterSet gmm_aic_cluster(const std::vector<GlobalDetection>& points, int k_max,
                           std::uint64_t seed, Vec2 axis = {1.0, 0.0});

// 1-D GMM+AIC on the along-track projection (the perpendicular coordinate is
// collapsed before fitting). Centroids are recombined from the along-track
// component mean and the member mean perpendicular offset.
ClusterSet gmm_y_collapsed_cluster(const std::vector<GlobalDetection>& points,
                                   int k_max, std::uint64_t seed, Vec2 axis);

// Relabels clusters with fewer than min_points members as noise (-1) and
// renumbers the survivors. Used to drop clutter before margin fitting.
ClusterSet filter_small_clusters(const ClusterSet& in, std::size_t min_points);

}  // namespace parkdet
