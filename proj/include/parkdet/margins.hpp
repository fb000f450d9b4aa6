#pragma once

#include <vector>

#include "parkdet/clustering.hpp"
#include "parkdet/geometry.hpp"

namespace parkdet {

// Maximum-margin linear boundary between two along-track-adjacent clusters.
// The boundary is w.x + b = 0 with ||w|| = 1, w oriented toward increasing
// along-track coordinate.
struct LinearBoundary {
  Vec2 w;
  double b = 0.0;
  double margin_width = 0.0;  // meters, 2 / ||w_raw||
  int left_cluster = 0;
  int right_cluster = 0;
  double slack_total = 0.0;   // hinge-loss violation mass, meters
};

struct GapReport {
  int left_cluster = 0;
  int right_cluster = 0;
  double gap_distance = 0.0;  // along-track clearance between margin planes
  int free_spaces = 0;
  double reference_dim = 0.0; // average vehicle length or width used
};

// Raw-scale two-class soft-margin solution, exposed for oracle comparison.
// objective = 0.5 ||w||^2 + C * sum of hinge losses.
struct SvmSolution {
  Vec2 w;
  double b = 0.0;
  double objective = 0.0;
  double slack_total = 0.0;
  int iterations = 0;
};

// Solves the two-class linear soft-margin problem (labels -1 for `neg`,
// +1 for `pos`) by SMO on the dual, duality-style KKT tolerance 1e-8.
// Deterministic. Both classes must be non-empty.
SvmSolution solve_soft_margin(const std::vector<Vec2>& neg,
                              const std::vector<Vec2>& pos, double c_soft);

// Fits one boundary per along-track-adjacent cluster pair; exactly
// max(0, n_clusters - 1) boundaries. Points are re-expressed in the
// (along-track, cross-track) frame given by `axis` before solving.
// Noise points (label -1) are ignored.
std::vector<LinearBoundary> fit_pairwise_boundaries(const ClusterSet& clusters,
                                                    double c_soft,
                                                    Vec2 axis = {1.0, 0.0});

// Converts inter-boundary clearances into free-space counts:
// free = floor(gap / reference_dim) when gap >= threshold_ratio *
// reference_dim, else 0.
std::vector<GapReport> detect_gaps(const std::vector<LinearBoundary>& boundaries,
                                   double reference_dim, double threshold_ratio,
                                   Vec2 axis = {1.0, 0.0});

}  // namespace parkdet
