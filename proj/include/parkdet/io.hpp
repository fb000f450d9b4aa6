#pragma once

#include <map>
#include <string>
#include <vector>

#include "parkdet/bayes.hpp"
#include "parkdet/clustering.hpp"
#include "parkdet/eval.hpp"
#include "parkdet/geo_sync.hpp"
#include "parkdet/mapmatch.hpp"
#include "parkdet/margins.hpp"

namespace parkdet {

// All files are plain CSV with a header row (distances in meters, times in
// seconds, angles in radians), except the parking map and run manifest which
// are JSON. Readers throw std::runtime_error naming the offending row.

void write_gps_csv(const std::string& path, const std::vector<ProbePose>& poses);
// Accepts either t,x,y,phi (planar) or t,lat,lon,phi (converted via UTM).
std::vector<ProbePose> read_gps_csv(const std::string& path);

void write_radar_csv(const std::string& path,
                     const std::vector<LocalDetection>& dets);
std::vector<LocalDetection> read_radar_csv(const std::string& path);

// space_id,pass_id,state with state 1 = occupied, 0 = free.
void write_truth_csv(const std::string& path,
                     const std::vector<std::map<int, SpaceState>>& truth);
std::vector<std::map<int, SpaceState>> read_truth_csv(const std::string& path);

void write_map_json(const std::string& path, const ParkingMap& map);
ParkingMap read_map_json(const std::string& path);

// t,zx,zy,label plus a JSON sidecar (<path>.meta.json) with method,
// bandwidth and centroids.
void write_clusters_csv(const std::string& path, const ClusterSet& clusters);

void write_boundaries_csv(const std::string& path,
                          const std::vector<LinearBoundary>& boundaries,
                          const std::vector<GapReport>& gaps);

// space_id,state,segment_id,mean_speed with state 1/0/-1 (-1 = unobserved).
void write_estimates_csv(const std::string& path,
                         const std::vector<SegmentEstimate>& estimates);
std::vector<SegmentEstimate> read_estimates_csv(const std::string& path);

void write_posterior_csv(const std::string& path,
                         const OccupancyPosterior& posterior);

void write_reports_csv(const std::string& path,
                       const std::vector<ErrorReport>& reports);
std::vector<ErrorReport> read_reports_csv(const std::string& path);

void write_tune_curve_csv(const std::string& path, const TuneCurve& curve);
void write_histogram_csv(const std::string& path, const RateHistogram& hist);

// FNV-1a 64-bit content hash, hex encoded; used by the run manifest.
std::string file_hash_hex(const std::string& path);

void write_manifest(const std::string& path, const std::string& subcommand,
                    const std::map<std::string, std::string>& config,
                    const std::vector<std::string>& artifacts);

}  // namespace parkdet
