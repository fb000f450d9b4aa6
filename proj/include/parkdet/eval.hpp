#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "parkdet/pipeline.hpp"
#include "parkdet/simulate.hpp"

namespace parkdet {

// Per-segment hypothesis-testing outcome. A rate is absent when its
// denominator is zero; it is never coerced to 0.
struct ErrorReport {
  int segment_id = 0;
  std::optional<double> type1_rate;  // P(judged FREE | occupied, observed)
  std::optional<double> type2_rate;  // P(judged OCCUPIED | free, observed)
  int n_occ_observed = 0;
  int n_free_observed = 0;
  double mean_speed = 0.0;
};

ErrorReport score_segment(const SegmentEstimate& estimate,
                          const std::map<int, SpaceState>& truth);

struct RegressionResult {
  double slope = 0.0;      // rate per (m/s)
  double intercept = 0.0;
  double p_value = 1.0;    // two-sided t-test on the slope, n-2 dof
  double r2 = 0.0;
  int n = 0;
};

// OLS of type1_rate on mean_speed over reports with a defined Type I rate.
// Needs >= 3 such reports with non-identical speeds. use_type2 switches the
// response to the Type II rate.
RegressionResult regress_error_speed(const std::vector<ErrorReport>& reports,
                                     bool use_type2 = false);

enum class RateKind { TYPE1, TYPE2, OVERALL };

struct RateHistogram {
  std::vector<int> counts;  // equal-width bins over [0, 1]
  int undefined = 0;        // reports whose selected rate was undefined
};

RateHistogram histogram_rates(const std::vector<ErrorReport>& reports, int bins,
                              RateKind kind = RateKind::OVERALL);

// One recorded pass of one scenario: the raw streams plus the truth they
// were generated from.
struct Trial {
  ParkingMap map;
  std::map<int, SpaceState> truth;
  std::vector<ProbePose> poses;
  std::vector<LocalDetection> detections;
};

struct TunePoint {
  double bandwidth = 0.0;
  std::optional<double> type1_rate;  // pooled over all trials and segments
  std::optional<double> type2_rate;
  double objective = 0.0;            // weighted sum used for the argmin
};

struct TuneCurve {
  std::vector<TunePoint> points;
  std::size_t best = 0;  // index of the argmin of the objective
};

// Runs the full MSC pipeline per bandwidth and pools error rates.
// type1_weight biases the combined objective toward the costlier error.
TuneCurve tune_bandwidth(const std::vector<Trial>& trials,
                         const std::vector<double>& grid,
                         const DetectConfig& base, double type1_weight = 1.0);

// Convenience: scores every segment of a detection run against truth.
std::vector<ErrorReport> score_run(const std::vector<SegmentResult>& results,
                                   const std::map<int, SpaceState>& truth);

// Two-sided Student-t tail probability, exposed for the statistics tests.
double student_t_two_sided_p(double t_stat, double dof);

}  // namespace parkdet
