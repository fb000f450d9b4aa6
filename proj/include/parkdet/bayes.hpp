#pragma once

#include <map>
#include <vector>

#include "parkdet/mapmatch.hpp"

namespace parkdet {

// Log-odds are clamped so the probability stays within 1e-6 of {0, 1}.
constexpr double kLogOddsCap = 13.8;

struct SpaceBelief {
  // Evidence is kept as integer report counts and recombined as
  // count * delta, so fusion without decay is bit-identical under any
  // observation ordering (incremental float addition would not be).
  // stale_log_odds holds evidence folded out of count form by decay or a
  // model change. The clamp is applied on read, never on the stored value.
  double raw_log_odds = 0.0;   // stale_log_odds + counts x model deltas
  double stale_log_odds = 0.0;
  int occ_reports = 0;
  int free_reports = 0;
  double occ_delta = 0.0;      // model deltas the counts were taken under
  double free_delta = 0.0;
  int trip_count = 0;
  double last_update = 0.0;  // seconds

  double log_odds() const {
    return raw_log_odds > kLogOddsCap    ? kLogOddsCap
           : raw_log_odds < -kLogOddsCap ? -kLogOddsCap
                                         : raw_log_odds;
  }
};

struct OccupancyPosterior {
  std::map<int, SpaceBelief> beliefs;  // space_id -> belief

  double probability(int space_id) const;
};

// Confusion-channel measurement model calibrated from hypothesis-testing
// counts: e1 = P(report FREE | occupied), e2 = P(report OCCUPIED | free).
struct MeasurementModel {
  double e1 = 0.15;
  double e2 = 0.05;
};

struct TripObservation {
  int vehicle_id = 0;
  int trip_id = 0;
  std::vector<SegmentEstimate> estimates;  // whole-trip segment estimates
  double t = 0.0;                          // trip end time
};

// Per-space independent Bernoulli update in log-odds. OCCUPIED adds
// ln((1-e1)/e2), FREE adds ln(e1/(1-e2)), UNOBSERVED spaces are untouched.
// decay_half_life > 0 decays stale beliefs toward even odds before the
// update (in/out events make old evidence perishable); 0 disables it.
OccupancyPosterior update(const OccupancyPosterior& prior,
                          const TripObservation& obs,
                          const MeasurementModel& model,
                          double decay_half_life = 0.0);

// Folds update over all observations; order-independent by log-odds
// additivity.
OccupancyPosterior fuse_fleet(const OccupancyPosterior& priors,
                              const std::vector<TripObservation>& observations,
                              const MeasurementModel& model);

// Estimates e1/e2 from reports against ground truth, Laplace-smoothed by
// +1 / +2 so both rates stay inside (0, 1). UNOBSERVED reports are skipped.
MeasurementModel calibrate_model(const std::vector<SegmentEstimate>& reports,
                                 const std::map<int, SpaceState>& truth);

}  // namespace parkdet
