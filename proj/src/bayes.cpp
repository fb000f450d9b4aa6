#include "parkdet/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parkdet {

double OccupancyPosterior::probability(int space_id) const {
  const auto it = beliefs.find(space_id);
  const double lo = it == beliefs.end() ? 0.0 : it->second.log_odds();
  return 1.0 / (1.0 + std::exp(-lo));
}

namespace {

void check_model(const MeasurementModel& m) {
  if (!(m.e1 > 0.0 && m.e1 < 1.0 && m.e2 > 0.0 && m.e2 < 1.0))
    throw std::invalid_argument("measurement model rates must lie in (0, 1)");
}

}  // namespace

OccupancyPosterior update(const OccupancyPosterior& prior,
                          const TripObservation& obs,
                          const MeasurementModel& model,
                          double decay_half_life) {
  check_model(model);
  const double occ_delta = std::log((1.0 - model.e1) / model.e2);
  const double free_delta = std::log(model.e1 / (1.0 - model.e2));

  OccupancyPosterior out = prior;
  for (const auto& est : obs.estimates) {
    for (const auto& [id, state] : est.states) {
      if (state == SpaceState::UNOBSERVED) continue;
      SpaceBelief& b = out.beliefs[id];
      // Counts only stay meaningful under the deltas they were taken with;
      // a model change or a decay step folds them into the stale scalar.
      const bool model_changed =
          (b.occ_reports > 0 || b.free_reports > 0) &&
          (b.occ_delta != occ_delta || b.free_delta != free_delta);
      const bool decay =
          decay_half_life > 0.0 && b.trip_count > 0 && obs.t > b.last_update;
      if (model_changed || decay) {
        b.stale_log_odds = b.raw_log_odds;
        b.occ_reports = 0;
        b.free_reports = 0;
      }
      if (decay)
        b.stale_log_odds *=
            std::exp2(-(obs.t - b.last_update) / decay_half_life);
      b.occ_delta = occ_delta;
      b.free_delta = free_delta;
      if (state == SpaceState::OCCUPIED)
        b.occ_reports += 1;
      else
        b.free_reports += 1;
      b.raw_log_odds = b.stale_log_odds + b.occ_reports * occ_delta +
                       b.free_reports * free_delta;
      b.trip_count += 1;
      b.last_update = obs.t;
    }
  }
  return out;
}

OccupancyPosterior fuse_fleet(const OccupancyPosterior& priors,
                              const std::vector<TripObservation>& observations,
                              const MeasurementModel& model) {
  check_model(model);
  OccupancyPosterior out = priors;
  for (const auto& obs : observations) out = update(out, obs, model);
  return out;
}

MeasurementModel calibrate_model(const std::vector<SegmentEstimate>& reports,
                                 const std::map<int, SpaceState>& truth) {
  std::size_t n_occ = 0, n_free = 0;       // observed spaces by true state
  std::size_t miss_occ = 0, miss_free = 0; // Type I / Type II counts
  for (const auto& est : reports) {
    for (const auto& [id, state] : est.states) {
      if (state == SpaceState::UNOBSERVED) continue;
      const auto it = truth.find(id);
      if (it == truth.end())
        throw std::invalid_argument("calibrate_model: space missing from truth");
      if (it->second == SpaceState::OCCUPIED) {
        ++n_occ;
        if (state == SpaceState::FREE) ++miss_occ;
      } else {
        ++n_free;
        if (state == SpaceState::OCCUPIED) ++miss_free;
      }
    }
  }
  if (n_occ + n_free == 0)
    throw std::invalid_argument("calibrate_model: no observed spaces");

  MeasurementModel m;
  m.e1 = (miss_occ + 1.0) / (n_occ + 2.0);
  m.e2 = (miss_free + 1.0) / (n_free + 2.0);
  return m;
}

}  // namespace parkdet
