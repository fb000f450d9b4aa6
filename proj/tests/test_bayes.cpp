#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "parkdet/bayes.hpp"
#include "parkdet/rng.hpp"

using namespace parkdet;

namespace {

TripObservation one_report(int space_id, SpaceState state, double t = 0.0) {
  SegmentEstimate est;
  est.states[space_id] = state;
  TripObservation obs;
  obs.estimates.push_back(est);
  obs.t = t;
  return obs;
}

}  // namespace

TEST_CASE("a single occupied report lands on the closed-form posterior") {
  const MeasurementModel m{0.15, 0.05};
  const OccupancyPosterior post =
      update({}, one_report(7, SpaceState::OCCUPIED), m);
  // P(occ | report occ) = 0.85 / (0.85 + 0.05) with an even prior.
  CHECK(post.probability(7) == doctest::Approx(0.85 / 0.90).epsilon(1e-12));
  CHECK(post.beliefs.at(7).raw_log_odds ==
        doctest::Approx(std::log(0.85 / 0.05)).epsilon(1e-12));
  CHECK(post.beliefs.at(7).trip_count == 1);
  // A free report pushes the other way by the mirrored ratio.
  const OccupancyPosterior post2 =
      update({}, one_report(7, SpaceState::FREE), m);
  CHECK(post2.probability(7) == doctest::Approx(0.15 / 1.10).epsilon(1e-12));
}

TEST_CASE("an uninformative sensor leaves the posterior even") {
  const MeasurementModel coin{0.5, 0.5};
  OccupancyPosterior post;
  for (int i = 0; i < 10; ++i)
    post = update(post, one_report(3, SpaceState::OCCUPIED), coin);
  CHECK(post.probability(3) == doctest::Approx(0.5));
  CHECK(post.beliefs.at(3).raw_log_odds == doctest::Approx(0.0));
}

TEST_CASE("unobserved spaces and unknown ids stay at even odds") {
  const MeasurementModel m{0.15, 0.05};
  const OccupancyPosterior post =
      update({}, one_report(1, SpaceState::UNOBSERVED), m);
  CHECK(post.beliefs.count(1) == 0);
  CHECK(post.probability(1) == doctest::Approx(0.5));
  CHECK(post.probability(99) == doctest::Approx(0.5));
}

TEST_CASE("log odds accumulate raw but are capped on read") {
  const MeasurementModel m{0.15, 0.05};
  OccupancyPosterior post;
  for (int i = 0; i < 40; ++i)
    post = update(post, one_report(0, SpaceState::OCCUPIED), m);
  const SpaceBelief& b = post.beliefs.at(0);
  CHECK(b.raw_log_odds == doctest::Approx(40.0 * std::log(0.85 / 0.05)));
  CHECK(b.log_odds() == kLogOddsCap);
  CHECK(post.probability(0) < 1.0);
  CHECK(post.probability(0) > 1.0 - 2e-6);
}

TEST_CASE("fleet fusion is bit-identical under observation reordering") {
  const MeasurementModel m{0.15, 0.05};
  auto rng = substream(41, "fleet");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TripObservation> obs;
  for (int trip = 0; trip < 25; ++trip) {
    SegmentEstimate est;
    for (int id = 0; id < 10; ++id) {
      const double r = u(rng);
      est.states[id] = r < 0.4   ? SpaceState::OCCUPIED
                       : r < 0.7 ? SpaceState::FREE
                                 : SpaceState::UNOBSERVED;
    }
    TripObservation o;
    o.trip_id = trip;
    o.estimates.push_back(est);
    obs.push_back(o);
  }
  const OccupancyPosterior a = fuse_fleet({}, obs, m);
  std::vector<TripObservation> shuffled = obs;
  std::shuffle(shuffled.begin(), shuffled.end(), substream(41, "perm"));
  const OccupancyPosterior b = fuse_fleet({}, shuffled, m);
  REQUIRE(a.beliefs.size() == b.beliefs.size());
  for (const auto& [id, belief] : a.beliefs) {
    CHECK(b.beliefs.at(id).raw_log_odds == belief.raw_log_odds);  // exact
    CHECK(b.beliefs.at(id).trip_count == belief.trip_count);
  }
}

TEST_CASE("stale evidence decays by the configured half-life") {
  const MeasurementModel m{0.15, 0.05};
  OccupancyPosterior post =
      update({}, one_report(2, SpaceState::OCCUPIED, 0.0), m);
  const double first = post.beliefs.at(2).raw_log_odds;
  // One half-life later an uninformative update halves the stored evidence.
  post = update(post, one_report(2, SpaceState::OCCUPIED, 600.0),
                MeasurementModel{0.5, 0.5}, 600.0);
  CHECK(post.beliefs.at(2).raw_log_odds == doctest::Approx(0.5 * first));
  // Without a half-life the evidence is preserved untouched.
  OccupancyPosterior keep =
      update({}, one_report(2, SpaceState::OCCUPIED, 0.0), m);
  keep = update(keep, one_report(2, SpaceState::OCCUPIED, 600.0),
                MeasurementModel{0.5, 0.5}, 0.0);
  CHECK(keep.beliefs.at(2).raw_log_odds == doctest::Approx(first));
}

TEST_CASE("model rates outside (0,1) are rejected") {
  CHECK_THROWS_AS(update({}, one_report(0, SpaceState::FREE), {0.0, 0.05}),
                  std::invalid_argument);
  CHECK_THROWS_AS(update({}, one_report(0, SpaceState::FREE), {0.15, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("calibration counts confusions with Laplace smoothing") {
  std::map<int, SpaceState> truth{{0, SpaceState::OCCUPIED},
                                  {1, SpaceState::OCCUPIED},
                                  {2, SpaceState::OCCUPIED},
                                  {3, SpaceState::OCCUPIED},
                                  {4, SpaceState::FREE},
                                  {5, SpaceState::FREE},
                                  {6, SpaceState::FREE}};
  SegmentEstimate est;
  est.states[0] = SpaceState::OCCUPIED;
  est.states[1] = SpaceState::OCCUPIED;
  est.states[2] = SpaceState::OCCUPIED;
  est.states[3] = SpaceState::FREE;       // one miss on four occupied
  est.states[4] = SpaceState::FREE;
  est.states[5] = SpaceState::FREE;
  est.states[6] = SpaceState::UNOBSERVED; // skipped entirely
  const MeasurementModel m = calibrate_model({est}, truth);
  CHECK(m.e1 == doctest::Approx((1.0 + 1.0) / (4.0 + 2.0)));
  CHECK(m.e2 == doctest::Approx((0.0 + 1.0) / (2.0 + 2.0)));

  SegmentEstimate none;
  none.states[0] = SpaceState::UNOBSERVED;
  CHECK_THROWS_AS(calibrate_model({none}, truth), std::invalid_argument);
}
