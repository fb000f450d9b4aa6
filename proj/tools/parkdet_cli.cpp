// parkdet: reproducible parking-occupancy detection experiments.
//
// Subcommands: simulate | detect | tune | fuse | eval. Every stochastic run
// takes a --seed and reruns are byte-identical.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parkdet/bayes.hpp"
#include "parkdet/eval.hpp"
#include "parkdet/io.hpp"
#include "parkdet/pipeline.hpp"
#include "parkdet/rng.hpp"
#include "parkdet/simulate.hpp"

namespace fs = std::filesystem;
using namespace parkdet;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("PARKDET_OUT");
  return env ? env : ".";
}

std::vector<double> parse_grid(const std::string& spec) {
  // lo:step:hi, inclusive of both ends.
  const auto c1 = spec.find(':');
  const auto c2 = spec.rfind(':');
  if (c1 == std::string::npos || c1 == c2)
    throw std::runtime_error("grid must be lo:step:hi");
  const double lo = std::stod(spec.substr(0, c1));
  const double step = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
  const double hi = std::stod(spec.substr(c2 + 1));
  if (step <= 0.0 || hi < lo) throw std::runtime_error("bad grid bounds");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double v = lo + i * step;
    if (v > hi + 1e-9) break;
    grid.push_back(v);
  }
  return grid;
}

ScenarioConfig preset_by_name(const std::string& name, std::uint64_t seed) {
  if (name == "fig1") return preset_fig1(seed);
  if (name == "offstreet") return preset_offstreet(seed);
  if (name == "onstreet") return preset_onstreet(seed);
  throw std::runtime_error("unknown preset: " + name);
}

ClusterMethod method_by_name(const std::string& name) {
  if (name == "msc") return ClusterMethod::MSC;
  if (name == "gmm") return ClusterMethod::GMM_AIC;
  if (name == "gmm-y") return ClusterMethod::GMM_Y;
  if (name == "kmeans") return ClusterMethod::KMEANS;
  throw std::runtime_error("unknown method: " + name);
}

struct SimulateArgs {
  std::string preset = "fig1";
  std::string out = default_out_dir();
  std::uint64_t seed = 0;
  int spaces = -1;
  int passes = -1;
  double occupancy = -1.0;
  double event_rate = -1.0;
  double pitch = -1.0;
  double depth = -1.0;
  double speed_mph = -1.0;
  double offset = -1.0;
  double noise = -1.0;
  double det_prob = -1.0;
  double clutter = -1.0;
  bool round_trip = false;
};

int run_simulate(const SimulateArgs& a) {
  ScenarioConfig cfg = preset_by_name(a.preset, a.seed);
  if (a.spaces == 0 || a.passes == 0) {
    std::cerr << "simulate: spaces/passes must be positive\n";
    return 2;
  }
  if (a.spaces > 0) {
    cfg.n_spaces = a.spaces;
    cfg.fixed_free.clear();
  }
  if (a.passes > 0) cfg.n_passes = a.passes;
  if (a.occupancy >= 0.0) {
    cfg.occupancy_rate = a.occupancy;
    cfg.fixed_free.clear();
  }
  if (a.event_rate >= 0.0) cfg.event_rate = a.event_rate;
  if (a.pitch > 0.0) cfg.space_pitch = a.pitch;
  if (a.depth > 0.0) cfg.space_depth = a.depth;

  SensorConfig sensors = default_sensor_config();
  if (a.noise >= 0.0) sensors.noise_sigma = a.noise;
  if (a.det_prob >= 0.0) sensors.detection_prob = a.det_prob;
  if (a.clutter >= 0.0) sensors.clutter_rate = a.clutter;

  PathSpec path;
  if (a.speed_mph > 0.0) path.speed = a.speed_mph * kMphToMps;
  if (a.offset > 0.0) path.offset = a.offset;
  path.round_trip = a.round_trip;

  const Scenario sc = generate_scenario(cfg);
  fs::create_directories(a.out);
  std::vector<std::string> artifacts;
  const std::string map_path = a.out + "/map.json";
  const std::string truth_path = a.out + "/truth.csv";
  write_map_json(map_path, sc.map);
  write_truth_csv(truth_path, sc.truth);
  artifacts.push_back(map_path);
  artifacts.push_back(truth_path);
  for (int p = 0; p < cfg.n_passes; ++p) {
    const TripData trip =
        generate_trip(sc.map, sc.truth[p], path, sensors,
                      substream_seed(a.seed, "pass" + std::to_string(p)));
    const std::string gps = a.out + "/gps_" + std::to_string(p) + ".csv";
    const std::string radar = a.out + "/radar_" + std::to_string(p) + ".csv";
    write_gps_csv(gps, trip.poses);
    write_radar_csv(radar, trip.detections);
    artifacts.push_back(gps);
    artifacts.push_back(radar);
  }
  write_manifest(a.out + "/manifest.json", "simulate",
                 {{"preset", a.preset},
                  {"seed", std::to_string(a.seed)},
                  {"spaces", std::to_string(cfg.n_spaces)},
                  {"passes", std::to_string(cfg.n_passes)}},
                 artifacts);
  std::cout << "simulate: " << cfg.n_spaces << " spaces, " << cfg.n_passes
            << " passes, " << sc.n_events << " events -> " << a.out << "\n";
  return 0;
}

struct DetectArgs {
  std::string gps, radar, map;
  std::string out = default_out_dir();
  std::string method = "msc";
  double bandwidth = 2.0;
  double c_soft = 10.0;
  double reference_dim = 0.0;  // 0: from map kind
  double threshold_ratio = 1.0;
  int k_max = 20;
  int min_points = 12;
  bool one_step = false;
  std::uint64_t seed = 0;
};

int run_detect(const DetectArgs& a) {
  if (a.bandwidth < kMinBandwidth || a.bandwidth > kMaxBandwidth) {
    std::cerr << "detect: bandwidth " << a.bandwidth
              << " outside admissible range [" << kMinBandwidth << ", "
              << kMaxBandwidth << "]\n";
    return 2;
  }
  const ParkingMap map = read_map_json(a.map);
  const auto poses = read_gps_csv(a.gps);
  const auto dets = read_radar_csv(a.radar);

  DetectConfig cfg;
  cfg.method = method_by_name(a.method);
  cfg.msc.bandwidth = a.bandwidth;
  cfg.c_soft = a.c_soft;
  cfg.k_max = a.k_max;
  cfg.min_cluster_points = a.min_points;
  cfg.match.one_step = a.one_step;
  cfg.seed = a.seed;
  if (a.reference_dim > 0.0) {
    cfg.reference_dim = a.reference_dim;
  } else {
    cfg.reference_dim = !map.spaces.empty() &&
                                map.spaces.front().kind == SpaceKind::PARALLEL
                            ? kVehicleLength
                            : kVehicleWidth;
  }
  cfg.threshold_ratio = a.threshold_ratio;

  const auto results = run_detection(poses, dets, map, cfg);
  fs::create_directories(a.out);
  std::vector<std::string> artifacts;
  std::vector<SegmentEstimate> estimates;
  int occupied = 0;
  for (const auto& r : results) {
    estimates.push_back(r.estimate);
    const std::string suffix = std::to_string(r.segment.segment_id);
    const std::string cl = a.out + "/clusters_" + suffix + ".csv";
    write_clusters_csv(cl, r.clusters);
    artifacts.push_back(cl);
    const std::string bd = a.out + "/boundaries_" + suffix + ".csv";
    write_boundaries_csv(bd, r.boundaries, r.gaps);
    artifacts.push_back(bd);
    for (const auto& [id, st] : r.estimate.states)
      if (st == SpaceState::OCCUPIED) ++occupied;
  }
  const std::string est_path = a.out + "/estimates.csv";
  write_estimates_csv(est_path, estimates);
  artifacts.push_back(est_path);
  write_manifest(a.out + "/detect_manifest.json", "detect",
                 {{"method", a.method},
                  {"bandwidth", std::to_string(a.bandwidth)},
                  {"seed", std::to_string(a.seed)}},
                 artifacts);
  std::cout << "detect: " << results.size() << " segments, " << occupied
            << " occupied-space reports -> " << est_path << "\n";
  return 0;
}

struct TuneArgs {
  std::vector<std::string> dirs;  // simulate output directories
  std::string out = default_out_dir();
  std::string grid = "1.5:0.25:5.5";
  double type1_weight = 1.0;
  int min_points = 12;
};

int run_tune(const TuneArgs& a) {
  const auto grid = parse_grid(a.grid);
  std::vector<Trial> trials;
  DetectConfig base;
  base.min_cluster_points = a.min_points;
  for (const auto& dir : a.dirs) {
    const ParkingMap map = read_map_json(dir + "/map.json");
    const auto truth = read_truth_csv(dir + "/truth.csv");
    if (!map.spaces.empty() && map.spaces.front().kind == SpaceKind::PARALLEL)
      base.reference_dim = kVehicleLength;
    else
      base.reference_dim = kVehicleWidth;
    for (std::size_t p = 0; p < truth.size(); ++p) {
      const std::string gps = dir + "/gps_" + std::to_string(p) + ".csv";
      if (!fs::exists(gps)) break;
      Trial t;
      t.map = map;
      t.truth = truth[p];
      t.poses = read_gps_csv(gps);
      t.detections = read_radar_csv(dir + "/radar_" + std::to_string(p) + ".csv");
      trials.push_back(std::move(t));
    }
  }
  const TuneCurve curve = tune_bandwidth(trials, grid, base, a.type1_weight);
  fs::create_directories(a.out);
  const std::string curve_path = a.out + "/tune_curve.csv";
  write_tune_curve_csv(curve_path, curve);
  write_manifest(a.out + "/tune_manifest.json", "tune",
                 {{"grid", a.grid},
                  {"type1_weight", std::to_string(a.type1_weight)}},
                 {curve_path});
  std::cout << "tune: " << curve.points.size() << " bandwidths, optimum "
            << curve.points[curve.best].bandwidth << " m -> " << curve_path
            << "\n";
  return 0;
}

struct FuseArgs {
  std::vector<std::string> estimate_files;
  std::string out = default_out_dir();
  double e1 = 0.15;
  double e2 = 0.05;
  int trips = 0;  // when > 0: simulate+detect that many trips of a preset
  std::string preset = "fig1";
  std::uint64_t seed = 0;
  double decay_half_life = 0.0;
};

int run_fuse(const FuseArgs& a) {
  MeasurementModel model{a.e1, a.e2};
  std::vector<TripObservation> observations;
  int trip_id = 0;
  for (const auto& path : a.estimate_files) {
    TripObservation obs;
    obs.trip_id = trip_id++;
    obs.estimates = read_estimates_csv(path);
    obs.t = trip_id;
    observations.push_back(std::move(obs));
  }
  if (a.trips > 0) {
    ScenarioConfig scfg = preset_by_name(a.preset, a.seed);
    scfg.n_passes = 1;
    const Scenario sc = generate_scenario(scfg);
    const SensorConfig sensors = default_sensor_config();
    DetectConfig dcfg;
    dcfg.reference_dim =
        scfg.kind == ScenarioKind::ON_STREET ? kVehicleLength : kVehicleWidth;
    for (int i = 0; i < a.trips; ++i) {
      const TripData trip =
          generate_trip(sc.map, sc.truth[0], PathSpec{}, sensors,
                        substream_seed(a.seed, "fuse" + std::to_string(i)));
      const auto results =
          run_detection(trip.poses, trip.detections, sc.map, dcfg);
      TripObservation obs;
      obs.vehicle_id = i;
      obs.trip_id = trip_id++;
      obs.t = trip_id;
      for (const auto& r : results) obs.estimates.push_back(r.estimate);
      observations.push_back(std::move(obs));
    }
  }
  OccupancyPosterior posterior;
  for (const auto& obs : observations)
    posterior = update(posterior, obs, model, a.decay_half_life);

  fs::create_directories(a.out);
  const std::string post_path = a.out + "/posterior.csv";
  write_posterior_csv(post_path, posterior);
  write_manifest(a.out + "/fuse_manifest.json", "fuse",
                 {{"e1", std::to_string(a.e1)},
                  {"e2", std::to_string(a.e2)},
                  {"trips", std::to_string(observations.size())},
                  {"seed", std::to_string(a.seed)}},
                 {post_path});
  std::cout << "fuse: " << observations.size() << " trips, "
            << posterior.beliefs.size() << " spaces -> " << post_path << "\n";
  return 0;
}

struct EvalArgs {
  std::string estimates, truth;
  std::string out = default_out_dir();
  int pass = 0;
  std::string regress;  // "speed" enables the regression line
  int hist_bins = 0;
  std::vector<std::string> report_files;  // pre-scored reports to pool
};

int run_eval(const EvalArgs& a) {
  fs::create_directories(a.out);
  std::vector<ErrorReport> reports;
  std::vector<std::string> artifacts;
  if (!a.estimates.empty()) {
    const auto estimates = read_estimates_csv(a.estimates);
    const auto truth = read_truth_csv(a.truth);
    if (a.pass < 0 || static_cast<std::size_t>(a.pass) >= truth.size())
      throw std::runtime_error("eval: pass index out of range");
    for (const auto& est : estimates)
      reports.push_back(score_segment(est, truth[a.pass]));
    const std::string rep_path = a.out + "/reports.csv";
    write_reports_csv(rep_path, reports);
    artifacts.push_back(rep_path);
    std::cout << "eval: " << reports.size() << " segments scored -> "
              << rep_path << "\n";
  }
  for (const auto& rf : a.report_files) {
    const auto more = read_reports_csv(rf);
    reports.insert(reports.end(), more.begin(), more.end());
  }
  if (a.regress == "speed") {
    const RegressionResult r = regress_error_speed(reports);
    std::cout << "regression: slope " << r.slope << " intercept " << r.intercept
              << " p " << r.p_value << " r2 " << r.r2 << " n " << r.n << "\n";
  }
  if (a.hist_bins > 0) {
    const RateHistogram h = histogram_rates(reports, a.hist_bins);
    const std::string hist_path = a.out + "/histogram.csv";
    write_histogram_csv(hist_path, h);
    artifacts.push_back(hist_path);
    std::cout << "histogram -> " << hist_path << "\n";
  }
  if (!artifacts.empty())
    write_manifest(a.out + "/eval_manifest.json", "eval",
                   {{"pass", std::to_string(a.pass)}}, artifacts);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parking occupancy detection from sparse probe-vehicle radar"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* csim = app.add_subcommand("simulate", "generate a scenario and trips");
  csim->add_option("--preset", sim.preset, "fig1 | offstreet | onstreet");
  csim->add_option("--seed", sim.seed)->required();
  csim->add_option("--out", sim.out);
  csim->add_option("--spaces", sim.spaces);
  csim->add_option("--passes", sim.passes);
  csim->add_option("--occupancy", sim.occupancy);
  csim->add_option("--events", sim.event_rate, "in/out events per pass");
  csim->add_option("--pitch", sim.pitch, "along-row stall pitch, meters");
  csim->add_option("--depth", sim.depth, "stall depth, meters");
  csim->add_option("--speed-mph", sim.speed_mph);
  csim->add_option("--offset", sim.offset, "lateral distance D, meters");
  csim->add_option("--noise", sim.noise);
  csim->add_option("--det-prob", sim.det_prob);
  csim->add_option("--clutter", sim.clutter);
  csim->add_flag("--round-trip", sim.round_trip);

  DetectArgs det;
  auto* cdet = app.add_subcommand("detect", "run the four-step pipeline");
  cdet->add_option("--gps", det.gps)->required();
  cdet->add_option("--radar", det.radar)->required();
  cdet->add_option("--map", det.map)->required();
  cdet->add_option("--out", det.out);
  cdet->add_option("--method", det.method, "msc | gmm | gmm-y | kmeans");
  cdet->add_option("--bandwidth", det.bandwidth);
  cdet->add_option("--c-soft", det.c_soft);
  cdet->add_option("--reference-dim", det.reference_dim);
  cdet->add_option("--threshold-ratio", det.threshold_ratio);
  cdet->add_option("--k-max", det.k_max);
  cdet->add_option("--min-points", det.min_points);
  cdet->add_flag("--one-step", det.one_step, "skip the margin step");
  cdet->add_option("--seed", det.seed);

  TuneArgs tune;
  auto* ctune = app.add_subcommand("tune", "bandwidth sweep over trials");
  ctune->add_option("--dir", tune.dirs, "simulate output directory")->required();
  ctune->add_option("--grid", tune.grid, "lo:step:hi meters");
  ctune->add_option("--type1-weight", tune.type1_weight);
  ctune->add_option("--min-points", tune.min_points);
  ctune->add_option("--out", tune.out);

  FuseArgs fuse;
  auto* cfuse = app.add_subcommand("fuse", "Bayesian multi-trip fusion");
  cfuse->add_option("--estimates", fuse.estimate_files);
  cfuse->add_option("--e1", fuse.e1);
  cfuse->add_option("--e2", fuse.e2);
  cfuse->add_option("--trips", fuse.trips, "simulate+detect this many trips");
  cfuse->add_option("--preset", fuse.preset);
  cfuse->add_option("--seed", fuse.seed);
  cfuse->add_option("--decay-half-life", fuse.decay_half_life, "seconds; 0 off");
  cfuse->add_option("--out", fuse.out);

  EvalArgs ev;
  auto* ceval = app.add_subcommand("eval", "score estimates against truth");
  ceval->add_option("--estimates", ev.estimates);
  ceval->add_option("--truth", ev.truth);
  ceval->add_option("--pass", ev.pass);
  ceval->add_option("--reports", ev.report_files, "pre-scored report CSVs");
  ceval->add_option("--regress", ev.regress, "'speed' fits error vs speed");
  ceval->add_option("--hist", ev.hist_bins, "histogram bin count");
  ceval->add_option("--out", ev.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors exit 2; --help and friends keep CLI11's exit 0.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (csim->parsed()) return run_simulate(sim);
    if (cdet->parsed()) return run_detect(det);
    if (ctune->parsed()) return run_tune(tune);
    if (cfuse->parsed()) return run_fuse(fuse);
    if (ceval->parsed()) return run_eval(ev);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
