#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "parkdet/io.hpp"

using namespace parkdet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("parkdet_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("GPS CSV round-trips planar poses exactly enough") {
  TempDir tmp;
  const std::vector<ProbePose> poses{{0.0, 1.5, -2.25, 0.125},
                                     {0.1, 1.75, -2.25, 0.0},
                                     {0.2, 2.0, -2.0, -3.0}};
  write_gps_csv(tmp.file("gps.csv"), poses);
  const auto got = read_gps_csv(tmp.file("gps.csv"));
  REQUIRE(got.size() == poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    CHECK(got[i].t == doctest::Approx(poses[i].t).epsilon(1e-11));
    CHECK(got[i].x == doctest::Approx(poses[i].x).epsilon(1e-11));
    CHECK(got[i].y == doctest::Approx(poses[i].y).epsilon(1e-11));
    CHECK(got[i].phi == doctest::Approx(poses[i].phi).epsilon(1e-11));
  }
}

TEST_CASE("geodetic GPS files are converted on read") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("geo.csv"));
    f << "t,lat,lon,phi\n0.0,42.2936,-83.7196,0.5\n";
  }
  const auto got = read_gps_csv(tmp.file("geo.csv"));
  REQUIRE(got.size() == 1);
  const UtmCoord u = latlon_to_planar(42.2936, -83.7196);
  CHECK(got[0].x == doctest::Approx(u.easting));
  CHECK(got[0].y == doctest::Approx(u.northing));
  CHECK(got[0].phi == doctest::Approx(0.5));
}

TEST_CASE("malformed GPS files raise errors naming the row") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("bad.csv"));
    f << "t,x,y,phi\n0.0,1.0,oops,0.0\n";
  }
  CHECK_THROWS_WITH_AS(read_gps_csv(tmp.file("bad.csv")),
                       doctest::Contains("row 2"), std::runtime_error);
  {
    std::ofstream f(tmp.file("hdr.csv"));
    f << "a,b,c,d\n";
  }
  CHECK_THROWS_AS(read_gps_csv(tmp.file("hdr.csv")), std::runtime_error);
  CHECK_THROWS_AS(read_gps_csv(tmp.file("missing.csv")), std::runtime_error);
}

TEST_CASE("radar CSV round-trips detections") {
  TempDir tmp;
  const std::vector<LocalDetection> dets{{0.02, 1.5, -3.25, 0},
                                         {0.04, 0.5, 2.0, 5}};
  write_radar_csv(tmp.file("radar.csv"), dets);
  const auto got = read_radar_csv(tmp.file("radar.csv"));
  REQUIRE(got.size() == 2);
  CHECK(got[0].zx_local == doctest::Approx(1.5));
  CHECK(got[0].zy_local == doctest::Approx(-3.25));
  CHECK(got[0].sensor_id == 0);
  CHECK(got[1].sensor_id == 5);
}

TEST_CASE("truth CSV round-trips per-pass states") {
  TempDir tmp;
  std::vector<std::map<int, SpaceState>> truth(2);
  truth[0][0] = SpaceState::OCCUPIED;
  truth[0][1] = SpaceState::FREE;
  truth[1][0] = SpaceState::FREE;
  truth[1][1] = SpaceState::OCCUPIED;
  write_truth_csv(tmp.file("truth.csv"), truth);
  const auto got = read_truth_csv(tmp.file("truth.csv"));
  CHECK(got == truth);
}

TEST_CASE("map JSON round-trips spaces and rows") {
  TempDir tmp;
  ParkingMap map;
  ParkingSpace s;
  s.id = 3;
  s.center = {12.5, 1.1};
  s.orientation = 0.25;
  s.length = 6.5;
  s.width = 2.2;
  s.kind = SpaceKind::PARALLEL;
  map.spaces.push_back(s);
  s.id = 4;
  s.kind = SpaceKind::PERPENDICULAR;
  map.spaces.push_back(s);
  map.rows.push_back({{3, 4}});
  write_map_json(tmp.file("map.json"), map);
  const ParkingMap got = read_map_json(tmp.file("map.json"));
  REQUIRE(got.spaces.size() == 2);
  CHECK(got.spaces[0].id == 3);
  CHECK(got.spaces[0].center.x == doctest::Approx(12.5));
  CHECK(got.spaces[0].kind == SpaceKind::PARALLEL);
  CHECK(got.spaces[1].kind == SpaceKind::PERPENDICULAR);
  REQUIRE(got.rows.size() == 1);
  CHECK(got.rows[0].space_ids == std::vector<int>{3, 4});
}

TEST_CASE("estimate CSV round-trips all three states by segment") {
  TempDir tmp;
  std::vector<SegmentEstimate> ests(2);
  ests[0].segment_id = 0;
  ests[0].mean_speed = 2.25;
  ests[0].states[0] = SpaceState::OCCUPIED;
  ests[0].states[1] = SpaceState::FREE;
  ests[0].states[2] = SpaceState::UNOBSERVED;
  ests[1].segment_id = 1;
  ests[1].mean_speed = 3.5;
  ests[1].states[0] = SpaceState::FREE;
  write_estimates_csv(tmp.file("est.csv"), ests);
  const auto got = read_estimates_csv(tmp.file("est.csv"));
  REQUIRE(got.size() == 2);
  CHECK(got[0].states == ests[0].states);
  CHECK(got[1].states == ests[1].states);
  CHECK(got[0].mean_speed == doctest::Approx(2.25));
  CHECK(got[1].segment_id == 1);
}

TEST_CASE("report CSV keeps undefined rates undefined") {
  TempDir tmp;
  std::vector<ErrorReport> reps(2);
  reps[0].segment_id = 0;
  reps[0].type1_rate = 0.125;
  reps[0].n_occ_observed = 8;
  reps[0].mean_speed = 2.0;
  reps[1].segment_id = 1;
  reps[1].type2_rate = 0.5;
  reps[1].n_free_observed = 2;
  reps[1].mean_speed = 3.0;
  write_reports_csv(tmp.file("reports.csv"), reps);
  const auto got = read_reports_csv(tmp.file("reports.csv"));
  REQUIRE(got.size() == 2);
  CHECK(*got[0].type1_rate == doctest::Approx(0.125));
  CHECK_FALSE(got[0].type2_rate.has_value());
  CHECK_FALSE(got[1].type1_rate.has_value());
  CHECK(*got[1].type2_rate == doctest::Approx(0.5));
  CHECK(got[1].n_free_observed == 2);
}

TEST_CASE("the content hash is the 64-bit FNV-1a of the bytes") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("abc.txt"), std::ios::binary);
    f << "abc";
  }
  // Frozen reference value for the string "abc".
  CHECK(file_hash_hex(tmp.file("abc.txt")) == "e71fa2190541574b");
  {
    std::ofstream f(tmp.file("empty.txt"), std::ios::binary);
  }
  CHECK(file_hash_hex(tmp.file("empty.txt")) == "cbf29ce484222325");
  CHECK_THROWS_AS(file_hash_hex(tmp.file("nope.txt")), std::runtime_error);
}

TEST_CASE("manifests record the config and artifact hashes") {
  TempDir tmp;
  {
    std::ofstream f(tmp.file("art.csv"));
    f << "abc";
  }
  write_manifest(tmp.file("manifest.json"), "simulate",
                 {{"seed", "42"}, {"preset", "fig1"}},
                 {tmp.file("art.csv")});
  std::ifstream f(tmp.file("manifest.json"));
  nlohmann::json j;
  f >> j;
  CHECK(j.at("subcommand") == "simulate");
  CHECK(j.at("config").at("seed") == "42");
  CHECK(j.at("artifacts").at(tmp.file("art.csv")) == "e71fa2190541574b");
}

TEST_CASE("cluster and curve writers emit readable sidecars") {
  TempDir tmp;
  ClusterSet cs;
  cs.points = {{0.0, 1.0, 2.0, 0.0}, {0.1, 3.0, 4.0, 0.0}};
  cs.labels = {0, -1};
  cs.centroids = {{1.0, 2.0}};
  cs.bandwidth = 2.0;
  write_clusters_csv(tmp.file("clusters.csv"), cs);
  nlohmann::json meta;
  std::ifstream mf(tmp.file("clusters.csv.meta.json"));
  mf >> meta;
  CHECK(meta.at("method") == "msc");
  CHECK(meta.at("bandwidth") == doctest::Approx(2.0));
  CHECK(meta.at("n_clusters") == 1);

  TuneCurve curve;
  curve.points.resize(2);
  curve.points[0].bandwidth = 2.0;
  curve.points[0].type1_rate = 0.1;
  curve.points[0].objective = 0.1;
  curve.points[1].bandwidth = 2.5;
  curve.points[1].objective = 0.0;
  curve.best = 1;
  write_tune_curve_csv(tmp.file("curve.csv"), curve);
  std::ifstream cf(tmp.file("curve.csv"));
  std::string header, row0, row1;
  std::getline(cf, header);
  std::getline(cf, row0);
  std::getline(cf, row1);
  CHECK(header == "bandwidth,type1_rate,type2_rate,objective,best");
  CHECK(row0 == "2,0.1,,0.1,0");
  CHECK(row1 == "2.5,,,0,1");
}
