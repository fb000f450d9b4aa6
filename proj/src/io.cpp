#include "parkdet/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace parkdet {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  return f;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

double to_double(const std::string& s, const std::string& path, int row) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ": malformed value '" + s + "' at row " +
                             std::to_string(row));
  }
}

int to_int(const std::string& s, const std::string& path, int row) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(path + ": malformed value '" + s + "' at row " +
                             std::to_string(row));
  }
}

}  // namespace

void write_gps_csv(const std::string& path, const std::vector<ProbePose>& poses) {
  auto f = open_out(path);
  f << "t,x,y,phi\n";
  for (const auto& p : poses)
    f << fmt(p.t) << ',' << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.phi)
      << '\n';
}

std::vector<ProbePose> read_gps_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line))
    throw std::runtime_error(path + ": empty file");
  const auto header = split_csv(line);
  bool geodetic;
  if (header == std::vector<std::string>{"t", "x", "y", "phi"}) {
    geodetic = false;
  } else if (header == std::vector<std::string>{"t", "lat", "lon", "phi"}) {
    geodetic = true;
  } else {
    throw std::runtime_error(path + ": unrecognized GPS header '" + line + "'");
  }
  std::vector<ProbePose> out;
  int row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4)
      throw std::runtime_error(path + ": expected 4 columns at row " +
                               std::to_string(row));
    ProbePose p;
    p.t = to_double(fields[0], path, row);
    if (geodetic) {
      const UtmCoord u = latlon_to_planar(to_double(fields[1], path, row),
                                          to_double(fields[2], path, row));
      p.x = u.easting;
      p.y = u.northing;
    } else {
      p.x = to_double(fields[1], path, row);
      p.y = to_double(fields[2], path, row);
    }
    p.phi = to_double(fields[3], path, row);
    out.push_back(p);
  }
  return out;
}

void write_radar_csv(const std::string& path,
                     const std::vector<LocalDetection>& dets) {
  auto f = open_out(path);
  f << "t,sensor_id,zx_local,zy_local\n";
  for (const auto& d : dets)
    f << fmt(d.t) << ',' << d.sensor_id << ',' << fmt(d.zx_local) << ','
      << fmt(d.zy_local) << '\n';
}

std::vector<LocalDetection> read_radar_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line) || split_csv(line) !=
      std::vector<std::string>{"t", "sensor_id", "zx_local", "zy_local"})
    throw std::runtime_error(path + ": unrecognized radar header");
  std::vector<LocalDetection> out;
  int row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4)
      throw std::runtime_error(path + ": expected 4 columns at row " +
                               std::to_string(row));
    out.push_back({to_double(fields[0], path, row),
                   to_double(fields[2], path, row),
                   to_double(fields[3], path, row),
                   to_int(fields[1], path, row)});
  }
  return out;
}

void write_truth_csv(const std::string& path,
                     const std::vector<std::map<int, SpaceState>>& truth) {
  auto f = open_out(path);
  f << "space_id,pass_id,state\n";
  for (std::size_t p = 0; p < truth.size(); ++p)
    for (const auto& [id, state] : truth[p])
      f << id << ',' << p << ',' << (state == SpaceState::OCCUPIED ? 1 : 0)
        << '\n';
}

std::vector<std::map<int, SpaceState>> read_truth_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line) ||
      split_csv(line) != std::vector<std::string>{"space_id", "pass_id", "state"})
    throw std::runtime_error(path + ": unrecognized truth header");
  std::vector<std::map<int, SpaceState>> out;
  int row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3)
      throw std::runtime_error(path + ": expected 3 columns at row " +
                               std::to_string(row));
    const int pass = to_int(fields[1], path, row);
    if (pass < 0) throw std::runtime_error(path + ": negative pass id");
    if (static_cast<std::size_t>(pass) >= out.size())
      out.resize(pass + 1);
    out[pass][to_int(fields[0], path, row)] =
        to_int(fields[2], path, row) ? SpaceState::OCCUPIED : SpaceState::FREE;
  }
  return out;
}

void write_map_json(const std::string& path, const ParkingMap& map) {
  json j;
  j["spaces"] = json::array();
  for (const auto& s : map.spaces) {
    j["spaces"].push_back({{"id", s.id},
                           {"center", {s.center.x, s.center.y}},
                           {"orientation", s.orientation},
                           {"length", s.length},
                           {"width", s.width},
                           {"kind", s.kind == SpaceKind::PARALLEL
                                        ? "parallel"
                                        : "perpendicular"}});
  }
  j["rows"] = json::array();
  for (const auto& r : map.rows) j["rows"].push_back(r.space_ids);
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

ParkingMap read_map_json(const std::string& path) {
  auto f = open_in(path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  ParkingMap map;
  for (const auto& js : j.at("spaces")) {
    ParkingSpace s;
    s.id = js.at("id").get<int>();
    s.center = {js.at("center").at(0).get<double>(),
                js.at("center").at(1).get<double>()};
    s.orientation = js.at("orientation").get<double>();
    s.length = js.at("length").get<double>();
    s.width = js.at("width").get<double>();
    s.kind = js.at("kind").get<std::string>() == "parallel"
                 ? SpaceKind::PARALLEL
                 : SpaceKind::PERPENDICULAR;
    if (!(s.length > 0.0 && s.width > 0.0))
      throw std::runtime_error(path + ": non-positive space dimensions");
    map.spaces.push_back(s);
  }
  if (j.contains("rows"))
    for (const auto& jr : j.at("rows"))
      map.rows.push_back({jr.get<std::vector<int>>()});
  return map;
}

void write_clusters_csv(const std::string& path, const ClusterSet& clusters) {
  auto f = open_out(path);
  f << "t,zx,zy,label\n";
  for (std::size_t i = 0; i < clusters.points.size(); ++i)
    f << fmt(clusters.points[i].t) << ',' << fmt(clusters.points[i].zx) << ','
      << fmt(clusters.points[i].zy) << ',' << clusters.labels[i] << '\n';

  json meta;
  switch (clusters.method) {
    case ClusterMethod::MSC: meta["method"] = "msc"; break;
    case ClusterMethod::GMM_AIC: meta["method"] = "gmm"; break;
    case ClusterMethod::GMM_Y: meta["method"] = "gmm-y"; break;
    case ClusterMethod::KMEANS: meta["method"] = "kmeans"; break;
  }
  meta["bandwidth"] = clusters.bandwidth;
  meta["n_clusters"] = clusters.cluster_count();
  meta["centroids"] = json::array();
  for (const auto& c : clusters.centroids)
    meta["centroids"].push_back({c.x, c.y});
  auto mf = open_out(path + ".meta.json");
  mf << meta.dump(2) << '\n';
}

void write_boundaries_csv(const std::string& path,
                          const std::vector<LinearBoundary>& boundaries,
                          const std::vector<GapReport>& gaps) {
  auto f = open_out(path);
  f << "left_cluster,right_cluster,wx,wy,b,margin_width,slack_total,"
       "gap_distance,free_spaces\n";
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    const auto& lb = boundaries[i];
    f << lb.left_cluster << ',' << lb.right_cluster << ',' << fmt(lb.w.x) << ','
      << fmt(lb.w.y) << ',' << fmt(lb.b) << ',' << fmt(lb.margin_width) << ','
      << fmt(lb.slack_total);
    if (i < gaps.size())
      f << ',' << fmt(gaps[i].gap_distance) << ',' << gaps[i].free_spaces;
    else
      f << ",,";
    f << '\n';
  }
}

void write_estimates_csv(const std::string& path,
                         const std::vector<SegmentEstimate>& estimates) {
  auto f = open_out(path);
  f << "space_id,state,segment_id,mean_speed\n";
  for (const auto& est : estimates)
    for (const auto& [id, state] : est.states) {
      const int code = state == SpaceState::OCCUPIED ? 1
                       : state == SpaceState::FREE   ? 0
                                                     : -1;
      f << id << ',' << code << ',' << est.segment_id << ','
        << fmt(est.mean_speed) << '\n';
    }
}

std::vector<SegmentEstimate> read_estimates_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line) ||
      split_csv(line) != std::vector<std::string>{"space_id", "state",
                                                  "segment_id", "mean_speed"})
    throw std::runtime_error(path + ": unrecognized estimates header");
  std::map<int, SegmentEstimate> by_segment;
  int row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4)
      throw std::runtime_error(path + ": expected 4 columns at row " +
                               std::to_string(row));
    const int seg = to_int(fields[2], path, row);
    SegmentEstimate& est = by_segment[seg];
    est.segment_id = seg;
    est.mean_speed = to_double(fields[3], path, row);
    const int code = to_int(fields[1], path, row);
    est.states[to_int(fields[0], path, row)] =
        code == 1 ? SpaceState::OCCUPIED
        : code == 0 ? SpaceState::FREE
                    : SpaceState::UNOBSERVED;
  }
  std::vector<SegmentEstimate> out;
  out.reserve(by_segment.size());
  for (auto& [seg, est] : by_segment) out.push_back(std::move(est));
  return out;
}

void write_posterior_csv(const std::string& path,
                         const OccupancyPosterior& posterior) {
  auto f = open_out(path);
  f << "space_id,log_odds,probability,trip_count\n";
  for (const auto& [id, b] : posterior.beliefs)
    f << id << ',' << fmt(b.log_odds()) << ','
      << fmt(posterior.probability(id)) << ',' << b.trip_count << '\n';
}

void write_reports_csv(const std::string& path,
                       const std::vector<ErrorReport>& reports) {
  auto f = open_out(path);
  f << "segment_id,type1_rate,type2_rate,n_occ_observed,n_free_observed,"
       "mean_speed\n";
  for (const auto& r : reports) {
    f << r.segment_id << ',';
    if (r.type1_rate) f << fmt(*r.type1_rate);
    f << ',';
    if (r.type2_rate) f << fmt(*r.type2_rate);
    f << ',' << r.n_occ_observed << ',' << r.n_free_observed << ','
      << fmt(r.mean_speed) << '\n';
  }
}

std::vector<ErrorReport> read_reports_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line))
    throw std::runtime_error(path + ": empty file");
  std::vector<ErrorReport> out;
  int row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    while (fields.size() < 6) fields.emplace_back();  // trailing empties
    ErrorReport r;
    r.segment_id = to_int(fields[0], path, row);
    if (!fields[1].empty()) r.type1_rate = to_double(fields[1], path, row);
    if (!fields[2].empty()) r.type2_rate = to_double(fields[2], path, row);
    r.n_occ_observed = to_int(fields[3], path, row);
    r.n_free_observed = to_int(fields[4], path, row);
    r.mean_speed = to_double(fields[5], path, row);
    out.push_back(r);
  }
  return out;
}

void write_tune_curve_csv(const std::string& path, const TuneCurve& curve) {
  auto f = open_out(path);
  f << "bandwidth,type1_rate,type2_rate,objective,best\n";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    f << fmt(p.bandwidth) << ',';
    if (p.type1_rate) f << fmt(*p.type1_rate);
    f << ',';
    if (p.type2_rate) f << fmt(*p.type2_rate);
    f << ',' << fmt(p.objective) << ',' << (i == curve.best ? 1 : 0) << '\n';
  }
}

void write_histogram_csv(const std::string& path, const RateHistogram& hist) {
  auto f = open_out(path);
  f << "bin_low,bin_high,count\n";
  const double w = 1.0 / static_cast<double>(hist.counts.size());
  for (std::size_t i = 0; i < hist.counts.size(); ++i)
    f << fmt(i * w) << ',' << fmt((i + 1) * w) << ',' << hist.counts[i] << '\n';
  f << "undefined,," << hist.undefined << '\n';
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot hash missing file: " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[4096];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (!f) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(h));
  return out;
}

void write_manifest(const std::string& path, const std::string& subcommand,
                    const std::map<std::string, std::string>& config,
                    const std::vector<std::string>& artifacts) {
  json j;
  j["subcommand"] = subcommand;
  j["config"] = config;
  j["artifacts"] = json::object();
  for (const auto& a : artifacts) j["artifacts"][a] = file_hash_hex(a);
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

}  // namespace parkdet
