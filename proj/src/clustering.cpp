#include "parkdet/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace parkdet {

namespace {

std::vector<Vec2> to_vec2(const std::vector<GlobalDetection>& points) {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.emplace_back(p.zx, p.zy);
  return out;
}

// Builds the final ClusterSet: member-mean centroids, labels renumbered by
// ascending centroid projection on the along-track axis.
ClusterSet finalize(const std::vector<GlobalDetection>& points,
                    std::vector<int> raw_labels, int k, Vec2 axis,
                    ClusterMethod method) {
  // Drop clusters that ended up with no members.
  {
    std::vector<std::size_t> cnt(k, 0);
    for (int l : raw_labels)
      if (l >= 0) ++cnt[l];
    std::vector<int> pack(k, -1);
    int used = 0;
    for (int c = 0; c < k; ++c)
      if (cnt[c] > 0) pack[c] = used++;
    if (used != k) {
      for (int& l : raw_labels)
        if (l >= 0) l = pack[l];
      k = used;
    }
  }
  const std::vector<Vec2> pts = to_vec2(points);
  std::vector<Vec2> sums(k, Vec2{});
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (raw_labels[i] < 0) continue;
    sums[raw_labels[i]] += pts[i];
    ++counts[raw_labels[i]];
  }
  std::vector<Vec2> centroids(k);
  for (int c = 0; c < k; ++c)
    centroids[c] = counts[c] ? sums[c] / static_cast<double>(counts[c]) : Vec2{};

  const Vec2 perp = axis.perp();
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ta = centroids[a].dot(axis), tb = centroids[b].dot(axis);
    if (ta != tb) return ta < tb;
    return centroids[a].dot(perp) < centroids[b].dot(perp);
  });
  std::vector<int> remap(k);
  for (int r = 0; r < k; ++r) remap[order[r]] = r;

  ClusterSet out;
  out.points = points;
  out.method = method;
  out.labels.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    out.labels[i] = raw_labels[i] < 0 ? -1 : remap[raw_labels[i]];
  out.centroids.resize(k);
  for (int c = 0; c < k; ++c) out.centroids[remap[c]] = centroids[c];
  return out;
}

void check_input(const std::vector<GlobalDetection>& points) {
  if (points.empty())
    throw std::invalid_argument("clustering: empty point list");
  if (points.size() > kMaxPointsPerSegment)
    throw std::invalid_argument(
        "clustering: segment exceeds the per-call point cap; split the trip");
}

}  // namespace

int flat_kernel(const Vec2& offset, double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("flat_kernel: lambda <= 0");
  return offset.norm() <= lambda ? 1 : 0;
}

Vec2 mean_shift_step(const std::vector<Vec2>& points, const Vec2& x_c,
                     double lambda) {
  Vec2 sum;
  std::size_t n = 0;
  const double l2 = lambda * lambda;
  for (const auto& p : points) {
    if ((p - x_c).norm2() <= l2) {
      sum += p;
      ++n;
    }
  }
  if (n == 0) throw std::runtime_error("mean_shift_step: empty window");
  return sum / static_cast<double>(n);
}

namespace {

ClusterSet mean_shift_impl(const std::vector<GlobalDetection>& points,
                           const MscConfig& cfg, Vec2 axis, bool parallel) {
  check_input(points);
  if (cfg.bandwidth < kMinBandwidth || cfg.bandwidth > kMaxBandwidth)
    throw std::invalid_argument("mean_shift_cluster: bandwidth outside admissible range");
  if (cfg.convergence_eps <= 0.0 || cfg.max_iters <= 0)
    throw std::invalid_argument("mean_shift_cluster: invalid config");
  const double merge_radius =
      cfg.merge_radius > 0.0 ? cfg.merge_radius : cfg.bandwidth / 2.0;

  const std::vector<Vec2> pts = to_vec2(points);
  const auto n = static_cast<std::int64_t>(pts.size());
  std::vector<Vec2> modes(pts.size());
  const double eps2 = cfg.convergence_eps * cfg.convergence_eps;

#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    Vec2 x = pts[i];
    for (int it = 0; it < cfg.max_iters; ++it) {
      const Vec2 m = mean_shift_step(pts, x, cfg.bandwidth);
      const bool done = (m - x).norm2() < eps2;
      x = m;
      if (done) break;
    }
    modes[i] = x;
  }

  // Merge converged modes within merge_radius of an earlier representative.
  std::vector<Vec2> reps;
  std::vector<int> labels(pts.size(), -1);
  const double mr2 = merge_radius * merge_radius;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    int lab = -1;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if ((modes[i] - reps[r]).norm2() <= mr2) {
        lab = static_cast<int>(r);
        break;
      }
    }
    if (lab < 0) {
      lab = static_cast<int>(reps.size());
      reps.push_back(modes[i]);
    }
    labels[i] = lab;
  }

  ClusterSet out = finalize(points, labels, static_cast<int>(reps.size()), axis,
                            ClusterMethod::MSC);
  out.bandwidth = cfg.bandwidth;
  return out;
}

}  // namespace

ClusterSet mean_shift_cluster(const std::vector<GlobalDetection>& points,
                              const MscConfig& cfg, Vec2 axis) {
  return mean_shift_impl(points, cfg, axis, true);
}

ClusterSet mean_shift_cluster_serial(const std::vector<GlobalDetection>& points,
                                     const MscConfig& cfg, Vec2 axis) {
  return mean_shift_impl(points, cfg, axis, false);
}

namespace {

// Farthest-point center initialization; the first center is drawn from rng.
std::vector<Vec2> farthest_point_init(const std::vector<Vec2>& pts, int k,
                                      std::mt19937_64& rng) {
  std::vector<Vec2> centers;
  centers.push_back(pts[rng() % pts.size()]);
  std::vector<double> d2(pts.size(), std::numeric_limits<double>::max());
  while (static_cast<int>(centers.size()) < k) {
    std::size_t far = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      d2[i] = std::min(d2[i], (pts[i] - centers.back()).norm2());
      if (d2[i] > best) {
        best = d2[i];
        far = i;
      }
    }
    centers.push_back(pts[far]);
  }
  return centers;
}

void lloyd(const std::vector<Vec2>& pts, std::vector<Vec2>& centers,
           std::vector<int>& labels) {
  const int k = static_cast<int>(centers.size());
  labels.assign(pts.size(), 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      int best = 0;
      double bd = (pts[i] - centers[0]).norm2();
      for (int c = 1; c < k; ++c) {
        const double d = (pts[i] - centers[c]).norm2();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    std::vector<Vec2> sums(k, Vec2{});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sums[labels[i]] += pts[i];
      ++counts[labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed an emptied center at the point farthest from its center.
        std::size_t far = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const double d = (pts[i] - centers[labels[i]]).norm2();
          if (d > best) {
            best = d;
            far = i;
          }
        }
        centers[c] = pts[far];
      } else {
        centers[c] = sums[c] / static_cast<double>(counts[c]);
      }
    }
  }
}

double mean_silhouette(const std::vector<Vec2>& pts,
                       const std::vector<int>& labels, int k) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> counts(k, 0);
  for (int l : labels) ++counts[l];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> dist_sum(k, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      dist_sum[labels[j]] += (pts[i] - pts[j]).norm();
    }
    const int li = labels[i];
    double a = counts[li] > 1 ? dist_sum[li] / static_cast<double>(counts[li] - 1) : 0.0;
    double b = std::numeric_limits<double>::max();
    for (int c = 0; c < k; ++c) {
      if (c == li || counts[c] == 0) continue;
      b = std::min(b, dist_sum[c] / static_cast<double>(counts[c]));
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

}  // namespace

ClusterSet kmeans_cluster(const std::vector<GlobalDetection>& points, int k_max,
                          std::uint64_t seed, Vec2 axis) {
  check_input(points);
  if (k_max < 1) throw std::invalid_argument("kmeans_cluster: k_max < 1");
  const std::vector<Vec2> pts = to_vec2(points);
  std::mt19937_64 rng(seed);

  std::vector<int> best_labels(pts.size(), 0);
  int best_k = 1;
  double best_sil = -2.0;
  std::vector<int> labels;
  for (int k = 1; k <= k_max; ++k) {
    if (static_cast<std::size_t>(k) > pts.size()) break;
    std::vector<Vec2> centers = farthest_point_init(pts, k, rng);
    lloyd(pts, centers, labels);
    if (k == 1) continue;
    const double sil = mean_silhouette(pts, labels, k);
    if (sil > best_sil) {
      best_sil = sil;
      best_k = k;
      best_labels = labels;
    }
  }
  if (best_sil < 0.25) {  // degenerate-case rule: fall back to one cluster
    best_k = 1;
    best_labels.assign(pts.size(), 0);
  }
  return finalize(points, best_labels, best_k, axis, ClusterMethod::KMEANS);
}

namespace {

constexpr double kCovFloor = 1e-4;  // m^2 eigenvalue floor

struct Cov2 {
  double xx = 1.0, xy = 0.0, yy = 1.0;
};

// Clamps both eigenvalues of a symmetric 2x2 matrix from below.
Cov2 floor_cov(const Cov2& c) {
  const double mid = 0.5 * (c.xx + c.yy);
  const double disc = std::hypot(0.5 * (c.xx - c.yy), c.xy);
  double l1 = mid + disc, l2 = mid - disc;
  if (l1 >= kCovFloor && l2 >= kCovFloor) return c;
  l1 = std::max(l1, kCovFloor);
  l2 = std::max(l2, kCovFloor);
  // Eigenvector for l1.
  Vec2 v;
  if (std::abs(c.xy) > 1e-300) {
    v = {l1 - c.yy, c.xy};
  } else {
    v = c.xx >= c.yy ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  }
  const double nv = v.norm();
  v = nv > 0.0 ? v / nv : Vec2{1.0, 0.0};
  const Vec2 w = v.perp();
  return {l1 * v.x * v.x + l2 * w.x * w.x, l1 * v.x * v.y + l2 * w.x * w.y,
          l1 * v.y * v.y + l2 * w.y * w.y};
}

double log_gauss2(const Vec2& p, const Vec2& mu, const Cov2& c) {
  const double det = c.xx * c.yy - c.xy * c.xy;
  const Vec2 d = p - mu;
  const double q =
      (c.yy * d.x * d.x - 2.0 * c.xy * d.x * d.y + c.xx * d.y * d.y) / det;
  return -0.5 * (q + std::log(det)) - std::log(2.0 * M_PI);
}

struct GmmFit {
  std::vector<int> labels;
  double loglik = -std::numeric_limits<double>::infinity();
};

GmmFit fit_gmm2(const std::vector<Vec2>& pts, int k, std::mt19937_64& rng) {
  const std::size_t n = pts.size();
  GmmFit best;
  for (int restart = 0; restart < 5; ++restart) {
    // Init: k random distinct points as means, pooled covariance.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<Vec2> mu(k);
    for (int c = 0; c < k; ++c) mu[c] = pts[idx[c % n]];
    Vec2 mean;
    for (const auto& p : pts) mean += p;
    mean = mean / static_cast<double>(n);
    Cov2 pooled{0.0, 0.0, 0.0};
    for (const auto& p : pts) {
      const Vec2 d = p - mean;
      pooled.xx += d.x * d.x;
      pooled.xy += d.x * d.y;
      pooled.yy += d.y * d.y;
    }
    pooled.xx /= n;
    pooled.xy /= n;
    pooled.yy /= n;
    pooled = floor_cov(pooled);
    std::vector<Cov2> cov(k, pooled);
    std::vector<double> w(k, 1.0 / k);

    std::vector<double> resp(n * k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    double ll = prev_ll;
    for (int iter = 0; iter < 200; ++iter) {
      // E-step.
      ll = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          resp[i * k + c] = std::log(std::max(w[c], 1e-300)) +
                            log_gauss2(pts[i], mu[c], cov[c]);
          mx = std::max(mx, resp[i * k + c]);
        }
        double sum = 0.0;
        for (int c = 0; c < k; ++c) sum += std::exp(resp[i * k + c] - mx);
        const double lse = mx + std::log(sum);
        ll += lse;
        for (int c = 0; c < k; ++c)
          resp[i * k + c] = std::exp(resp[i * k + c] - lse);
      }
      if (std::abs(ll - prev_ll) < 1e-6) break;
      prev_ll = ll;
      // M-step.
      for (int c = 0; c < k; ++c) {
        double nc = 0.0;
        Vec2 m;
        for (std::size_t i = 0; i < n; ++i) {
          nc += resp[i * k + c];
          m += pts[i] * resp[i * k + c];
        }
        nc = std::max(nc, 1e-12);
        mu[c] = m / nc;
        Cov2 cv{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
          const Vec2 d = pts[i] - mu[c];
          cv.xx += resp[i * k + c] * d.x * d.x;
          cv.xy += resp[i * k + c] * d.x * d.y;
          cv.yy += resp[i * k + c] * d.y * d.y;
        }
        cv.xx /= nc;
        cv.xy /= nc;
        cv.yy /= nc;
        cov[c] = floor_cov(cv);
        w[c] = nc / static_cast<double>(n);
      }
    }
    if (ll > best.loglik) {
      best.loglik = ll;
      best.labels.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        int arg = 0;
        for (int c = 1; c < k; ++c)
          if (resp[i * k + c] > resp[i * k + arg]) arg = c;
        best.labels[i] = arg;
      }
    }
  }
  return best;
}

GmmFit fit_gmm1(const std::vector<double>& ts, int k, std::mt19937_64& rng) {
  const std::size_t n = ts.size();
  GmmFit best;
  for (int restart = 0; restart < 5; ++restart) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<double> mu(k);
    for (int c = 0; c < k; ++c) mu[c] = ts[idx[c % n]];
    double mean = 0.0;
    for (double t : ts) mean += t;
    mean /= n;
    double var = 0.0;
    for (double t : ts) var += (t - mean) * (t - mean);
    var = std::max(var / n, kCovFloor);
    std::vector<double> v(k, var), w(k, 1.0 / k);

    std::vector<double> resp(n * k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    double ll = prev_ll;
    for (int iter = 0; iter < 200; ++iter) {
      ll = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          const double d = ts[i] - mu[c];
          resp[i * k + c] = std::log(std::max(w[c], 1e-300)) -
                            0.5 * (d * d / v[c] + std::log(2.0 * M_PI * v[c]));
          mx = std::max(mx, resp[i * k + c]);
        }
        double sum = 0.0;
        for (int c = 0; c < k; ++c) sum += std::exp(resp[i * k + c] - mx);
        const double lse = mx + std::log(sum);
        ll += lse;
        for (int c = 0; c < k; ++c)
          resp[i * k + c] = std::exp(resp[i * k + c] - lse);
      }
      if (std::abs(ll - prev_ll) < 1e-6) break;
      prev_ll = ll;
      for (int c = 0; c < k; ++c) {
        double nc = 0.0, m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          nc += resp[i * k + c];
          m += resp[i * k + c] * ts[i];
        }
        nc = std::max(nc, 1e-12);
        mu[c] = m / nc;
        double vv = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = ts[i] - mu[c];
          vv += resp[i * k + c] * d * d;
        }
        v[c] = std::max(vv / nc, kCovFloor);
        w[c] = nc / static_cast<double>(n);
      }
    }
    if (ll > best.loglik) {
      best.loglik = ll;
      best.labels.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        int arg = 0;
        for (int c = 1; c < k; ++c)
          if (resp[i * k + c] > resp[i * k + arg]) arg = c;
        best.labels[i] = arg;
      }
    }
  }
  return best;
}

}  // namespace

ClusterSet gmm_aic_cluster(const std::vector<GlobalDetection>& points, int k_max,
                           std::uint64_t seed, Vec2 axis) {
  check_input(points);
  if (k_max < 1) throw std::invalid_argument("gmm_aic_cluster: k_max < 1");
  if (points.size() < 2)
    throw std::invalid_argument("gmm_aic_cluster: needs at least 2 points");
  const std::vector<Vec2> pts = to_vec2(points);
  std::mt19937_64 rng(seed);

  GmmFit best;
  int best_k = 1;
  double best_aic = std::numeric_limits<double>::max();
  for (int k = 1; k <= k_max; ++k) {
    if (static_cast<std::size_t>(k) > pts.size()) break;
    GmmFit fit = fit_gmm2(pts, k, rng);
    const double aic = 2.0 * (6.0 * k - 1.0) - 2.0 * fit.loglik;
    if (aic < best_aic) {
      best_aic = aic;
      best_k = k;
      best = std::move(fit);
    }
  }
  // Drop empty components so every centroid has members.
  std::vector<int> remap(best_k, -1);
  int used = 0;
  for (int l : best.labels)
    if (remap[l] < 0) remap[l] = used++;
  for (int& l : best.labels) l = remap[l];
  return finalize(points, best.labels, used, axis, ClusterMethod::GMM_AIC);
}

ClusterSet gmm_y_collapsed_cluster(const std::vector<GlobalDetection>& points,
                                   int k_max, std::uint64_t seed, Vec2 axis) {
  check_input(points);
  if (k_max < 1) throw std::invalid_argument("gmm_y_collapsed_cluster: k_max < 1");
  if (points.size() < 2)
    throw std::invalid_argument("gmm_y_collapsed_cluster: needs at least 2 points");
  const double an = axis.norm();
  if (an <= 0.0)
    throw std::invalid_argument("gmm_y_collapsed_cluster: zero axis");
  axis = axis / an;

  std::vector<double> ts;
  ts.reserve(points.size());
  for (const auto& p : points) ts.push_back(Vec2{p.zx, p.zy}.dot(axis));
  std::mt19937_64 rng(seed);

  GmmFit best;
  int best_k = 1;
  double best_aic = std::numeric_limits<double>::max();
  for (int k = 1; k <= k_max; ++k) {
    if (static_cast<std::size_t>(k) > ts.size()) break;
    GmmFit fit = fit_gmm1(ts, k, rng);
    const double aic = 2.0 * (3.0 * k - 1.0) - 2.0 * fit.loglik;
    if (aic < best_aic) {
      best_aic = aic;
      best_k = k;
      best = std::move(fit);
    }
  }
  std::vector<int> remap(best_k, -1);
  int used = 0;
  for (int l : best.labels)
    if (remap[l] < 0) remap[l] = used++;
  for (int& l : best.labels) l = remap[l];

  ClusterSet out = finalize(points, best.labels, used, axis, ClusterMethod::GMM_Y);
  return out;
}

ClusterSet filter_small_clusters(const ClusterSet& in, std::size_t min_points) {
  std::vector<std::size_t> counts(in.centroids.size(), 0);
  for (int l : in.labels)
    if (l >= 0) ++counts[l];
  std::vector<int> remap(in.centroids.size(), -1);
  int used = 0;
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] >= min_points) remap[c] = used++;

  ClusterSet out;
  out.points = in.points;
  out.method = in.method;
  out.bandwidth = in.bandwidth;
  out.labels.resize(in.labels.size());
  for (std::size_t i = 0; i < in.labels.size(); ++i)
    out.labels[i] = in.labels[i] < 0 ? -1 : remap[in.labels[i]];
  out.centroids.resize(used);
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (remap[c] >= 0) out.centroids[remap[c]] = in.centroids[c];
  return out;
}

}  // namespace parkdet
