#include "parkdet/margins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace parkdet {

namespace {

constexpr double kKktTol = 1e-8;
constexpr double kTau = 1e-12;

}  // namespace

SvmSolution solve_soft_margin(const std::vector<Vec2>& neg,
                              const std::vector<Vec2>& pos, double c_soft) {
  if (neg.empty() || pos.empty())
    throw std::invalid_argument("solve_soft_margin: empty class");
  if (c_soft <= 0.0)
    throw std::invalid_argument("solve_soft_margin: c_soft must be positive");

  std::vector<Vec2> x;
  std::vector<double> y;
  x.reserve(neg.size() + pos.size());
  for (const auto& p : neg) {
    x.push_back(p);
    y.push_back(-1.0);
  }
  for (const auto& p : pos) {
    x.push_back(p);
    y.push_back(1.0);
  }
  const std::size_t n = x.size();
  const double C = c_soft;

  // SMO with maximal-violating-pair working set selection.
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G_i = y_i (w.x_i) - 1 at alpha
  int iters = 0;
  const int max_iters = 200000 + static_cast<int>(20000 * n);
  double m_up = 0.0, m_low = 0.0;
  while (iters < max_iters) {
    ++iters;
    int i = -1, j = -1;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      const bool in_up = (y[k] > 0 && alpha[k] < C) || (y[k] < 0 && alpha[k] > 0);
      const bool in_low = (y[k] < 0 && alpha[k] < C) || (y[k] > 0 && alpha[k] > 0);
      const double v = -y[k] * grad[k];
      if (in_up && v > m_up) {
        m_up = v;
        i = static_cast<int>(k);
      }
      if (in_low && v < m_low) {
        m_low = v;
        j = static_cast<int>(k);
      }
    }
    if (i < 0 || j < 0 || m_up - m_low <= kKktTol) break;

    double quad = (x[i] - x[j]).norm2();
    if (quad <= 0.0) quad = kTau;
    double d = (m_up - m_low) / quad;
    // Box clip: alpha_i += y_i d, alpha_j -= y_j d must stay in [0, C].
    d = std::min(d, y[i] > 0 ? C - alpha[i] : alpha[i]);
    d = std::min(d, y[j] > 0 ? alpha[j] : C - alpha[j]);
    alpha[i] += y[i] * d;
    alpha[j] -= y[j] * d;
    for (std::size_t k = 0; k < n; ++k)
      grad[k] += y[k] * d * (x[k].dot(x[i]) - x[k].dot(x[j]));
  }

  SvmSolution sol;
  sol.iterations = iters;
  for (std::size_t k = 0; k < n; ++k) sol.w += x[k] * (alpha[k] * y[k]);

  // Bias from free support vectors; fall back to the KKT band midpoint.
  double bsum = 0.0;
  int bcount = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (alpha[k] > 1e-10 && alpha[k] < C - 1e-10) {
      bsum += -y[k] * grad[k];
      ++bcount;
    }
  }
  sol.b = bcount > 0 ? bsum / bcount : 0.5 * (m_up + m_low);

  for (std::size_t k = 0; k < n; ++k)
    sol.slack_total += std::max(0.0, 1.0 - y[k] * (sol.w.dot(x[k]) + sol.b));
  sol.objective = 0.5 * sol.w.norm2() + C * sol.slack_total;
  return sol;
}

std::vector<LinearBoundary> fit_pairwise_boundaries(const ClusterSet& clusters,
                                                    double c_soft, Vec2 axis) {
  const double an = axis.norm();
  if (an <= 0.0)
    throw std::invalid_argument("fit_pairwise_boundaries: zero axis");
  axis = axis / an;
  const Vec2 perp = axis.perp();

  const int k = static_cast<int>(clusters.cluster_count());
  std::vector<LinearBoundary> out;
  if (k < 2) return out;

  std::vector<std::vector<Vec2>> members(k);
  for (std::size_t i = 0; i < clusters.points.size(); ++i) {
    const int l = clusters.labels[i];
    if (l >= 0)
      members[l].emplace_back(clusters.points[i].zx, clusters.points[i].zy);
  }
  for (int c = 0; c < k; ++c)
    if (members[c].empty())
      throw std::invalid_argument("fit_pairwise_boundaries: empty cluster");

  out.reserve(k - 1);
  for (int c = 0; c + 1 < k; ++c) {
    const Vec2 center = (clusters.centroids[c] + clusters.centroids[c + 1]) * 0.5;
    auto to_frame = [&](const Vec2& p) {
      const Vec2 d = p - center;
      return Vec2{d.dot(axis), d.dot(perp)};
    };
    std::vector<Vec2> neg, pos;
    neg.reserve(members[c].size());
    pos.reserve(members[c + 1].size());
    for (const auto& p : members[c]) neg.push_back(to_frame(p));
    for (const auto& p : members[c + 1]) pos.push_back(to_frame(p));

    const SvmSolution sol = solve_soft_margin(neg, pos, c_soft);
    Vec2 w_global = axis * sol.w.x + perp * sol.w.y;
    double b_global = sol.b - w_global.dot(center);

    LinearBoundary lb;
    lb.left_cluster = c;
    lb.right_cluster = c + 1;
    lb.slack_total = sol.slack_total;
    const double wn = w_global.norm();
    if (wn < 1e-12) {
      // Degenerate (fully interleaved) pair: no usable separating direction.
      lb.w = axis;
      lb.b = -axis.dot(center);
      lb.margin_width = 0.0;
    } else {
      lb.w = w_global / wn;
      lb.b = b_global / wn;
      lb.margin_width = 2.0 / wn;
      if (lb.w.dot(axis) < 0.0) {  // orient toward increasing along-track
        lb.w = lb.w * -1.0;
        lb.b = -lb.b;
      }
    }
    out.push_back(lb);
  }
  return out;
}

std::vector<GapReport> detect_gaps(const std::vector<LinearBoundary>& boundaries,
                                   double reference_dim, double threshold_ratio,
                                   Vec2 axis) {
  if (reference_dim <= 0.0)
    throw std::invalid_argument("detect_gaps: reference_dim must be positive");
  if (threshold_ratio <= 0.0)
    throw std::invalid_argument("detect_gaps: threshold_ratio must be positive");
  const double an = axis.norm();
  if (an <= 0.0) throw std::invalid_argument("detect_gaps: zero axis");
  axis = axis / an;

  std::vector<GapReport> out;
  out.reserve(boundaries.size());
  for (const auto& lb : boundaries) {
    GapReport g;
    g.left_cluster = lb.left_cluster;
    g.right_cluster = lb.right_cluster;
    g.reference_dim = reference_dim;
    // Along-track separation of the two margin planes. The boundary normal is
    // expected to be near-parallel to travel; the projection factor is
    // floored so a skewed boundary cannot blow the distance up.
    const double proj = std::max(std::abs(lb.w.dot(axis)), 0.2);
    g.gap_distance = lb.margin_width / proj;
    g.free_spaces =
        g.gap_distance >= threshold_ratio * reference_dim
            ? static_cast<int>(std::floor(g.gap_distance / reference_dim))
            : 0;
    out.push_back(g);
  }
  return out;
}

}  // namespace parkdet
