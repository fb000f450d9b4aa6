#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "parkdet/geometry.hpp"

namespace parkdet::testing {

// Independent reference solver for the soft-margin dual:
//   max  sum(alpha) - 0.5 alpha' Q alpha,  Q_ij = y_i y_j x_i.x_j
//   s.t. 0 <= alpha <= C,  sum(y alpha) = 0
// Accelerated projected gradient; the feasible-set projection (box
// intersected with the label hyperplane) is computed by bisection on the
// hyperplane multiplier.
struct OracleResult {
  Vec2 w;
  double b = 0.0;
  double objective = 0.0;  // primal value at (w, optimal b)
};

std::vector<double> project_feasible(std::vector<double> v,
                                     const std::vector<double>& y, double C) {
  auto shifted_sum = [&](double theta) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += y[i] * std::clamp(v[i] - theta * y[i], 0.0, C);
    return s;
  };
  double lo = -1e9, hi = 1e9;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (shifted_sum(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double theta = 0.5 * (lo + hi);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::clamp(v[i] - theta * y[i], 0.0, C);
  return v;
}

OracleResult oracle_soft_margin(const std::vector<Vec2>& neg,
                                const std::vector<Vec2>& pos, double C) {
  std::vector<Vec2> x;
  std::vector<double> y;
  for (const auto& p : neg) {
    x.push_back(p);
    y.push_back(-1.0);
  }
  for (const auto& p : pos) {
    x.push_back(p);
    y.push_back(1.0);
  }
  const std::size_t n = x.size();
  std::vector<std::vector<double>> Q(n, std::vector<double>(n));
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) Q[i][j] = y[i] * y[j] * x[i].dot(x[j]);
    trace += Q[i][i];
  }
  const double step = 1.0 / std::max(trace, 1e-12);  // trace bounds lambda_max

  // Primal value at the w induced by alpha, with the bias chosen optimally:
  // the hinge sum is piecewise linear in b, so the minimum sits on one of
  // the kinks b = y_k - w.x_k.
  auto primal_at = [&](const std::vector<double>& a, Vec2* w_out,
                       double* b_out) {
    Vec2 w;
    for (std::size_t i = 0; i < n; ++i) w += x[i] * (a[i] * y[i]);
    auto value = [&](double b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        s += std::max(0.0, 1.0 - y[i] * (w.dot(x[i]) + b));
      return 0.5 * w.norm2() + C * s;
    };
    double best_b = 0.0, best = value(0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double b = y[k] - w.dot(x[k]);
      const double v = value(b);
      if (v < best) {
        best = v;
        best_b = b;
      }
    }
    if (w_out) *w_out = w;
    if (b_out) *b_out = best_b;
    return best;
  };

  std::vector<double> alpha(n, 0.0), prev(n, 0.0), z(n, 0.0), grad(n);
  double tk = 1.0, last_dual = -1e300;
  for (int it = 0; it < 2000000; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double g = -1.0;
      for (std::size_t j = 0; j < n; ++j) g += Q[i][j] * z[j];
      grad[i] = g;
    }
    prev = alpha;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i] - step * grad[i];
    alpha = project_feasible(std::move(v), y, C);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    for (std::size_t i = 0; i < n; ++i)
      z[i] = alpha[i] + (tk - 1.0) / t_next * (alpha[i] - prev[i]);
    tk = t_next;
    if (it % 100 == 99) {
      // Duality-gap stop: the dual value lower-bounds the optimum and the
      // primal value upper-bounds it, so a tiny gap certifies the answer.
      double dual = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double qa = 0.0;
        for (std::size_t j = 0; j < n; ++j) qa += Q[i][j] * alpha[j];
        dual += alpha[i] - 0.5 * alpha[i] * qa;
      }
      const double p = primal_at(alpha, nullptr, nullptr);
      if (p - dual <= 1e-9 * std::max(1.0, p)) break;
      if (dual < last_dual) {  // momentum overshoot: restart acceleration
        tk = 1.0;
        z = alpha;
      }
      last_dual = dual;
    }
  }

  OracleResult r;
  r.objective = primal_at(alpha, &r.w, &r.b);
  return r;
}


}  // namespace parkdet::testing
