#include "parkdet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parkdet {

namespace {

struct Confusion {
  long occ = 0;        // observed, truly occupied
  long free_ = 0;      // observed, truly free
  long miss_occ = 0;   // judged FREE though occupied (Type I)
  long miss_free = 0;  // judged OCCUPIED though free (Type II)
};

void accumulate(Confusion& c, const SegmentEstimate& est,
                const std::map<int, SpaceState>& truth) {
  for (const auto& [id, state] : est.states) {
    if (state == SpaceState::UNOBSERVED) continue;
    const auto it = truth.find(id);
    if (it == truth.end())
      throw std::invalid_argument("score_segment: observed space missing from truth");
    if (it->second == SpaceState::OCCUPIED) {
      ++c.occ;
      if (state == SpaceState::FREE) ++c.miss_occ;
    } else {
      ++c.free_;
      if (state == SpaceState::OCCUPIED) ++c.miss_free;
    }
  }
}

// Regularized incomplete beta function I_x(a, b) by Lentz continued
// fraction.
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16, kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) -
                             std::lgamma(b) + a * std::log(x) +
                             b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double student_t_two_sided_p(double t_stat, double dof) {
  if (dof <= 0.0) throw std::invalid_argument("student_t_two_sided_p: dof <= 0");
  if (t_stat == 0.0) return 1.0;
  return ibeta(dof / 2.0, 0.5, dof / (dof + t_stat * t_stat));
}

ErrorReport score_segment(const SegmentEstimate& estimate,
                          const std::map<int, SpaceState>& truth) {
  Confusion c;
  accumulate(c, estimate, truth);
  ErrorReport r;
  r.segment_id = estimate.segment_id;
  r.mean_speed = estimate.mean_speed;
  r.n_occ_observed = static_cast<int>(c.occ);
  r.n_free_observed = static_cast<int>(c.free_);
  if (c.occ > 0) r.type1_rate = static_cast<double>(c.miss_occ) / c.occ;
  if (c.free_ > 0) r.type2_rate = static_cast<double>(c.miss_free) / c.free_;
  return r;
}

std::vector<ErrorReport> score_run(const std::vector<SegmentResult>& results,
                                   const std::map<int, SpaceState>& truth) {
  std::vector<ErrorReport> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(score_segment(r.estimate, truth));
  return out;
}

RegressionResult regress_error_speed(const std::vector<ErrorReport>& reports,
                                     bool use_type2) {
  std::vector<double> xs, ys;
  for (const auto& r : reports) {
    const auto& rate = use_type2 ? r.type2_rate : r.type1_rate;
    if (!rate) continue;
    xs.push_back(r.mean_speed);
    ys.push_back(*rate);
  }
  const std::size_t n = xs.size();
  if (n < 3)
    throw std::invalid_argument("regress_error_speed: needs >= 3 defined rates");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0)
    throw std::invalid_argument("regress_error_speed: all speeds identical");

  RegressionResult res;
  res.n = static_cast<int>(n);
  res.slope = sxy / sxx;
  res.intercept = my - res.slope * mx;
  const double sse = std::max(0.0, syy - res.slope * sxy);
  res.r2 = syy > 0.0 ? 1.0 - sse / syy : 0.0;
  const double dof = static_cast<double>(n) - 2.0;
  const double se2 = sse / dof / sxx;
  if (se2 <= 0.0) {
    res.p_value = res.slope == 0.0 ? 1.0 : 0.0;  // exact fit
  } else {
    res.p_value = student_t_two_sided_p(res.slope / std::sqrt(se2), dof);
  }
  return res;
}

RateHistogram histogram_rates(const std::vector<ErrorReport>& reports, int bins,
                              RateKind kind) {
  if (bins < 1) throw std::invalid_argument("histogram_rates: bins < 1");
  RateHistogram h;
  h.counts.assign(bins, 0);
  for (const auto& r : reports) {
    std::optional<double> v;
    switch (kind) {
      case RateKind::TYPE1:
        v = r.type1_rate;
        break;
      case RateKind::TYPE2:
        v = r.type2_rate;
        break;
      case RateKind::OVERALL: {
        const long denom = r.n_occ_observed + r.n_free_observed;
        if (denom > 0) {
          const double miss =
              (r.type1_rate ? *r.type1_rate * r.n_occ_observed : 0.0) +
              (r.type2_rate ? *r.type2_rate * r.n_free_observed : 0.0);
          v = miss / static_cast<double>(denom);
        }
        break;
      }
    }
    if (!v) {
      ++h.undefined;
      continue;
    }
    int b = static_cast<int>(*v * bins);
    b = std::clamp(b, 0, bins - 1);  // rate 1.0 lands in the top bin
    ++h.counts[b];
  }
  return h;
}

TuneCurve tune_bandwidth(const std::vector<Trial>& trials,
                         const std::vector<double>& grid,
                         const DetectConfig& base, double type1_weight) {
  if (grid.empty()) throw std::invalid_argument("tune_bandwidth: empty grid");
  if (trials.empty()) throw std::invalid_argument("tune_bandwidth: no trials");

  TuneCurve curve;
  curve.points.resize(grid.size());
  const auto n = static_cast<std::int64_t>(grid.size());

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t g = 0; g < n; ++g) {
    DetectConfig cfg = base;
    cfg.method = ClusterMethod::MSC;
    cfg.msc.bandwidth = grid[g];
    Confusion c;
    for (const auto& trial : trials) {
      const auto results =
          run_detection(trial.poses, trial.detections, trial.map, cfg);
      for (const auto& r : results) accumulate(c, r.estimate, trial.truth);
    }
    TunePoint& pt = curve.points[g];
    pt.bandwidth = grid[g];
    if (c.occ > 0) pt.type1_rate = static_cast<double>(c.miss_occ) / c.occ;
    if (c.free_ > 0) pt.type2_rate = static_cast<double>(c.miss_free) / c.free_;
    pt.objective = type1_weight * pt.type1_rate.value_or(0.0) +
                   pt.type2_rate.value_or(0.0);
  }

  for (std::size_t g = 1; g < curve.points.size(); ++g)
    if (curve.points[g].objective < curve.points[curve.best].objective)
      curve.best = g;
  return curve;
}

}  // namespace parkdet
