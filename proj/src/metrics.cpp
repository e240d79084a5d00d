#include "coloke/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coloke::metrics {
namespace {

double mean_of(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

}  // namespace

double online_error(const std::vector<std::vector<double>>& per_traj_sq_errors) {
  if (per_traj_sq_errors.empty())
    throw std::invalid_argument("online_error: no trajectories");
  double acc = 0.0;
  for (const std::vector<double>& errs : per_traj_sq_errors) {
    if (errs.empty()) throw std::invalid_argument("online_error: empty error series");
    acc += mean_of(errs);
  }
  return acc / static_cast<double>(per_traj_sq_errors.size());
}

double generalization_error(
    const std::function<std::vector<double>(std::span<const double>)>& predict,
    const std::vector<dyn::Trajectory>& test) {
  if (test.empty()) throw std::invalid_argument("generalization_error: no test trajectories");
  double acc = 0.0;
  for (const dyn::Trajectory& traj : test) {
    if (traj.size() < 2)
      throw std::invalid_argument("generalization_error: trajectory shorter than 2 states");
    double traj_acc = 0.0;
    for (std::size_t t = 1; t < traj.size(); ++t) {
      const std::vector<double> pred = predict(traj.states[t - 1]);
      double step = 0.0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const double diff = traj.states[t][i] - pred[i];
        step += diff * diff;
      }
      traj_acc += step;
    }
    acc += traj_acc / static_cast<double>(traj.size() - 1);
  }
  return acc / static_cast<double>(test.size());
}

UpdateStats update_stats(const std::vector<bool>& triggers) {
  if (triggers.empty()) throw std::invalid_argument("update_stats: empty trigger series");
  UpdateStats s;
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < triggers.size(); ++i)
    if (triggers[i]) positions.push_back(i);
  s.count = positions.size();
  s.fraction = static_cast<double>(s.count) / static_cast<double>(triggers.size());
  if (positions.size() >= 2) {
    double sum = 0.0, mx = 0.0;
    for (std::size_t j = 1; j < positions.size(); ++j) {
      const double gap = static_cast<double>(positions[j] - positions[j - 1]);
      sum += gap;
      mx = std::max(mx, gap);
    }
    s.mean_interval = sum / static_cast<double>(positions.size() - 1);
    s.max_interval = mx;
  }
  return s;
}

GrowthFit threshold_growth(const std::vector<double>& q_series) {
  GrowthFit fit;
  if (q_series.empty()) return fit;
  double mn = q_series.front();
  for (double q : q_series) mn = std::min(mn, q);
  fit.shift = std::min(0.0, mn);

  std::vector<double> cum(q_series.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < q_series.size(); ++t) {
    acc += q_series[t] - fit.shift;
    cum[t] = acc;
  }

  // Least squares of log cum[t] against log(t+1) over the second half,
  // skipping the (leading) zero-cumsum points where the log is undefined.
  std::vector<double> xs, ys;
  for (std::size_t t = q_series.size() / 2; t < q_series.size(); ++t) {
    if (cum[t] <= 0.0) continue;
    xs.push_back(std::log(static_cast<double>(t + 1)));
    ys.push_back(std::log(cum[t]));
  }
  if (xs.size() < 2) return fit;  // flat or all-zero: report exponent 0
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) return fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  return fit;
}

std::vector<std::vector<double>> eigenvalue_error(
    const std::vector<std::vector<std::complex<double>>>& spectra,
    const std::vector<double>& truth) {
  std::vector<std::vector<double>> errors(truth.size());
  for (const std::vector<std::complex<double>>& raw : spectra) {
    if (raw.size() < truth.size())
      throw std::invalid_argument(
          "eigenvalue_error: fewer estimated eigenvalues than ground truths");
    std::vector<std::complex<double>> est(raw);
    std::stable_sort(est.begin(), est.end(),
                     [](const std::complex<double>& a, const std::complex<double>& b) {
                       if (a.real() != b.real()) return a.real() > b.real();
                       return a.imag() > b.imag();
                     });
    std::vector<bool> used(est.size(), false);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      std::size_t best = est.size();
      double best_gap = 0.0;
      for (std::size_t j = 0; j < est.size(); ++j) {
        if (used[j]) continue;
        const double gap = std::abs(est[j].real() - truth[i]);
        if (best == est.size() || gap < best_gap) {
          best = j;
          best_gap = gap;
        }
      }
      used[best] = true;
      errors[i].push_back(std::abs(est[best] - std::complex<double>(truth[i], 0.0)));
    }
  }
  return errors;
}

Aggregate aggregate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate: empty value list");
  Aggregate a;
  a.mean = mean_of(values);
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    const double n = static_cast<double>(values.size());
    a.std_of_mean = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return a;
}

}  // namespace coloke::metrics
