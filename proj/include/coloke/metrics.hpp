#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "coloke/dynamics.hpp"

namespace coloke::metrics {

// Mean over trajectories of the per-trajectory temporal mean of squared
// one-step prediction errors. Throws on an empty outer or inner series.
double online_error(const std::vector<std::vector<double>>& per_traj_sq_errors);

// Mean over test trajectories of the mean squared one-step error of a frozen
// model: predict receives x_{t-1} and is compared against x_t for t = 1..T-1.
double generalization_error(
    const std::function<std::vector<double>(std::span<const double>)>& predict,
    const std::vector<dyn::Trajectory>& test);

struct UpdateStats {
  std::size_t count = 0;
  double fraction = 0.0;
  double mean_interval = 0.0;  // 0 when fewer than two triggers
  double max_interval = 0.0;
};

// Trigger counts and inter-trigger intervals (distance in steps between
// consecutive triggered steps). Throws on an empty flag series.
UpdateStats update_stats(const std::vector<bool>& triggers);

struct GrowthFit {
  double exponent = 0.0;  // least-squares slope of log cumsum vs log t
  double shift = 0.0;     // min(0, min q): subtracted to make the series nonnegative
};

// Growth exponent of the cumulative threshold series, fitted over the second
// half of the run to suppress warm-up transients. An all-zero (post-shift)
// series reports exponent 0.
GrowthFit threshold_growth(const std::vector<double>& q_series);

// Per-truth error series |lambda_hat - lambda*| across checkpoints. At each
// checkpoint the estimates are sorted by descending real part and greedily
// matched to each ground truth by nearest real part (ties keep sort order).
// Throws if a checkpoint has fewer estimates than ground truths.
std::vector<std::vector<double>> eigenvalue_error(
    const std::vector<std::vector<std::complex<double>>>& spectra,
    const std::vector<double>& truth);

struct Aggregate {
  double mean = 0.0;
  double std_of_mean = 0.0;  // sample std (n-1) divided by sqrt(n); 0 when n = 1
};

Aggregate aggregate(std::span<const double> values);

}  // namespace coloke::metrics
