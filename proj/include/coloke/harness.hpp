#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "coloke/dynamics.hpp"
#include "coloke/learners.hpp"
#include "coloke/metrics.hpp"

namespace coloke::harness {

// One experiment: a data source, a window/warm-up policy, and a list of
// learner columns. Loaded from JSON; all randomness derives from `seed`.
struct ExperimentConfig {
  std::string system;    // synthetic system name (empty when csv_path is set)
  std::string csv_path;  // single-trajectory mode (empty when system is set)
  std::size_t n_traj = 125;
  std::size_t n_splits = 5;   // uses the first n_splits of the dataset's five
  std::uint64_t seed = 0;
  std::size_t w = 5;
  std::size_t t0 = 0;             // 0 means the horizon/5 rule
  std::size_t spectra_every = 10; // checkpoint cadence for eigenvalue series
  std::string out_dir;
  std::vector<learn::LearnerConfig> learners;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// One learner's column of the report. On failure the error message is kept
// and every series is left as far as it got.
struct LearnerResult {
  std::string name;
  bool failed = false;
  std::string error;
  std::vector<double> online_errors;  // per-split epsilon
  std::vector<double> gen_errors;     // per-split xi (empty in csv mode)
  metrics::Aggregate online_agg;
  metrics::Aggregate gen_agg;
  metrics::UpdateStats updates;       // split-0 trigger statistics
  metrics::GrowthFit growth;          // split-0 cumulative-threshold fit
  double wall_seconds = 0.0;          // init + streaming, summed over splits
  long long total_inner_iters = 0;    // summed over split-0 steps
  std::vector<learn::StepStats> steps;           // split-0 step log
  std::vector<double> thresholds;                // split-0 q_t series
  std::vector<std::size_t> spectra_steps;        // checkpoint step indices
  std::vector<std::vector<std::complex<double>>> spectra;  // continuous eigenvalues
};

struct BenchmarkReport {
  ExperimentConfig config;
  double dt = 0.0;       // sampling interval of the data source
  std::size_t t0 = 0;    // resolved warm-up length
  std::vector<LearnerResult> results;
};

// Streams every configured learner over the dataset splits (or the single
// CSV trajectory) and aggregates the metrics. Learner columns fail
// independently; a failure is recorded, not propagated.
BenchmarkReport run_experiment(const ExperimentConfig& config);

// Writes report.json, thresholds.csv, spectra.csv, and steps_<learner>.csv
// into out_dir (created if missing).
void write_report(const BenchmarkReport& report, const std::string& out_dir);

// Outcome of training a single learner column while keeping the learner.
struct TrainOutcome {
  LearnerResult result;
  std::unique_ptr<learn::Learner> learner;
  double dt = 0.0;
  std::size_t t0 = 0;
};

// Streams only the first configured learner over split 0 of the dataset (or
// over the CSV trajectory) and hands back the trained learner. Failures are
// recorded in result.failed/result.error, matching run_experiment columns.
TrainOutcome train_single(const ExperimentConfig& config);

struct TimedError {
  double seconds = 0.0;
  double xi = 0.0;
};

struct OfflineComparison {
  std::vector<TimedError> offline;     // full-batch training curve, per checkpoint
  std::vector<TimedError> online;      // streaming learner curve, per checkpoint
  std::vector<double> offline_losses;  // pre-step full-batch loss, one per epoch
};

// Trains a lifted model full-batch on all split-0 training windows,
// checkpointing test error against elapsed time, and streams the first
// configured gradient learner on the same split for comparison.
OfflineComparison run_offline_baseline(const ExperimentConfig& config, int offline_epochs,
                                       int checkpoint_every_epochs,
                                       std::size_t online_checkpoint_every_steps);

}  // namespace coloke::harness
