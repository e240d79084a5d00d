#include "coloke/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "coloke/rng.hpp"

namespace coloke::harness {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
T get_field(const nlohmann::json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw std::runtime_error("config field '" + key + "' has the wrong type");
  }
}

learn::LearnerConfig parse_learner(const nlohmann::json& j) {
  if (!j.is_object()) throw std::runtime_error("config field 'learners' must hold objects");
  if (!j.contains("name"))
    throw std::runtime_error("config field 'learners[].name' is required");
  learn::LearnerConfig cfg;
  cfg.name = get_field<std::string>(j, "name", "");
  cfg.alpha = get_field<double>(j, "alpha", cfg.alpha);
  cfg.gamma = get_field<double>(j, "gamma", cfg.gamma);
  cfg.c_sat = get_field<double>(j, "c_sat", cfg.c_sat);
  cfg.lr = get_field<double>(j, "lr", cfg.lr);
  cfg.weight_decay = get_field<double>(j, "weight_decay", cfg.weight_decay);
  cfg.n_iter = get_field<int>(j, "n_iter", cfg.n_iter);
  cfg.epochs = get_field<int>(j, "epochs", cfg.epochs);
  cfg.max_inner_iters = get_field<int>(j, "max_inner_iters", cfg.max_inner_iters);
  cfg.rho = get_field<double>(j, "rho", cfg.rho);
  cfg.degree = get_field<int>(j, "degree", cfg.degree);
  cfg.hidden = get_field<std::vector<std::size_t>>(j, "hidden", cfg.hidden);
  return cfg;
}

nlohmann::json learner_to_json(const learn::LearnerConfig& cfg) {
  nlohmann::json j;
  j["name"] = cfg.name;
  j["alpha"] = cfg.alpha;
  j["gamma"] = cfg.gamma;
  j["c_sat"] = cfg.c_sat;
  j["lr"] = cfg.lr;
  j["weight_decay"] = cfg.weight_decay;
  j["n_iter"] = cfg.n_iter;
  j["epochs"] = cfg.epochs;
  j["max_inner_iters"] = cfg.max_inner_iters;
  j["rho"] = cfg.rho;
  j["degree"] = cfg.degree;
  j["hidden"] = cfg.hidden;
  return j;
}

// Streams one learner over one ordered list of trajectories: init on the
// first trajectory's prefix, re-warm at every later boundary, and decide on
// indices t0..T-1. Per-trajectory error series are appended to traj_errors;
// diagnostics are recorded into res when record_logs is true.
void stream_over(learn::Learner& learner, const std::vector<const dyn::Trajectory*>& trajs,
                 std::size_t t0, double dt, std::size_t spectra_every, bool record_logs,
                 std::vector<std::vector<double>>& traj_errors, LearnerResult& res) {
  bool first = true;
  std::size_t scored_steps = 0;
  for (const dyn::Trajectory* tp : trajs) {
    const dyn::Trajectory& traj = *tp;
    if (traj.size() <= t0)
      throw std::runtime_error("run_experiment: trajectory has no steps beyond t0");
    if (first) {
      const std::vector<std::vector<double>> prefix(traj.states.begin(),
                                                    traj.states.begin() + t0);
      learner.init(prefix);
      first = false;
    } else {
      learner.start_trajectory();
      for (std::size_t i = 0; i < t0; ++i) learner.warm(traj.states[i]);
    }
    std::vector<double> errs;
    errs.reserve(traj.size() - t0);
    for (std::size_t i = t0; i < traj.size(); ++i) {
      const learn::StepStats st = learner.step(traj.states[i]);
      errs.push_back(st.online_sq_error);
      if (!record_logs) continue;
      res.steps.push_back(st);
      res.total_inner_iters += st.inner_iters;
      if (st.scored && std::isfinite(st.threshold)) res.thresholds.push_back(st.threshold);
      if (dt > 0.0 && st.scored) {
        ++scored_steps;
        if (spectra_every > 0 && scored_steps % spectra_every == 0) {
          res.spectra_steps.push_back(st.t);
          res.spectra.push_back(koop::spectrum(learner.koopman(), dt));
        }
      }
    }
    traj_errors.push_back(std::move(errs));
  }
  if (record_logs && dt > 0.0 && !res.steps.empty()) {
    const std::size_t last_t = res.steps.back().t;
    if (res.spectra_steps.empty() || res.spectra_steps.back() != last_t) {
      res.spectra_steps.push_back(last_t);
      res.spectra.push_back(koop::spectrum(learner.koopman(), dt));
    }
  }
}

void finalize_logs(LearnerResult& res) {
  std::vector<bool> flags;
  for (const learn::StepStats& st : res.steps)
    if (st.scored) flags.push_back(st.e_t);
  if (!flags.empty()) res.updates = metrics::update_stats(flags);
  if (!res.thresholds.empty()) res.growth = metrics::threshold_growth(res.thresholds);
}

LearnerResult run_column_synthetic(const learn::LearnerConfig& base,
                                   const ExperimentConfig& config, const dyn::Dataset& data,
                                   std::size_t n_splits, std::size_t t0, double dt) {
  LearnerResult res;
  res.name = base.name;
  try {
    for (std::size_t k = 0; k < n_splits; ++k) {
      learn::LearnerConfig cfg = base;
      cfg.w = config.w;
      cfg.seed = rng::derive(config.seed, base.name, k);
      const std::unique_ptr<learn::Learner> learner = learn::make_learner(cfg);

      std::vector<const dyn::Trajectory*> train;
      for (std::size_t id : data.splits[k].train) train.push_back(&data.trajectories[id]);
      std::vector<dyn::Trajectory> test;
      for (std::size_t id : data.splits[k].test) test.push_back(data.trajectories[id]);

      const Clock::time_point start = Clock::now();
      std::vector<std::vector<double>> traj_errors;
      stream_over(*learner, train, t0, dt, config.spectra_every, k == 0, traj_errors, res);
      res.wall_seconds += seconds_since(start);

      res.online_errors.push_back(metrics::online_error(traj_errors));
      res.gen_errors.push_back(metrics::generalization_error(
          [&](std::span<const double> x) { return learner->predict(x); }, test));
    }
    res.online_agg = metrics::aggregate(res.online_errors);
    res.gen_agg = metrics::aggregate(res.gen_errors);
    finalize_logs(res);
  } catch (const std::exception& e) {
    res.failed = true;
    res.error = e.what();
  }
  return res;
}

LearnerResult run_column_csv(const learn::LearnerConfig& base, const ExperimentConfig& config,
                             const dyn::Trajectory& traj, std::size_t t0) {
  LearnerResult res;
  res.name = base.name;
  try {
    learn::LearnerConfig cfg = base;
    cfg.w = config.w;
    cfg.seed = rng::derive(config.seed, base.name, 0);
    const std::unique_ptr<learn::Learner> learner = learn::make_learner(cfg);

    const std::vector<const dyn::Trajectory*> trajs = {&traj};
    const Clock::time_point start = Clock::now();
    std::vector<std::vector<double>> traj_errors;
    stream_over(*learner, trajs, t0, traj.dt, config.spectra_every, true, traj_errors, res);
    res.wall_seconds += seconds_since(start);

    res.online_errors.push_back(metrics::online_error(traj_errors));
    res.online_agg = metrics::aggregate(res.online_errors);
    finalize_logs(res);
  } catch (const std::exception& e) {
    res.failed = true;
    res.error = e.what();
  }
  return res;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config root must be a JSON object");

  ExperimentConfig cfg;
  cfg.system = get_field<std::string>(j, "system", "");
  cfg.csv_path = get_field<std::string>(j, "csv", "");
  if (cfg.system.empty() == cfg.csv_path.empty())
    throw std::runtime_error("config field 'system': exactly one of 'system' and 'csv' is required");
  cfg.n_traj = get_field<std::size_t>(j, "n_traj", cfg.n_traj);
  cfg.n_splits = get_field<std::size_t>(j, "n_splits", cfg.n_splits);
  cfg.seed = get_field<std::uint64_t>(j, "seed", cfg.seed);
  cfg.w = get_field<std::size_t>(j, "w", cfg.w);
  cfg.t0 = get_field<std::size_t>(j, "t0", cfg.t0);
  cfg.spectra_every = get_field<std::size_t>(j, "spectra_every", cfg.spectra_every);
  cfg.out_dir = get_field<std::string>(j, "out_dir", "");
  if (cfg.w == 0) throw std::runtime_error("config field 'w' must be positive");
  if (!j.contains("learners") || !j.at("learners").is_array() || j.at("learners").empty())
    throw std::runtime_error("config field 'learners' must be a nonempty array");
  for (const nlohmann::json& lj : j.at("learners")) cfg.learners.push_back(parse_learner(lj));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config file '" + path + "' cannot be opened");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

BenchmarkReport run_experiment(const ExperimentConfig& config) {
  BenchmarkReport report;
  report.config = config;
  if (config.learners.empty())
    throw std::invalid_argument("run_experiment: no learners configured");

  if (!config.csv_path.empty()) {
    const dyn::Trajectory traj = dyn::load_csv(config.csv_path);
    report.dt = traj.dt;
    report.t0 = config.t0 != 0 ? config.t0 : traj.size() / 5;
    if (report.t0 < config.w + 1)
      throw std::invalid_argument("run_experiment: t0 must be at least w+1");
    for (const learn::LearnerConfig& base : config.learners)
      report.results.push_back(run_column_csv(base, config, traj, report.t0));
  } else {
    const dyn::OdeSystem sys = dyn::make_system(config.system);
    const dyn::Dataset data =
        dyn::generate_dataset(sys, config.n_traj, rng::derive(config.seed, "dataset"));
    report.dt = sys.dt;
    report.t0 = config.t0 != 0 ? config.t0 : data.t0;
    if (report.t0 < config.w + 1)
      throw std::invalid_argument("run_experiment: t0 must be at least w+1");
    const std::size_t n_splits = std::min(config.n_splits, data.splits.size());
    if (n_splits == 0) throw std::invalid_argument("run_experiment: n_splits must be positive");
    for (const learn::LearnerConfig& base : config.learners)
      report.results.push_back(
          run_column_synthetic(base, config, data, n_splits, report.t0, report.dt));
  }

  if (!config.out_dir.empty()) write_report(report, config.out_dir);
  return report;
}

void write_report(const BenchmarkReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("write_report: cannot create '" + out_dir + "'");

  nlohmann::json j;
  j["dt"] = report.dt;
  j["t0"] = report.t0;
  nlohmann::json cj;
  cj["system"] = report.config.system;
  cj["csv"] = report.config.csv_path;
  cj["n_traj"] = report.config.n_traj;
  cj["n_splits"] = report.config.n_splits;
  cj["seed"] = report.config.seed;
  cj["w"] = report.config.w;
  cj["t0"] = report.config.t0;
  cj["spectra_every"] = report.config.spectra_every;
  cj["out_dir"] = report.config.out_dir;
  cj["learners"] = nlohmann::json::array();
  for (const learn::LearnerConfig& l : report.config.learners)
    cj["learners"].push_back(learner_to_json(l));
  j["config"] = cj;

  j["results"] = nlohmann::json::array();
  for (const LearnerResult& r : report.results) {
    nlohmann::json rj;
    rj["name"] = r.name;
    rj["failed"] = r.failed;
    rj["error"] = r.error;
    rj["online_errors"] = r.online_errors;
    rj["gen_errors"] = r.gen_errors;
    if (!r.online_errors.empty()) {
      rj["online_mean"] = r.online_agg.mean;
      rj["online_std_of_mean"] = r.online_agg.std_of_mean;
    }
    if (!r.gen_errors.empty()) {
      rj["gen_mean"] = r.gen_agg.mean;
      rj["gen_std_of_mean"] = r.gen_agg.std_of_mean;
    }
    rj["updates"] = {{"count", r.updates.count},
                     {"fraction", r.updates.fraction},
                     {"mean_interval", r.updates.mean_interval},
                     {"max_interval", r.updates.max_interval}};
    rj["growth"] = {{"exponent", r.growth.exponent}, {"shift", r.growth.shift}};
    rj["wall_seconds"] = r.wall_seconds;
    rj["total_inner_iters"] = r.total_inner_iters;
    j["results"].push_back(rj);
  }

  {
    const std::string path = (fs::path(out_dir) / "report.json").string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_report: cannot open '" + path + "'");
    out << j.dump(2) << '\n';
  }
  {
    const std::string path = (fs::path(out_dir) / "thresholds.csv").string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_report: cannot open '" + path + "'");
    out << "learner,t,threshold\n";
    for (const LearnerResult& r : report.results)
      for (std::size_t t = 0; t < r.thresholds.size(); ++t)
        out << r.name << ',' << t << ',' << fmt_double(r.thresholds[t]) << '\n';
  }
  {
    const std::string path = (fs::path(out_dir) / "spectra.csv").string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_report: cannot open '" + path + "'");
    out << "learner,step,eig_index,real,imag\n";
    for (const LearnerResult& r : report.results)
      for (std::size_t c = 0; c < r.spectra.size(); ++c)
        for (std::size_t i = 0; i < r.spectra[c].size(); ++i)
          out << r.name << ',' << r.spectra_steps[c] << ',' << i << ','
              << fmt_double(r.spectra[c][i].real()) << ',' << fmt_double(r.spectra[c][i].imag())
              << '\n';
  }
  std::map<std::string, int> name_counts;
  for (const LearnerResult& r : report.results) {
    const int count = ++name_counts[r.name];
    std::string file = "steps_" + r.name;
    if (count > 1) file += "_" + std::to_string(count);
    const std::string path = (fs::path(out_dir) / (file + ".csv")).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_report: cannot open '" + path + "'");
    out << "t,score,threshold,e_t,inner_iters,cap_hit,online_sq_error\n";
    for (const learn::StepStats& st : r.steps)
      out << st.t << ',' << fmt_double(st.score) << ',' << fmt_double(st.threshold) << ','
          << (st.e_t ? 1 : 0) << ',' << st.inner_iters << ',' << (st.cap_hit ? 1 : 0) << ','
          << fmt_double(st.online_sq_error) << '\n';
  }
}

TrainOutcome train_single(const ExperimentConfig& config) {
  if (config.learners.empty())
    throw std::invalid_argument("train_single: no learners configured");
  TrainOutcome out;
  const learn::LearnerConfig& base = config.learners.front();
  out.result.name = base.name;

  std::vector<dyn::Trajectory> owned;  // csv-mode storage
  std::vector<const dyn::Trajectory*> train;
  if (!config.csv_path.empty()) {
    owned.push_back(dyn::load_csv(config.csv_path));
    out.dt = owned.front().dt;
    out.t0 = config.t0 != 0 ? config.t0 : owned.front().size() / 5;
    train.push_back(&owned.front());
  } else {
    const dyn::OdeSystem sys = dyn::make_system(config.system);
    dyn::Dataset data =
        dyn::generate_dataset(sys, config.n_traj, rng::derive(config.seed, "dataset"));
    out.dt = sys.dt;
    out.t0 = config.t0 != 0 ? config.t0 : data.t0;
    owned = std::move(data.trajectories);
    for (std::size_t id : data.splits[0].train) train.push_back(&owned[id]);
  }
  if (out.t0 < config.w + 1)
    throw std::invalid_argument("train_single: t0 must be at least w+1");

  learn::LearnerConfig cfg = base;
  cfg.w = config.w;
  cfg.seed = rng::derive(config.seed, base.name, 0);
  out.learner = learn::make_learner(cfg);
  try {
    const Clock::time_point start = Clock::now();
    std::vector<std::vector<double>> traj_errors;
    stream_over(*out.learner, train, out.t0, out.dt, config.spectra_every, true, traj_errors,
                out.result);
    out.result.wall_seconds = seconds_since(start);
    out.result.online_errors.push_back(metrics::online_error(traj_errors));
    out.result.online_agg = metrics::aggregate(out.result.online_errors);
    finalize_logs(out.result);
  } catch (const std::exception& e) {
    out.result.failed = true;
    out.result.error = e.what();
  }
  return out;
}

OfflineComparison run_offline_baseline(const ExperimentConfig& config, int offline_epochs,
                                       int checkpoint_every_epochs,
                                       std::size_t online_checkpoint_every_steps) {
  if (config.system.empty())
    throw std::invalid_argument("run_offline_baseline: a synthetic system config is required");
  const dyn::OdeSystem sys = dyn::make_system(config.system);
  const dyn::Dataset data =
      dyn::generate_dataset(sys, config.n_traj, rng::derive(config.seed, "dataset"));
  const std::size_t t0 = config.t0 != 0 ? config.t0 : data.t0;

  learn::LearnerConfig base;
  base.name = "coloke";
  for (const learn::LearnerConfig& l : config.learners)
    if (l.name == "coloke") {
      base = l;
      break;
    }
  base.w = config.w;

  std::vector<const dyn::Trajectory*> train;
  for (std::size_t id : data.splits[0].train) train.push_back(&data.trajectories[id]);
  std::vector<dyn::Trajectory> test;
  for (std::size_t id : data.splits[0].test) test.push_back(data.trajectories[id]);

  OfflineComparison out;

  // Streaming pass: wall time counts init and updates, not evaluation.
  {
    learn::LearnerConfig cfg = base;
    cfg.seed = rng::derive(config.seed, base.name, 0);
    const std::unique_ptr<learn::Learner> learner = learn::make_learner(cfg);
    const auto eval = [&] {
      return metrics::generalization_error(
          [&](std::span<const double> x) { return learner->predict(x); }, test);
    };
    double elapsed = 0.0;
    std::size_t steps = 0;
    bool first = true;
    for (const dyn::Trajectory* tp : train) {
      const dyn::Trajectory& traj = *tp;
      Clock::time_point tic = Clock::now();
      if (first) {
        const std::vector<std::vector<double>> prefix(traj.states.begin(),
                                                      traj.states.begin() + t0);
        learner->init(prefix);
        first = false;
        elapsed += seconds_since(tic);
        out.online.push_back({elapsed, eval()});
      } else {
        learner->start_trajectory();
        for (std::size_t i = 0; i < t0; ++i) learner->warm(traj.states[i]);
        elapsed += seconds_since(tic);
      }
      for (std::size_t i = t0; i < traj.size(); ++i) {
        tic = Clock::now();
        learner->step(traj.states[i]);
        elapsed += seconds_since(tic);
        if (online_checkpoint_every_steps > 0 && ++steps % online_checkpoint_every_steps == 0)
          out.online.push_back({elapsed, eval()});
      }
    }
    if (out.online.empty() || out.online.back().seconds != elapsed)
      out.online.push_back({elapsed, eval()});
  }

  // Offline pass: one full-batch AdamW step per epoch over every window of
  // every training trajectory (prefixes included).
  {
    const std::size_t d = train.front()->dim();
    koop::LiftedModel model =
        koop::make_lifted_model(d, config.w, base.hidden, rng::derive(config.seed, "offline"));
    nn::AdamWConfig oc;
    oc.lr = base.lr;
    oc.weight_decay = base.weight_decay;
    nn::AdamWState opt(model.params.size(), oc);

    std::vector<std::vector<koop::Buffer>> windows;
    for (const dyn::Trajectory* tp : train) {
      std::vector<koop::Buffer> traj_windows;
      for (std::size_t end = config.w; end < tp->size(); ++end) {
        koop::Buffer win(config.w);
        for (std::size_t i = end - config.w; i <= end; ++i) win.push(tp->states[i]);
        traj_windows.push_back(std::move(win));
      }
      windows.push_back(std::move(traj_windows));
    }

    ad::Tape tape;
    double elapsed = 0.0;
    std::vector<int> roots;
    for (int epoch = 1; epoch <= offline_epochs; ++epoch) {
      const Clock::time_point tic = Clock::now();
      ad::ParamVector total_grad;
      double loss = 0.0;
      for (const std::vector<koop::Buffer>& traj_windows : windows) {
        tape.reset(&model.params);
        roots.clear();
        for (const koop::Buffer& win : traj_windows)
          roots.push_back(koop::multistep_loss_node(tape, model, win));
        const int root = tape.sum(roots);
        loss += tape.scalar_value(root);
        ad::ParamVector grad = tape.backward(root);
        if (total_grad.values.empty()) {
          total_grad = std::move(grad);
        } else {
          for (std::size_t i = 0; i < total_grad.values.size(); ++i)
            total_grad.values[i] += grad.values[i];
        }
      }
      nn::adamw_step(model.params, total_grad, opt);
      elapsed += seconds_since(tic);
      out.offline_losses.push_back(loss);
      if (epoch % checkpoint_every_epochs == 0 || epoch == offline_epochs)
        out.offline.push_back(
            {elapsed, metrics::generalization_error(
                          [&](std::span<const double> x) { return koop::predict_next(model, x); },
                          test)});
    }
  }
  return out;
}

}  // namespace coloke::harness
