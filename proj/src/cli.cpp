#include "coloke/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coloke/dynamics.hpp"
#include "coloke/harness.hpp"
#include "coloke/koopman.hpp"
#include "coloke/linalg.hpp"
#include "coloke/rng.hpp"

namespace coloke::cli {
namespace {

namespace fs = std::filesystem;

// A trained model snapshot is either a full lifted model (has "params") or a
// bare Koopman matrix {"K": [[...], ...]} from the recursive learners.
struct Snapshot {
  bool lifted = false;
  koop::LiftedModel model;  // when lifted
  linalg::Matrix K;
  std::uint64_t seed = 0;
};

Snapshot load_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("model file '" + path + "' cannot be opened");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("model file '" + path + "' is not valid JSON: " + e.what());
  }
  Snapshot snap;
  if (j.contains("params")) {
    snap.lifted = true;
    snap.model = koop::load_model(path);
    snap.K = koop::koopman_matrix(snap.model);
    snap.seed = snap.model.seed;
    return snap;
  }
  if (!j.contains("K"))
    throw std::runtime_error("model file '" + path + "' is missing field 'K'");
  const auto rows = j.at("K").get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw std::runtime_error("model file '" + path + "' has an empty 'K'");
  snap.K = linalg::Matrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size())
      throw std::runtime_error("model file '" + path + "' has ragged 'K' rows");
    for (std::size_t c = 0; c < rows[i].size(); ++c) snap.K(i, c) = rows[i][c];
  }
  snap.seed = j.value("seed", std::uint64_t{0});
  return snap;
}

void save_k_snapshot(const linalg::Matrix& K, const std::string& name, std::uint64_t seed,
                     const std::string& path) {
  nlohmann::json j;
  j["name"] = name;
  j["seed"] = seed;
  std::vector<std::vector<double>> rows(K.rows(), std::vector<double>(K.cols()));
  for (std::size_t i = 0; i < K.rows(); ++i)
    for (std::size_t c = 0; c < K.cols(); ++c) rows[i][c] = K(i, c);
  j["K"] = rows;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

int cmd_simulate(const std::string& system, std::size_t n, std::uint64_t seed,
                 const std::string& out_dir) {
  std::cout << "seed: " << seed << '\n';
  dyn::OdeSystem sys;
  try {
    sys = dyn::make_system(system);
  } catch (const std::exception& e) {
    std::cerr << "error: --system: " << e.what() << '\n';
    return 1;
  }
  try {
    const dyn::Dataset data = dyn::generate_dataset(sys, n, rng::derive(seed, "dataset"));
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + out_dir + "'");
    for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "traj_%03zu.csv", i);
      dyn::save_csv(data.trajectories[i], (fs::path(out_dir) / name).string());
    }
    std::cout << "wrote " << n << " trajectories of " << sys.horizon << " states (dim "
              << sys.dim << ") to " << out_dir << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_train(const std::string& config_path) {
  harness::ExperimentConfig config;
  try {
    config = harness::load_config(config_path);
    if (config.out_dir.empty())
      throw std::runtime_error("config field 'out_dir' is required for train");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cout << "seed: " << config.seed << '\n';
  try {
    harness::TrainOutcome outcome = harness::train_single(config);
    if (outcome.result.failed)
      throw std::runtime_error(outcome.result.name + " failed: " + outcome.result.error);

    harness::BenchmarkReport report;
    report.config = config;
    report.dt = outcome.dt;
    report.t0 = outcome.t0;
    report.results.push_back(outcome.result);
    harness::write_report(report, config.out_dir);

    const std::string model_path = (fs::path(config.out_dir) / "model.json").string();
    if (const koop::LiftedModel* model = outcome.learner->lifted_model()) {
      koop::save_model(*model, model_path);
    } else {
      save_k_snapshot(outcome.learner->koopman(), outcome.result.name,
                      rng::derive(config.seed, outcome.result.name, 0), model_path);
    }
    std::cout << outcome.result.name
              << ": online error = " << outcome.result.online_agg.mean
              << ", steps = " << outcome.result.steps.size()
              << ", wall seconds = " << outcome.result.wall_seconds << '\n';
    std::cout << "model snapshot: " << model_path << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_benchmark(const std::string& config_path) {
  harness::ExperimentConfig config;
  try {
    config = harness::load_config(config_path);
    if (config.out_dir.empty())
      throw std::runtime_error("config field 'out_dir' is required for benchmark");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cout << "seed: " << config.seed << '\n';
  try {
    const harness::BenchmarkReport report = harness::run_experiment(config);
    for (const harness::LearnerResult& r : report.results) {
      if (r.failed) {
        std::cout << r.name << ": FAILED (" << r.error << ")\n";
        continue;
      }
      std::cout << r.name << ": online = " << r.online_agg.mean;
      if (!r.gen_errors.empty()) std::cout << ", generalization = " << r.gen_agg.mean;
      std::cout << ", wall seconds = " << r.wall_seconds << '\n';
    }
    std::cout << "report: " << (fs::path(config.out_dir) / "report.json").string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_spectrum(const std::string& model_path, double dt) {
  Snapshot snap;
  try {
    snap = load_snapshot(model_path);
  } catch (const std::exception& e) {
    std::cerr << "error: --model: " << e.what() << '\n';
    return 1;
  }
  std::cout << "seed: " << snap.seed << '\n';
  try {
    std::size_t dropped = 0;
    const std::vector<std::complex<double>> lam = koop::spectrum(snap.K, dt, &dropped);
    std::cout << std::setprecision(12);
    for (const std::complex<double>& l : lam) std::cout << l.real() << ' ' << l.imag() << '\n';
    if (dropped > 0)
      std::cout << "# dropped " << dropped << " near-zero discrete eigenvalues\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_inspect(const std::string& model_path) {
  Snapshot snap;
  try {
    snap = load_snapshot(model_path);
  } catch (const std::exception& e) {
    std::cerr << "error: --model: " << e.what() << '\n';
    return 1;
  }
  std::cout << "seed: " << snap.seed << '\n';
  if (snap.lifted) {
    const koop::LiftedModel& m = snap.model;
    std::cout << "kind: lifted\n";
    std::cout << "state dim d: " << m.d << '\n';
    std::cout << "lifted dim m: " << m.m << '\n';
    std::cout << "window w: " << m.w << '\n';
    std::cout << "feature net widths:";
    for (std::size_t wd : m.spec.widths) std::cout << ' ' << wd;
    std::cout << '\n';
    const std::size_t theta = nn::mlp_param_count(m.spec);
    std::cout << "feature net parameters: " << theta << '\n';
    std::cout << "operator parameters: " << m.m * m.m << '\n';
    std::cout << "total parameters: " << theta + m.m * m.m << '\n';
  } else {
    std::cout << "kind: operator\n";
    std::cout << "operator shape: " << snap.K.rows() << " x " << snap.K.cols() << '\n';
    std::cout << "operator parameters: " << snap.K.rows() * snap.K.cols() << '\n';
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Conformal online Koopman learning: simulators, learners, benchmarks"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  std::string sim_system, sim_out;
  std::size_t sim_n = 1;
  std::uint64_t sim_seed = 0;
  CLI::App* sim = app.add_subcommand("simulate", "Write simulated trajectories as CSV files");
  sim->add_option("--system", sim_system, "system name: single_attractor, duffing, van_der_pol, lorenz")
      ->required();
  sim->add_option("--n", sim_n, "number of trajectories")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "top-level seed");
  sim->add_option("--out", sim_out, "output directory")->required();

  std::string train_config;
  CLI::App* train = app.add_subcommand(
      "train", "Stream the first configured learner; write model snapshot and step CSV");
  train->add_option("--config", train_config, "experiment config JSON")->required();

  std::string bench_config;
  CLI::App* bench =
      app.add_subcommand("benchmark", "Run every configured learner over the dataset splits");
  bench->add_option("--config", bench_config, "experiment config JSON")->required();

  std::string spec_model;
  double spec_dt = 0.0;
  CLI::App* spec = app.add_subcommand("spectrum", "Print continuous-time eigenvalues of a snapshot");
  spec->add_option("--model", spec_model, "model snapshot JSON")->required();
  spec->add_option("--dt", spec_dt, "sampling interval")->required()->check(CLI::PositiveNumber);

  std::string inspect_model;
  CLI::App* insp = app.add_subcommand("inspect", "Print dimensions and parameter counts");
  insp->add_option("--model", inspect_model, "model snapshot JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (sim->parsed()) return cmd_simulate(sim_system, sim_n, sim_seed, sim_out);
  if (train->parsed()) return cmd_train(train_config);
  if (bench->parsed()) return cmd_benchmark(bench_config);
  if (spec->parsed()) return cmd_spectrum(spec_model, spec_dt);
  if (insp->parsed()) return cmd_inspect(inspect_model);
  return 1;
}

}  // namespace coloke::cli
