#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace coloke::dyn {

using VectorField = std::function<void(std::span<const double>, std::span<double>)>;

struct OdeSystem {
  std::string name;
  std::size_t dim = 0;
  VectorField rhs;
  std::vector<std::pair<double, double>> init_box;  // per-coordinate sampling interval
  double dt = 0.0;
  std::size_t horizon = 0;  // number of states per trajectory (T)
};

// Recognized names: single_attractor, duffing, van_der_pol, lorenz.
OdeSystem make_system(const std::string& name);

// One classic fourth-order Runge-Kutta step. Throws if any stage evaluates
// to a non-finite value; the message carries the offending state.
std::vector<double> rk4_step(const VectorField& f, std::span<const double> x, double dt);

struct Trajectory {
  std::vector<std::vector<double>> states;
  double dt = 0.0;
  std::size_t size() const { return states.size(); }
  std::size_t dim() const { return states.empty() ? 0 : states.front().size(); }
};

Trajectory simulate(const OdeSystem& sys, std::span<const double> x0);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

struct Dataset {
  std::string system;
  std::vector<Trajectory> trajectories;
  std::vector<Split> splits;  // five 80/20 partitions
  std::size_t t0 = 0;         // warm-up length (horizon / 5)
  double dt = 0.0;
};

// n_traj trajectories from initial conditions drawn uniformly from the
// system's box, plus five seeded train/test index partitions.
Dataset generate_dataset(const OdeSystem& sys, std::size_t n_traj, std::uint64_t seed);

// CSV: one state per line, comma separated, optional single header line.
Trajectory load_csv(const std::string& path, double dt = 0.0);
void save_csv(const Trajectory& traj, const std::string& path);

}  // namespace coloke::dyn
