#include "coloke/dynamics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "coloke/rng.hpp"

namespace coloke::dyn {

OdeSystem make_system(const std::string& name) {
  OdeSystem s;
  s.name = name;
  if (name == "single_attractor") {
    // du = a u, dv = b (v - u^2); slow/fast pair with a known point spectrum
    const double a = -0.05, b = -1.0;
    s.dim = 2;
    s.rhs = [a, b](std::span<const double> x, std::span<double> dx) {
      dx[0] = a * x[0];
      dx[1] = b * (x[1] - x[0] * x[0]);
    };
    s.init_box = {{-2.0, 2.0}, {-2.0, 2.0}};
    s.dt = 0.01;
    s.horizon = 100;
  } else if (name == "duffing") {
    // u'' = -delta u' - u (beta + mu u^2), two stable spirals at u = +-1
    const double delta = 0.5, beta = -1.0, mu = 1.0;
    s.dim = 2;
    s.rhs = [delta, beta, mu](std::span<const double> x, std::span<double> dx) {
      dx[0] = x[1];
      dx[1] = -delta * x[1] - x[0] * (beta + mu * x[0] * x[0]);
    };
    s.init_box = {{-2.0, 2.0}, {-2.0, 2.0}};
    s.dt = 0.025;
    s.horizon = 100;
  } else if (name == "van_der_pol") {
    const double mu = 0.2;
    s.dim = 2;
    s.rhs = [mu](std::span<const double> x, std::span<double> dx) {
      dx[0] = x[1];
      dx[1] = mu * (1.0 - x[0] * x[0]) * x[1] - x[0];
    };
    s.init_box = {{-4.0, 4.0}, {-4.0, 4.0}};
    s.dt = 0.01;
    s.horizon = 100;
  } else if (name == "lorenz") {
    const double sigma = 10.0, rho = 28.0, beta = 8.0 / 3.0;
    s.dim = 3;
    s.rhs = [sigma, rho, beta](std::span<const double> x, std::span<double> dx) {
      dx[0] = sigma * (x[1] - x[0]);
      dx[1] = x[0] * (rho - x[2]) - x[1];
      dx[2] = x[0] * x[1] - beta * x[2];
    };
    s.init_box = {{-10.0, 10.0}, {-10.0, 10.0}, {-10.0, 10.0}};
    s.dt = 0.01;
    s.horizon = 500;
  } else {
    throw std::invalid_argument("make_system: unknown system '" + name + "'");
  }
  return s;
}

namespace {

std::string state_to_string(std::span<const double> x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

std::vector<double> rk4_step(const VectorField& f, std::span<const double> x, double dt) {
  const std::size_t d = x.size();
  std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d), out(d);
  f(x, k1);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
  f(tmp, k2);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
  f(tmp, k3);
  for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + dt * k3[i];
  f(tmp, k4);
  for (std::size_t i = 0; i < d; ++i)
    out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  for (double v : out)
    if (!std::isfinite(v))
      throw std::runtime_error("rk4_step: non-finite state from " + state_to_string(x));
  return out;
}

Trajectory simulate(const OdeSystem& sys, std::span<const double> x0) {
  if (x0.size() != sys.dim) throw std::invalid_argument("simulate: initial state has wrong dim");
  Trajectory traj;
  traj.dt = sys.dt;
  traj.states.reserve(sys.horizon);
  traj.states.emplace_back(x0.begin(), x0.end());
  for (std::size_t t = 1; t < sys.horizon; ++t)
    traj.states.push_back(rk4_step(sys.rhs, traj.states.back(), sys.dt));
  return traj;
}

Dataset generate_dataset(const OdeSystem& sys, std::size_t n_traj, std::uint64_t seed) {
  if (n_traj == 0) throw std::invalid_argument("generate_dataset: n_traj must be positive");
  Dataset ds;
  ds.system = sys.name;
  ds.t0 = sys.horizon / 5;
  ds.dt = sys.dt;
  std::mt19937_64 gen(rng::derive(seed, "initial_conditions"));
  std::vector<double> x0(sys.dim);
  for (std::size_t k = 0; k < n_traj; ++k) {
    for (std::size_t i = 0; i < sys.dim; ++i)
      x0[i] = rng::uniform(gen, sys.init_box[i].first, sys.init_box[i].second);
    ds.trajectories.push_back(simulate(sys, x0));
  }
  const std::size_t n_train = (n_traj * 4) / 5;
  for (std::size_t split = 0; split < 5; ++split) {
    std::mt19937_64 sgen(rng::derive(seed, "split", split));
    std::vector<std::size_t> idx(n_traj);
    for (std::size_t i = 0; i < n_traj; ++i) idx[i] = i;
    for (std::size_t i = n_traj - 1; i > 0; --i) {
      const std::size_t j =
          static_cast<std::size_t>(rng::uniform01(sgen) * static_cast<double>(i + 1));
      std::swap(idx[i], idx[j > i ? i : j]);
    }
    Split sp;
    sp.train.assign(idx.begin(), idx.begin() + n_train);
    sp.test.assign(idx.begin() + n_train, idx.end());
    ds.splits.push_back(std::move(sp));
  }
  return ds;
}

Trajectory load_csv(const std::string& path, double dt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");
  Trajectory traj;
  traj.dt = dt;
  std::string line;
  std::size_t row = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> state;
    std::size_t pos = 0;
    bool parse_ok = true;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      std::size_t b = pos, e = comma;
      while (b < e && (line[b] == ' ' || line[b] == '\t' || line[b] == '\r')) ++b;
      while (e > b && (line[e - 1] == ' ' || line[e - 1] == '\t' || line[e - 1] == '\r')) --e;
      double v = 0.0;
      const auto res = std::from_chars(line.data() + b, line.data() + e, v);
      if (res.ec != std::errc() || res.ptr != line.data() + e) {
        parse_ok = false;
        break;
      }
      state.push_back(v);
      pos = comma + 1;
      if (comma == line.size()) break;
    }
    if (!parse_ok) {
      if (header_allowed) {  // a single leading header line is tolerated
        header_allowed = false;
        continue;
      }
      throw std::runtime_error("load_csv: non-numeric field at row " + std::to_string(row) +
                               " of '" + path + "'");
    }
    header_allowed = false;
    if (!traj.states.empty() && state.size() != traj.states.front().size())
      throw std::runtime_error("load_csv: ragged row at row " + std::to_string(row) + " of '" +
                               path + "'");
    traj.states.push_back(std::move(state));
  }
  if (traj.states.size() < 2)
    throw std::runtime_error("load_csv: need at least 2 states in '" + path + "'");
  return traj;
}

void save_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open '" + path + "' for writing");
  char buf[32];
  for (const std::vector<double>& s : traj.states) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", s[i]);
      if (i) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_csv: write failed for '" + path + "'");
}

}  // namespace coloke::dyn
