#include "coloke/koopman.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace coloke::koop {

std::size_t default_lift_dim(std::size_t d) { return d + (d + 1) / 2; }

LiftedModel make_lifted_model(std::size_t d, std::size_t w,
                              const std::vector<std::size_t>& hidden, std::uint64_t seed) {
  if (d == 0) throw std::invalid_argument("make_lifted_model: d must be positive");
  if (w == 0) throw std::invalid_argument("make_lifted_model: w must be positive");
  LiftedModel model;
  model.d = d;
  model.m = default_lift_dim(d);
  model.w = w;
  model.seed = seed;
  model.spec.widths.push_back(d);
  for (std::size_t h : hidden) model.spec.widths.push_back(h);
  model.spec.widths.push_back(model.m - d);
  model.first_block = nn::append_mlp_blocks(model.params, model.spec);
  nn::init_mlp_params(model.params, model.spec, model.first_block, seed);
  model.k_block = model.params.add_block(model.m, model.m);
  const ad::ParamVector::Block& kb = model.params.blocks[model.k_block];
  for (std::size_t i = 0; i < model.m; ++i)
    model.params.values[kb.offset + i * model.m + i] = 1.0;
  return model;
}

linalg::Matrix koopman_matrix(const LiftedModel& model) {
  const ad::ParamVector::Block& kb = model.params.blocks.at(model.k_block);
  linalg::Matrix K(model.m, model.m);
  for (std::size_t i = 0; i < model.m * model.m; ++i)
    K.data()[i] = model.params.values[kb.offset + i];
  return K;
}

void set_koopman_matrix(LiftedModel& model, const linalg::Matrix& K) {
  if (K.rows() != model.m || K.cols() != model.m)
    throw std::invalid_argument("set_koopman_matrix: shape mismatch");
  const ad::ParamVector::Block& kb = model.params.blocks.at(model.k_block);
  for (std::size_t i = 0; i < model.m * model.m; ++i)
    model.params.values[kb.offset + i] = K.data()[i];
}

std::vector<double> lift(const LiftedModel& model, std::span<const double> x) {
  if (x.size() != model.d) throw std::invalid_argument("lift: state has wrong dimension");
  std::vector<double> z(x.begin(), x.end());
  const std::vector<double> g = nn::mlp_eval(model.params, model.spec, model.first_block, x);
  z.insert(z.end(), g.begin(), g.end());
  return z;
}

void Buffer::push(std::span<const double> x) {
  if (window_.size() == w_ + 1) window_.pop_front();
  window_.emplace_back(x.begin(), x.end());
}

namespace {

// Lifts every window state and precomputes K^j applied to each lifted state.
// chains[b][j-1] = K^j Phi(x_b), for j = 1..w-b.
struct LossWorkspace {
  std::vector<std::vector<double>> lifted;
  std::vector<std::vector<std::vector<double>>> chains;
};

LossWorkspace prepare(const LiftedModel& model, const Buffer& buffer) {
  if (!buffer.warm()) throw std::invalid_argument("multistep loss: buffer is not warm");
  const std::size_t w = buffer.w();
  LossWorkspace ws;
  ws.lifted.resize(w + 1);
  for (std::size_t i = 0; i <= w; ++i) ws.lifted[i] = lift(model, buffer.at(i));
  const linalg::Matrix K = koopman_matrix(model);
  ws.chains.resize(w);
  for (std::size_t b = 0; b < w; ++b) {
    std::vector<double> cur = ws.lifted[b];
    for (std::size_t j = 1; j <= w - b; ++j) {
      cur = K.apply(cur);
      ws.chains[b].push_back(cur);
    }
  }
  return ws;
}

double sq_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// ell(s, tau) = sum_{j=1..tau} || Phi(x_{s+tau}) - K^j Phi(x_{s+tau-j}) ||^2
double ell_term(const LossWorkspace& ws, std::size_t s, std::size_t tau) {
  double acc = 0.0;
  for (std::size_t j = 1; j <= tau; ++j)
    acc += sq_diff(ws.lifted[s + tau], ws.chains[s + tau - j][j - 1]);
  return acc;
}

}  // namespace

double multistep_loss(const LiftedModel& model, const Buffer& buffer) {
  const LossWorkspace ws = prepare(model, buffer);
  const std::size_t w = buffer.w();
  double loss = 0.0;
  for (std::size_t s = 0; s < w; ++s)
    for (std::size_t tau = 1; tau <= w - s; ++tau) loss += ell_term(ws, s, tau);
  return loss;
}

double conformity_score(const LiftedModel& model, const Buffer& buffer) {
  const LossWorkspace ws = prepare(model, buffer);
  return ell_term(ws, 0, buffer.w());
}

int multistep_loss_node(ad::Tape& tape, const LiftedModel& model, const Buffer& buffer) {
  if (!buffer.warm()) throw std::invalid_argument("multistep loss: buffer is not warm");
  const std::size_t w = buffer.w();
  const std::vector<int> mlp_nodes = nn::bind_mlp(tape, model.spec, model.first_block);
  const int K = tape.param_view(model.k_block);

  std::vector<int> lifted(w + 1);
  for (std::size_t i = 0; i <= w; ++i) {
    const int x = tape.constant(buffer.at(i));
    const int g = nn::mlp_forward(tape, model.spec, mlp_nodes, x);
    lifted[i] = tape.concat(x, g);
  }
  std::vector<std::vector<int>> chains(w);
  for (std::size_t b = 0; b < w; ++b) {
    int cur = lifted[b];
    for (std::size_t j = 1; j <= w - b; ++j) {
      cur = tape.matvec(K, cur);
      chains[b].push_back(cur);
    }
  }
  std::vector<int> terms;
  terms.reserve(w * (w + 1) * (w + 2) / 6);
  for (std::size_t s = 0; s < w; ++s)
    for (std::size_t tau = 1; tau <= w - s; ++tau)
      for (std::size_t j = 1; j <= tau; ++j)
        terms.push_back(tape.sqnorm(tape.sub(lifted[s + tau], chains[s + tau - j][j - 1])));
  return tape.sum(terms);
}

double multistep_loss_gradient(ad::Tape& tape, const LiftedModel& model, const Buffer& buffer,
                               ad::ParamVector& grad_out) {
  tape.reset(&model.params);
  const int root = multistep_loss_node(tape, model, buffer);
  grad_out = tape.backward(root);
  return tape.scalar_value(root);
}

std::vector<double> predict_next(const LiftedModel& model, std::span<const double> x) {
  const std::vector<double> z = lift(model, x);
  const linalg::Matrix K = koopman_matrix(model);
  const std::vector<double> zn = K.apply(z);
  return std::vector<double>(zn.begin(), zn.begin() + model.d);
}

std::vector<std::complex<double>> spectrum(const linalg::Matrix& K, double dt,
                                           std::size_t* dropped) {
  if (dt <= 0.0) throw std::invalid_argument("spectrum: dt must be positive");
  const linalg::EigenDecomposition ed = linalg::eig(K);
  std::vector<std::complex<double>> out;
  std::size_t skipped = 0;
  for (const std::complex<double>& lam : ed.eigenvalues) {
    if (std::abs(lam) <= 1e-12) {
      ++skipped;
      continue;
    }
    out.push_back(std::log(lam) / dt);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const std::complex<double>& a, const std::complex<double>& b) {
                     if (a.real() != b.real()) return a.real() > b.real();
                     return a.imag() > b.imag();
                   });
  if (dropped != nullptr) *dropped = skipped;
  return out;
}

EigenfunctionEval eigenfunction_eval(const LiftedModel& model,
                                     const std::vector<std::vector<double>>& grid, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("eigenfunction_eval: dt must be positive");
  const linalg::Matrix K = koopman_matrix(model);
  const linalg::EigenDecomposition ed = linalg::eig(K);
  if (ed.is_defective)
    throw std::runtime_error("eigenfunction_eval: K is defective, eigenvectors unreliable");

  std::vector<std::vector<double>> lifted(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) lifted[g] = lift(model, grid[g]);

  EigenfunctionEval out;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < ed.eigenvalues.size(); ++i) {
    if (std::abs(ed.eigenvalues[i]) <= 1e-12) continue;
    order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const std::complex<double> la = std::log(ed.eigenvalues[a]) / dt;
    const std::complex<double> lb = std::log(ed.eigenvalues[b]) / dt;
    if (la.real() != lb.real()) return la.real() > lb.real();
    return la.imag() > lb.imag();
  });
  for (std::size_t i : order) {
    out.eigenvalues.push_back(std::log(ed.eigenvalues[i]) / dt);
    std::vector<std::complex<double>> vals(grid.size());
    const std::vector<std::complex<double>>& wvec = ed.left_eigenvectors[i];
    for (std::size_t g = 0; g < grid.size(); ++g) {
      std::complex<double> acc(0.0);
      for (std::size_t k = 0; k < model.m; ++k) acc += std::conj(wvec[k]) * lifted[g][k];
      vals[g] = acc;
    }
    out.values.push_back(std::move(vals));
  }
  return out;
}

void save_model(const LiftedModel& model, const std::string& path) {
  nlohmann::json j;
  j["spec"] = {{"widths", model.spec.widths}};
  j["d"] = model.d;
  j["m"] = model.m;
  j["w"] = model.w;
  j["seed"] = model.seed;
  const std::size_t mlp_n = nn::mlp_param_count(model.spec);
  const ad::ParamVector::Block& kb = model.params.blocks.at(model.k_block);
  std::vector<double> theta(model.params.values.begin(), model.params.values.begin() + mlp_n);
  std::vector<double> K(model.params.values.begin() + kb.offset,
                        model.params.values.begin() + kb.offset + model.m * model.m);
  j["params"] = theta;
  j["K"] = K;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("save_model: write failed for '" + path + "'");
}

LiftedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_model: invalid JSON in '" + path + "': " + e.what());
  }
  for (const char* field : {"spec", "d", "m", "w", "seed", "params", "K"})
    if (!j.contains(field))
      throw std::runtime_error("load_model: missing field '" + std::string(field) + "'");
  if (!j["spec"].contains("widths"))
    throw std::runtime_error("load_model: missing field 'spec.widths'");

  LiftedModel model;
  model.spec.widths = j["spec"]["widths"].get<std::vector<std::size_t>>();
  model.d = j["d"].get<std::size_t>();
  model.m = j["m"].get<std::size_t>();
  model.w = j["w"].get<std::size_t>();
  model.seed = j["seed"].get<std::uint64_t>();
  if (model.spec.widths.size() < 2 || model.spec.widths.front() != model.d ||
      model.spec.widths.back() != model.m - model.d)
    throw std::runtime_error("load_model: field 'spec.widths' inconsistent with d and m");
  model.first_block = nn::append_mlp_blocks(model.params, model.spec);
  model.k_block = model.params.add_block(model.m, model.m);

  const std::vector<double> theta = j["params"].get<std::vector<double>>();
  const std::vector<double> K = j["K"].get<std::vector<double>>();
  if (theta.size() != nn::mlp_param_count(model.spec))
    throw std::runtime_error("load_model: field 'params' has wrong length");
  if (K.size() != model.m * model.m)
    throw std::runtime_error("load_model: field 'K' has wrong length");
  for (std::size_t i = 0; i < theta.size(); ++i) model.params.values[i] = theta[i];
  const ad::ParamVector::Block& kb = model.params.blocks.at(model.k_block);
  for (std::size_t i = 0; i < K.size(); ++i) model.params.values[kb.offset + i] = K[i];
  return model;
}

}  // namespace coloke::koop
