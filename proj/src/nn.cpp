#include "coloke/nn.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace coloke::nn {

namespace {

// portable uniform in [0,1) from the top 53 bits of the generator output
double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace

std::size_t mlp_param_count(const MlpSpec& spec) {
  if (spec.widths.size() < 2) throw std::invalid_argument("MlpSpec: needs at least two widths");
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l)
    n += spec.widths[l + 1] * spec.widths[l] + spec.widths[l + 1];
  return n;
}

std::size_t append_mlp_blocks(ad::ParamVector& p, const MlpSpec& spec) {
  if (spec.widths.size() < 2) throw std::invalid_argument("MlpSpec: needs at least two widths");
  const std::size_t first = p.blocks.size();
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l) {
    p.add_block(spec.widths[l + 1], spec.widths[l]);  // W
    p.add_block(spec.widths[l + 1], 1);               // b
  }
  return first;
}

void init_mlp_params(ad::ParamVector& p, const MlpSpec& spec, std::size_t first_block,
                     std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l) {
    const ad::ParamVector::Block& wb = p.blocks.at(first_block + 2 * l);
    const double fan_in = static_cast<double>(spec.widths[l]);
    const double fan_out = static_cast<double>(spec.widths[l + 1]);
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t i = 0; i < wb.rows * wb.cols; ++i)
      p.values[wb.offset + i] = (2.0 * uniform01(gen) - 1.0) * bound;
    const ad::ParamVector::Block& bb = p.blocks.at(first_block + 2 * l + 1);
    for (std::size_t i = 0; i < bb.rows; ++i) p.values[bb.offset + i] = 0.0;
  }
}

std::vector<int> bind_mlp(ad::Tape& tape, const MlpSpec& spec, std::size_t first_block) {
  std::vector<int> nodes;
  nodes.reserve(2 * spec.layer_count());
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    nodes.push_back(tape.param_view(first_block + 2 * l));
    nodes.push_back(tape.param_view(first_block + 2 * l + 1));
  }
  return nodes;
}

int mlp_forward(ad::Tape& tape, const MlpSpec& spec, std::span<const int> param_nodes,
                int x_node) {
  if (param_nodes.size() != 2 * spec.layer_count())
    throw std::invalid_argument("mlp_forward: wrong number of parameter nodes");
  int h = x_node;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    h = tape.affine(param_nodes[2 * l], param_nodes[2 * l + 1], h);
    if (l + 1 < spec.layer_count()) h = tape.tanh(h);
  }
  return h;
}

std::vector<double> mlp_eval(const ad::ParamVector& p, const MlpSpec& spec,
                             std::size_t first_block, std::span<const double> x) {
  if (x.size() != spec.in_dim()) throw std::invalid_argument("mlp_eval: input length mismatch");
  std::vector<double> h(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const ad::ParamVector::Block& wb = p.blocks.at(first_block + 2 * l);
    const ad::ParamVector::Block& bb = p.blocks.at(first_block + 2 * l + 1);
    next.assign(wb.rows, 0.0);
    for (std::size_t i = 0; i < wb.rows; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < wb.cols; ++j) acc += p.values[wb.offset + i * wb.cols + j] * h[j];
      next[i] = acc + p.values[bb.offset + i];
    }
    if (l + 1 < spec.layer_count())
      for (double& v : next) v = std::tanh(v);
    h = next;
  }
  return h;
}

void adamw_step(ad::ParamVector& params, const ad::ParamVector& grad, AdamWState& state) {
  if (grad.values.size() != params.values.size())
    throw std::invalid_argument("adamw_step: gradient size mismatch");
  if (state.m.size() != params.values.size())
    throw std::invalid_argument("adamw_step: state size mismatch");
  for (double g : grad.values)
    if (!std::isfinite(g)) throw std::runtime_error("adamw_step: non-finite gradient");

  const AdamWConfig& c = state.config;
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.values.size(); ++i) {
    const double g = grad.values[i];
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params.values[i] -= c.lr * c.weight_decay * params.values[i];
    params.values[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
  }
}

}  // namespace coloke::nn
