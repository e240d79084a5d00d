#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coloke/autodiff.hpp"

namespace coloke::nn {

// Fully connected network: widths[0] inputs, widths.back() outputs, tanh on
// every layer except the last (which stays linear).
struct MlpSpec {
  std::vector<std::size_t> widths;
  std::size_t layer_count() const { return widths.size() - 1; }
  std::size_t in_dim() const { return widths.front(); }
  std::size_t out_dim() const { return widths.back(); }
};

std::size_t mlp_param_count(const MlpSpec& spec);

// Registers W/b blocks for each layer on `p` (in order W0, b0, W1, b1, ...)
// and returns the index of the first block added.
std::size_t append_mlp_blocks(ad::ParamVector& p, const MlpSpec& spec);

// Seeded uniform(-sqrt(6/(fan_in+fan_out)), +...) weights, zero biases.
void init_mlp_params(ad::ParamVector& p, const MlpSpec& spec, std::size_t first_block,
                     std::uint64_t seed);

// Records the forward pass on the tape; returns the output node.
// `param_nodes` must hold the 2*layer_count node ids (W0, b0, W1, b1, ...).
int mlp_forward(ad::Tape& tape, const MlpSpec& spec, std::span<const int> param_nodes,
                int x_node);

// Creates the param-view nodes for one tape.
std::vector<int> bind_mlp(ad::Tape& tape, const MlpSpec& spec, std::size_t first_block);

// Plain evaluation without a tape.
std::vector<double> mlp_eval(const ad::ParamVector& p, const MlpSpec& spec,
                             std::size_t first_block, std::span<const double> x);

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;  // decoupled
};

struct AdamWState {
  AdamWConfig config;
  std::vector<double> m, v;
  std::uint64_t step_count = 0;

  explicit AdamWState(std::size_t n = 0, AdamWConfig cfg = {})
      : config(cfg), m(n, 0.0), v(n, 0.0) {}
};

// One decoupled-weight-decay Adam step; throws on non-finite gradients.
void adamw_step(ad::ParamVector& params, const ad::ParamVector& grad, AdamWState& state);

}  // namespace coloke::nn
