#pragma once

#include <complex>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "coloke/autodiff.hpp"
#include "coloke/linalg.hpp"
#include "coloke/nn.hpp"

namespace coloke::koop {

// Observables Phi(x) = [x, g(x)]: the state itself plus learned features
// from a tanh network, advanced linearly by a square matrix K.
struct LiftedModel {
  nn::MlpSpec spec;       // {d, hidden..., m - d}
  ad::ParamVector params; // network blocks first, K block last
  std::size_t d = 0;
  std::size_t m = 0;
  std::size_t w = 0;      // training window length
  std::size_t first_block = 0;
  std::size_t k_block = 0;
  std::uint64_t seed = 0;
};

std::size_t default_lift_dim(std::size_t d);  // d + ceil(d/2)

LiftedModel make_lifted_model(std::size_t d, std::size_t w,
                              const std::vector<std::size_t>& hidden, std::uint64_t seed);

linalg::Matrix koopman_matrix(const LiftedModel& model);
void set_koopman_matrix(LiftedModel& model, const linalg::Matrix& K);

std::vector<double> lift(const LiftedModel& model, std::span<const double> x);

// Sliding window of the most recent w+1 states.
class Buffer {
 public:
  explicit Buffer(std::size_t w) : w_(w) {}
  std::size_t w() const { return w_; }
  std::size_t size() const { return window_.size(); }
  bool warm() const { return window_.size() == w_ + 1; }
  void push(std::span<const double> x);
  void reset() { window_.clear(); }
  const std::vector<double>& at(std::size_t i) const { return window_.at(i); }  // 0 = oldest
  const std::vector<double>& newest() const { return window_.back(); }

 private:
  std::size_t w_;
  std::deque<std::vector<double>> window_;
};

// Sum over window offsets s < s + tau <= w of the tau-step consistency
// terms sum_j ||Phi(x_{s+tau}) - K^j Phi(x_{s+tau-j})||^2.
double multistep_loss(const LiftedModel& model, const Buffer& buffer);

// The single window-spanning term of the loss above: s = 0, tau = w.
double conformity_score(const LiftedModel& model, const Buffer& buffer);

// Records the full loss on a tape; returns the scalar root node.
int multistep_loss_node(ad::Tape& tape, const LiftedModel& model, const Buffer& buffer);

// Convenience: loss value and gradient in one pass over a scratch tape.
double multistep_loss_gradient(ad::Tape& tape, const LiftedModel& model, const Buffer& buffer,
                               ad::ParamVector& grad_out);

// First d components of K Phi(x).
std::vector<double> predict_next(const LiftedModel& model, std::span<const double> x);

// Continuous-time spectrum log(lambda)/dt (principal branch), sorted by
// descending real part. Discrete eigenvalues with |lambda| <= 1e-12 are
// skipped; their count is reported through dropped (when non-null).
std::vector<std::complex<double>> spectrum(const linalg::Matrix& K, double dt,
                                           std::size_t* dropped = nullptr);

struct EigenfunctionEval {
  std::vector<std::complex<double>> eigenvalues;           // continuous time
  std::vector<std::vector<std::complex<double>>> values;   // [pair][grid point]
};

// Evaluates w_i^H Phi(x) on the given states. Throws if K is defective.
EigenfunctionEval eigenfunction_eval(const LiftedModel& model,
                                     const std::vector<std::vector<double>>& grid, double dt);

// JSON snapshot round-trip.
void save_model(const LiftedModel& model, const std::string& path);
LiftedModel load_model(const std::string& path);

}  // namespace coloke::koop
