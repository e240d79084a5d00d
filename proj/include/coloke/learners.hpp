#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "coloke/autodiff.hpp"
#include "coloke/conformal.hpp"
#include "coloke/koopman.hpp"
#include "coloke/linalg.hpp"
#include "coloke/nn.hpp"

namespace coloke::learn {

// One CSV row of per-step diagnostics. Fields that a learner does not produce
// (e.g. score for ODMD) are NaN; `scored` is false until the rolling buffer is
// warm again after a trajectory boundary.
struct StepStats {
  std::size_t t = 0;         // step index within this learner's stream
  bool scored = false;       // rolling context was warm, so the step's policy ran
  double score = 0.0;        // conformity score on arrival (pre-update model)
  double threshold = 0.0;    // threshold the trigger decision compared against
  bool e_t = false;          // update trigger flag
  int inner_iters = 0;       // gradient iterations spent this step
  bool cap_hit = false;      // inner loop stopped by the iteration cap
  double online_sq_error = 0.0;  // ||x_t - predict(x_{t-1})||^2, pre-update model
};

struct LearnerConfig {
  std::string name;          // coloke | oloke | onlineae | odmd | oedmd
  double alpha = 0.5;        // miscoverage target
  double gamma = 0.1;        // threshold proportional gain
  double c_sat = 5.0;        // threshold saturation constant
  double lr = 1e-3;          // AdamW learning rate
  // No decay by default: the streaming phase must be able to drive window
  // losses arbitrarily close to zero, and decay both floors that descent and
  // erodes feature directions that current windows do not exercise.
  double weight_decay = 0.0;
  int n_iter = 100;          // fixed per-step iterations (oloke, onlineae)
  int epochs = 4000;         // initialization epochs (gradient learners)
  int max_inner_iters = 500; // coloke inner-loop cap
  double rho = 1e-6;         // oedmd ridge strength
  int degree = 2;            // oedmd dictionary degree
  std::vector<std::size_t> hidden = {32, 16, 8};  // feature-net hidden widths
  std::size_t w = 5;         // rolling window length (buffer holds w+1 states)
  std::uint64_t seed = 0;
};

// A streaming one-sample-at-a-time learner. Protocol: construct, call init()
// once with the first trajectory's prefix x_0..x_{t0-1}, then for each
// trajectory call start_trajectory(), warm() over its prefix, and step() over
// its remaining states. Model state persists across trajectories; rolling
// buffers do not.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual const std::string& name() const = 0;

  // Fits initial model state from the prefix and prepares the rolling buffer.
  virtual void init(const std::vector<std::vector<double>>& prefix) = 0;

  // Marks a trajectory boundary: clears rolling context, keeps the model.
  virtual void start_trajectory() = 0;

  // Feeds one state as context only; never changes the model.
  virtual void warm(std::span<const double> x) = 0;

  // True once enough context has accumulated for step() to score and update.
  virtual bool ready() const = 0;

  // Observes x_t: records the one-step prediction error of the pre-update
  // model, then updates per the learner's policy.
  virtual StepStats step(std::span<const double> x) = 0;

  // One-step-ahead prediction; pure (never mutates state).
  virtual std::vector<double> predict(std::span<const double> x) const = 0;

  // The linear operator currently carried by the learner.
  virtual linalg::Matrix koopman() const = 0;

  // Lifted model for learners that have one (coloke, oloke), else nullptr.
  virtual const koop::LiftedModel* lifted_model() const { return nullptr; }

  // Conformal controller for learners that have one (coloke), else nullptr.
  virtual const conf::ConformalController* controller() const { return nullptr; }
};

// Autoencoder dynamics model: fully learned encoder Phi and decoder Psi
// around a linear advance K, predicting Psi(K Phi(x)).
struct AeModel {
  nn::MlpSpec enc_spec, dec_spec;
  ad::ParamVector params;  // encoder blocks, decoder blocks, K block
  std::size_t enc_first = 0, dec_first = 0, k_block = 0;
  std::size_t d = 0, m = 0;
};

AeModel make_ae_model(std::size_t d, const std::vector<std::size_t>& hidden, std::uint64_t seed);

linalg::Matrix ae_koopman(const AeModel& model);
std::vector<double> ae_predict(const AeModel& model, std::span<const double> x);

// Buffer loss: autoencoding consistency of every state plus prediction and
// lifted-prediction consistency of every consecutive pair, recorded on the
// tape; returns the scalar root node.
int ae_loss_node(ad::Tape& tape, const AeModel& model, const koop::Buffer& buffer);

// All monomials of total degree <= degree in graded-lexicographic order,
// constant term first: (1, x_1..x_d, x_1^2, x_1 x_2, ..., x_d^2). Degrees 1
// and 2 are supported.
std::vector<double> poly_dict(std::span<const double> x, int degree);
std::size_t poly_dict_size(std::size_t d, int degree);

// Constructs a learner by config.name; throws std::invalid_argument on an
// unknown name.
std::unique_ptr<Learner> make_learner(const LearnerConfig& config);

}  // namespace coloke::learn
