#include "coloke/learners.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>
#include <utility>

#include "coloke/autodiff.hpp"
#include "coloke/nn.hpp"
#include "coloke/rng.hpp"

namespace coloke::learn {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sq_error(std::span<const double> pred, std::span<const double> x) {
  if (pred.size() != x.size())
    throw std::invalid_argument("step: prediction and state dimensions differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = pred[i] - x[i];
    acc += diff * diff;
  }
  return acc;
}

void require_prefix(const std::vector<std::vector<double>>& prefix, std::size_t min_len,
                    const char* what) {
  if (prefix.size() < min_len)
    throw std::invalid_argument(std::string("init: prefix too short for ") + what);
  for (const std::vector<double>& x : prefix)
    if (x.size() != prefix.front().size())
      throw std::invalid_argument("init: prefix states have inconsistent dimensions");
}

// Every length-(w+1) window of the prefix, oldest first.
std::vector<koop::Buffer> prefix_windows(const std::vector<std::vector<double>>& prefix,
                                         std::size_t w) {
  std::vector<koop::Buffer> windows;
  for (std::size_t end = w; end < prefix.size(); ++end) {
    koop::Buffer win(w);
    for (std::size_t i = end - w; i <= end; ++i) win.push(prefix[i]);
    windows.push_back(std::move(win));
  }
  return windows;
}

// ---------------------------------------------------------------------------
// Gradient learners sharing the lifted model (identity block + feature net).
// ---------------------------------------------------------------------------

class LiftedGradientLearner : public Learner {
 public:
  LiftedGradientLearner(LearnerConfig cfg, std::string name)
      : cfg_(std::move(cfg)), name_(std::move(name)), buffer_(cfg_.w) {}

  const std::string& name() const override { return name_; }

  void init(const std::vector<std::vector<double>>& prefix) override {
    require_prefix(prefix, cfg_.w + 1, "one warm window (need at least w+1 states)");
    model_ = koop::make_lifted_model(prefix.front().size(), cfg_.w, cfg_.hidden, cfg_.seed);
    opt_ = fresh_optimizer();
    const std::vector<koop::Buffer> windows = prefix_windows(prefix, cfg_.w);
    std::vector<int> roots;
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      tape_.reset(&model_.params);
      roots.clear();
      for (const koop::Buffer& win : windows)
        roots.push_back(koop::multistep_loss_node(tape_, model_, win));
      const ad::ParamVector grad = tape_.backward(tape_.sum(roots));
      nn::adamw_step(model_.params, grad, opt_);
    }
    // The same optimizer continues into the streaming phase: its accumulated
    // second moments keep online steps scaled to the gradient history, so the
    // first triggers refine the initialized model instead of jolting it.
    buffer_ = windows.back();
    initialized_ = true;
    steps_ = 0;
    post_init(windows);
  }

  void start_trajectory() override { buffer_.reset(); }

  void warm(std::span<const double> x) override {
    require_init();
    buffer_.push(x);
  }

  bool ready() const override { return initialized_ && buffer_.warm(); }

  std::vector<double> predict(std::span<const double> x) const override {
    require_init();
    return koop::predict_next(model_, x);
  }

  linalg::Matrix koopman() const override {
    require_init();
    return koop::koopman_matrix(model_);
  }

  const koop::LiftedModel* lifted_model() const override {
    return initialized_ ? &model_ : nullptr;
  }

 protected:
  virtual void post_init(const std::vector<koop::Buffer>& windows) { (void)windows; }

  void require_init() const {
    if (!initialized_) throw std::runtime_error(name_ + ": learner not initialized");
  }

  nn::AdamWState fresh_optimizer() const {
    nn::AdamWConfig oc;
    oc.lr = cfg_.lr;
    oc.weight_decay = cfg_.weight_decay;
    return nn::AdamWState(model_.params.size(), oc);
  }

  // One AdamW step on the full multistep loss over the current buffer.
  double train_step_on_buffer() {
    const double loss = koop::multistep_loss_gradient(tape_, model_, buffer_, grad_);
    nn::adamw_step(model_.params, grad_, opt_);
    return loss;
  }

  // Records the pre-update one-step error and slides the buffer.
  StepStats begin_step(std::span<const double> x) {
    require_init();
    StepStats st;
    st.t = steps_++;
    st.score = kNaN;
    st.threshold = kNaN;
    st.online_sq_error = kNaN;
    if (buffer_.size() > 0)
      st.online_sq_error = sq_error(koop::predict_next(model_, buffer_.newest()), x);
    buffer_.push(x);
    return st;
  }

  LearnerConfig cfg_;
  std::string name_;
  koop::LiftedModel model_;
  nn::AdamWState opt_;
  koop::Buffer buffer_;
  ad::Tape tape_;
  ad::ParamVector grad_;
  bool initialized_ = false;
  std::size_t steps_ = 0;
};

class ColokeLearner final : public LiftedGradientLearner {
 public:
  explicit ColokeLearner(LearnerConfig cfg) : LiftedGradientLearner(std::move(cfg), "coloke") {}

  const conf::ConformalController* controller() const override {
    return initialized_ ? &ctrl_ : nullptr;
  }

  // A trajectory boundary resets the rolling window, so the controller is
  // re-seated on the trailing calibration set: the threshold restarts at the
  // level the model currently achieves across recent data. Model parameters,
  // optimizer moments, and the score history all persist, so the bar carries
  // the accumulated confidence forward instead of relaxing to whatever the
  // unseen trajectory happens to look like.
  void start_trajectory() override {
    LiftedGradientLearner::start_trajectory();
    reseat_controller();
  }

  StepStats step(std::span<const double> x) override {
    StepStats st = begin_step(x);
    if (!buffer_.warm()) return st;
    double s = koop::conformity_score(model_, buffer_);
    const double q_used = ctrl_.q;  // the decision threshold q_t
    const bool e = conf::should_update(ctrl_, s);
    conf::pi_update(ctrl_, e);  // q_{t+1} moves once, from the arrival score
    observe_score(s);
    // The threshold tracks a quantile of the conformity scores, which are
    // nonnegative; if the integral term drives the estimate out of the score
    // support, it has lost track of its estimand, so it is recalibrated from
    // the most recent scores. This also rescales both controller gains to the
    // current score level, which can sit orders of magnitude below the level
    // at the last calibration once the model has adapted to the trajectory.
    if (ctrl_.q <= 0.0) reseat_controller();
    st.scored = true;
    st.score = s;
    st.threshold = q_used;
    st.e_t = e;
    while (s > q_used) {
      if (st.inner_iters >= cfg_.max_inner_iters) {
        st.cap_hit = true;
        break;
      }
      train_step_on_buffer();
      s = koop::conformity_score(model_, buffer_);
      ++st.inner_iters;
    }
    return st;
  }

 protected:
  void post_init(const std::vector<koop::Buffer>& windows) override {
    std::vector<double> scores;
    scores.reserve(windows.size());
    for (const koop::Buffer& win : windows)
      scores.push_back(koop::conformity_score(model_, win));
    ctrl_ = conf::make_controller(scores, cfg_.alpha, cfg_.gamma, cfg_.c_sat);
    seed_recent(scores);
  }

 private:
  // The sliding calibration set starts as the scores the threshold was first
  // calibrated on and then follows the stream, holding the same number of
  // entries so every re-seat matches the original calibration in sample size.
  void seed_recent(const std::vector<double>& scores) {
    recent_scores_.assign(scores.begin(), scores.end());
    calib_len_ = std::max<std::size_t>(scores.size(), 1);
  }

  void observe_score(double s) {
    recent_scores_.push_back(s);
    while (recent_scores_.size() > calib_len_) recent_scores_.pop_front();
  }

  void reseat_controller() {
    const std::vector<double> recent(recent_scores_.begin(), recent_scores_.end());
    if (recent.empty()) return;
    ctrl_ = conf::make_controller(recent, cfg_.alpha, cfg_.gamma, cfg_.c_sat);
  }

  conf::ConformalController ctrl_;
  std::deque<double> recent_scores_;
  std::size_t calib_len_ = 1;
};

class OlokeLearner final : public LiftedGradientLearner {
 public:
  explicit OlokeLearner(LearnerConfig cfg) : LiftedGradientLearner(std::move(cfg), "oloke") {}

  StepStats step(std::span<const double> x) override {
    StepStats st = begin_step(x);
    if (!buffer_.warm()) return st;
    st.scored = true;
    st.score = koop::conformity_score(model_, buffer_);  // recorded, never acted on
    st.e_t = cfg_.n_iter > 0;
    for (int i = 0; i < cfg_.n_iter; ++i) train_step_on_buffer();
    st.inner_iters = cfg_.n_iter;
    return st;
  }
};

// ---------------------------------------------------------------------------
// Autoencoder learner: fully learned encoder/decoder around a linear K.
// ---------------------------------------------------------------------------

class OnlineAeLearner final : public Learner {
 public:
  explicit OnlineAeLearner(LearnerConfig cfg)
      : cfg_(std::move(cfg)), name_("onlineae"), buffer_(cfg_.w) {}

  const std::string& name() const override { return name_; }

  void init(const std::vector<std::vector<double>>& prefix) override {
    require_prefix(prefix, cfg_.w + 1, "one warm window (need at least w+1 states)");
    model_ = make_ae_model(prefix.front().size(), cfg_.hidden, cfg_.seed);
    opt_ = fresh_optimizer();
    const std::vector<koop::Buffer> windows = prefix_windows(prefix, cfg_.w);
    std::vector<int> roots;
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      tape_.reset(&model_.params);
      roots.clear();
      for (const koop::Buffer& win : windows) roots.push_back(ae_loss_node(tape_, model_, win));
      const ad::ParamVector grad = tape_.backward(tape_.sum(roots));
      nn::adamw_step(model_.params, grad, opt_);
    }
    buffer_ = windows.back();
    initialized_ = true;
    steps_ = 0;
  }

  void start_trajectory() override { buffer_.reset(); }

  void warm(std::span<const double> x) override {
    require_init();
    buffer_.push(x);
  }

  bool ready() const override { return initialized_ && buffer_.warm(); }

  StepStats step(std::span<const double> x) override {
    require_init();
    StepStats st;
    st.t = steps_++;
    st.score = kNaN;
    st.threshold = kNaN;
    st.online_sq_error = kNaN;
    if (buffer_.size() > 0) st.online_sq_error = sq_error(ae_predict(model_, buffer_.newest()), x);
    buffer_.push(x);
    if (!buffer_.warm()) return st;
    st.scored = true;
    st.e_t = cfg_.n_iter > 0;
    for (int i = 0; i < cfg_.n_iter; ++i) {
      tape_.reset(&model_.params);
      const ad::ParamVector grad = tape_.backward(ae_loss_node(tape_, model_, buffer_));
      nn::adamw_step(model_.params, grad, opt_);
    }
    st.inner_iters = cfg_.n_iter;
    return st;
  }

  std::vector<double> predict(std::span<const double> x) const override {
    require_init();
    return ae_predict(model_, x);
  }

  linalg::Matrix koopman() const override {
    require_init();
    return ae_koopman(model_);
  }

 private:
  void require_init() const {
    if (!initialized_) throw std::runtime_error(name_ + ": learner not initialized");
  }

  nn::AdamWState fresh_optimizer() const {
    nn::AdamWConfig oc;
    oc.lr = cfg_.lr;
    oc.weight_decay = cfg_.weight_decay;
    return nn::AdamWState(model_.params.size(), oc);
  }

  LearnerConfig cfg_;
  std::string name_;
  AeModel model_;
  nn::AdamWState opt_;
  koop::Buffer buffer_;
  ad::Tape tape_;
  bool initialized_ = false;
  std::size_t steps_ = 0;
};

// ---------------------------------------------------------------------------
// Recursive least-squares learners.
// ---------------------------------------------------------------------------

class OdmdLearner final : public Learner {
 public:
  explicit OdmdLearner(LearnerConfig cfg) : cfg_(std::move(cfg)), name_("odmd") {}

  const std::string& name() const override { return name_; }

  void init(const std::vector<std::vector<double>>& prefix) override {
    const std::size_t d = prefix.empty() ? 0 : prefix.front().size();
    require_prefix(prefix, d + 1, "a full-rank least-squares fit (need at least d+1 states)");
    Q_ = linalg::Matrix(d, d);
    linalg::Matrix xxt(d, d);
    for (std::size_t i = 1; i < prefix.size(); ++i) {
      Q_ += linalg::outer(prefix[i], prefix[i - 1]);
      xxt += linalg::outer(prefix[i - 1], prefix[i - 1]);
    }
    P_ = linalg::inverse(xxt);
    K_ = Q_ * P_;
    prev_ = prefix.back();
    have_prev_ = true;
    initialized_ = true;
    steps_ = 0;
  }

  void start_trajectory() override { have_prev_ = false; }

  void warm(std::span<const double> x) override {
    require_init();
    prev_.assign(x.begin(), x.end());
    have_prev_ = true;
  }

  bool ready() const override { return initialized_ && have_prev_; }

  StepStats step(std::span<const double> x) override {
    require_init();
    StepStats st;
    st.t = steps_++;
    st.score = kNaN;
    st.threshold = kNaN;
    st.online_sq_error = kNaN;
    if (!have_prev_) {
      prev_.assign(x.begin(), x.end());
      have_prev_ = true;
      return st;
    }
    st.online_sq_error = sq_error(K_.apply(prev_), x);
    st.scored = true;
    st.e_t = true;
    Q_ += linalg::outer(x, prev_);
    P_ = linalg::sherman_morrison_update(P_, prev_);
    K_ = Q_ * P_;
    prev_.assign(x.begin(), x.end());
    return st;
  }

  std::vector<double> predict(std::span<const double> x) const override {
    require_init();
    return K_.apply(x);
  }

  linalg::Matrix koopman() const override {
    require_init();
    return K_;
  }

 private:
  void require_init() const {
    if (!initialized_) throw std::runtime_error(name_ + ": learner not initialized");
  }

  LearnerConfig cfg_;
  std::string name_;
  linalg::Matrix Q_, P_, K_;
  std::vector<double> prev_;
  bool have_prev_ = false;
  bool initialized_ = false;
  std::size_t steps_ = 0;
};

class OedmdLearner final : public Learner {
 public:
  explicit OedmdLearner(LearnerConfig cfg)
      : cfg_(std::move(cfg)), name_("oedmd"), buffer_(cfg_.w) {}

  const std::string& name() const override { return name_; }

  void init(const std::vector<std::vector<double>>& prefix) override {
    const std::size_t d = prefix.empty() ? 0 : prefix.front().size();
    r_ = poly_dict_size(d, cfg_.degree);
    require_prefix(prefix, r_ + 1, "a full-rank dictionary fit (need at least r+1 states)");
    std::vector<std::vector<double>> feats(prefix.size());
    for (std::size_t i = 0; i < prefix.size(); ++i) feats[i] = poly_dict(prefix[i], cfg_.degree);
    Q_ = linalg::Matrix(r_, r_);
    linalg::Matrix ppt(r_, r_);
    for (std::size_t i = 1; i < feats.size(); ++i) {
      Q_ += linalg::outer(feats[i], feats[i - 1]);
      ppt += linalg::outer(feats[i - 1], feats[i - 1]);
    }
    P_ = linalg::inverse(ppt);
    K_ = Q_ * P_;
    buffer_.reset();
    for (const std::vector<double>& x : prefix) buffer_.push(x);  // keeps the last w+1
    refit_reconstruction();
    prev_ = prefix.back();
    have_prev_ = true;
    initialized_ = true;
    steps_ = 0;
  }

  void start_trajectory() override {
    buffer_.reset();
    have_prev_ = false;
  }

  void warm(std::span<const double> x) override {
    require_init();
    buffer_.push(x);
    prev_.assign(x.begin(), x.end());
    have_prev_ = true;
  }

  bool ready() const override { return initialized_ && have_prev_; }

  StepStats step(std::span<const double> x) override {
    require_init();
    StepStats st;
    st.t = steps_++;
    st.score = kNaN;
    st.threshold = kNaN;
    st.online_sq_error = kNaN;
    buffer_.push(x);
    if (!have_prev_) {
      prev_.assign(x.begin(), x.end());
      have_prev_ = true;
      return st;
    }
    st.online_sq_error = sq_error(predict(prev_), x);
    st.scored = true;
    st.e_t = true;
    const std::vector<double> phi_prev = poly_dict(prev_, cfg_.degree);
    Q_ += linalg::outer(poly_dict(x, cfg_.degree), phi_prev);
    P_ = linalg::sherman_morrison_update(P_, phi_prev);
    K_ = Q_ * P_;
    if (buffer_.warm()) refit_reconstruction();
    prev_.assign(x.begin(), x.end());
    return st;
  }

  std::vector<double> predict(std::span<const double> x) const override {
    require_init();
    return C_.apply(K_.apply(poly_dict(x, cfg_.degree)));
  }

  linalg::Matrix koopman() const override {
    require_init();
    return K_;
  }

 private:
  void require_init() const {
    if (!initialized_) throw std::runtime_error(name_ + ": learner not initialized");
  }

  void refit_reconstruction() {
    const std::size_t n = buffer_.size();
    const std::size_t d = buffer_.at(0).size();
    linalg::Matrix Z(d, n);
    linalg::Matrix Phi(r_, n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::vector<double>& x = buffer_.at(k);
      const std::vector<double> phi = poly_dict(x, cfg_.degree);
      for (std::size_t i = 0; i < d; ++i) Z(i, k) = x[i];
      for (std::size_t i = 0; i < r_; ++i) Phi(i, k) = phi[i];
    }
    C_ = linalg::ridge_reconstruction(Z, Phi, cfg_.rho);
  }

  LearnerConfig cfg_;
  std::string name_;
  std::size_t r_ = 0;
  linalg::Matrix Q_, P_, K_, C_;
  koop::Buffer buffer_;
  std::vector<double> prev_;
  bool have_prev_ = false;
  bool initialized_ = false;
  std::size_t steps_ = 0;
};

}  // namespace

AeModel make_ae_model(std::size_t d, const std::vector<std::size_t>& hidden,
                      std::uint64_t seed) {
  if (d == 0) throw std::invalid_argument("make_ae_model: d must be positive");
  AeModel model;
  model.d = d;
  model.m = koop::default_lift_dim(d);
  model.enc_spec.widths.push_back(d);
  for (std::size_t h : hidden) model.enc_spec.widths.push_back(h);
  model.enc_spec.widths.push_back(model.m);
  model.dec_spec.widths.push_back(model.m);
  for (auto it = hidden.rbegin(); it != hidden.rend(); ++it)
    model.dec_spec.widths.push_back(*it);
  model.dec_spec.widths.push_back(d);
  model.enc_first = nn::append_mlp_blocks(model.params, model.enc_spec);
  model.dec_first = nn::append_mlp_blocks(model.params, model.dec_spec);
  model.k_block = model.params.add_block(model.m, model.m);
  nn::init_mlp_params(model.params, model.enc_spec, model.enc_first,
                      rng::derive(seed, "encoder"));
  nn::init_mlp_params(model.params, model.dec_spec, model.dec_first,
                      rng::derive(seed, "decoder"));
  const ad::ParamVector::Block& kb = model.params.blocks[model.k_block];
  for (std::size_t i = 0; i < model.m; ++i)
    model.params.values[kb.offset + i * model.m + i] = 1.0;
  return model;
}

linalg::Matrix ae_koopman(const AeModel& model) {
  const ad::ParamVector::Block& kb = model.params.blocks.at(model.k_block);
  linalg::Matrix K(model.m, model.m);
  for (std::size_t i = 0; i < model.m * model.m; ++i)
    K.data()[i] = model.params.values[kb.offset + i];
  return K;
}

std::vector<double> ae_predict(const AeModel& model, std::span<const double> x) {
  const std::vector<double> z = nn::mlp_eval(model.params, model.enc_spec, model.enc_first, x);
  const std::vector<double> kz = ae_koopman(model).apply(z);
  return nn::mlp_eval(model.params, model.dec_spec, model.dec_first, kz);
}

int ae_loss_node(ad::Tape& tape, const AeModel& model, const koop::Buffer& buffer) {
  if (!buffer.warm()) throw std::invalid_argument("ae loss: buffer is not warm");
  const std::size_t w = buffer.w();
  const std::vector<int> enc_nodes = nn::bind_mlp(tape, model.enc_spec, model.enc_first);
  const std::vector<int> dec_nodes = nn::bind_mlp(tape, model.dec_spec, model.dec_first);
  const int K = tape.param_view(model.k_block);
  std::vector<int> xs(w + 1), zs(w + 1);
  for (std::size_t i = 0; i <= w; ++i) {
    xs[i] = tape.constant(buffer.at(i));
    zs[i] = nn::mlp_forward(tape, model.enc_spec, enc_nodes, xs[i]);
  }
  // The oldest state has no predecessor in the buffer, so it contributes only
  // its autoencoding term; every later state adds prediction and
  // lifted-prediction consistency against its predecessor.
  std::vector<int> terms;
  terms.reserve(3 * w + 1);
  terms.push_back(
      tape.sqnorm(tape.sub(nn::mlp_forward(tape, model.dec_spec, dec_nodes, zs[0]), xs[0])));
  for (std::size_t k = 1; k <= w; ++k) {
    const int kz = tape.matvec(K, zs[k - 1]);
    terms.push_back(
        tape.sqnorm(tape.sub(nn::mlp_forward(tape, model.dec_spec, dec_nodes, kz), xs[k])));
    terms.push_back(
        tape.sqnorm(tape.sub(nn::mlp_forward(tape, model.dec_spec, dec_nodes, zs[k]), xs[k])));
    terms.push_back(tape.sqnorm(tape.sub(kz, zs[k])));
  }
  return tape.sum(terms);
}

std::size_t poly_dict_size(std::size_t d, int degree) {
  if (degree == 1) return 1 + d;
  if (degree == 2) return 1 + d + d * (d + 1) / 2;
  throw std::invalid_argument("poly_dict: degree must be 1 or 2");
}

std::vector<double> poly_dict(std::span<const double> x, int degree) {
  std::vector<double> phi;
  phi.reserve(poly_dict_size(x.size(), degree));
  phi.push_back(1.0);
  for (double xi : x) phi.push_back(xi);
  if (degree == 2)
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i; j < x.size(); ++j) phi.push_back(x[i] * x[j]);
  return phi;
}

std::unique_ptr<Learner> make_learner(const LearnerConfig& config) {
  if (config.name == "coloke") return std::make_unique<ColokeLearner>(config);
  if (config.name == "oloke") return std::make_unique<OlokeLearner>(config);
  if (config.name == "onlineae") return std::make_unique<OnlineAeLearner>(config);
  if (config.name == "odmd") return std::make_unique<OdmdLearner>(config);
  if (config.name == "oedmd") return std::make_unique<OedmdLearner>(config);
  throw std::invalid_argument("make_learner: unknown learner '" + config.name + "'");
}

}  // namespace coloke::learn
