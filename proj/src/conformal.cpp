#include "coloke/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace coloke::conf {

double init_threshold(std::span<const double> scores, double alpha) {
  if (scores.empty()) throw std::invalid_argument("init_threshold: empty score list");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("init_threshold: alpha must lie in (0,1)");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

double saturation(double err_sum, std::size_t t, double c_sat, double k_i) {
  const double tp1 = static_cast<double>(t) + 1.0;
  const double limit = std::numbers::pi / 2.0 - 1e-3;
  double arg = err_sum * std::log(tp1) / (c_sat * tp1);
  arg = std::clamp(arg, -limit, limit);
  return k_i * std::tan(arg);
}

ConformalController make_controller(std::span<const double> scores, double alpha, double gamma,
                                    double c_sat) {
  ConformalController ctrl;
  ctrl.alpha = alpha;
  ctrl.c_sat = c_sat;
  ctrl.q = init_threshold(scores, alpha);
  // Both gains are expressed in score units: a relative gain of 0.1 means each
  // miss moves q by 10% of the calibrated threshold, whatever the score scale.
  ctrl.k_i = ctrl.q;
  ctrl.gamma = gamma * std::abs(ctrl.q);
  return ctrl;
}

bool should_update(const ConformalController& ctrl, double score) { return score > ctrl.q; }

double pi_update(ConformalController& ctrl, bool e_t) {
  ctrl.t += 1;
  const double err = (e_t ? 1.0 : 0.0) - ctrl.alpha;
  ctrl.err_sum += err;
  const double q_next =
      ctrl.q + ctrl.gamma * err + saturation(ctrl.err_sum, ctrl.t, ctrl.c_sat, ctrl.k_i);
  if (!std::isfinite(q_next)) throw std::runtime_error("pi_update: threshold became non-finite");
  ctrl.q = q_next;
  return ctrl.q;
}

}  // namespace coloke::conf
