#pragma once

#include <cstddef>
#include <span>

namespace coloke::conf {

// Proportional-integral threshold controller with a saturating integral term.
// The threshold q tracks the (1-alpha) quantile of a streaming score sequence:
//   q_{t+1} = q_t + gamma*(e_t - alpha) + r_t(sum_{i<=t}(e_i - alpha))
// where e_t = 1{s_t > q_t} and r_t is a clamped tangent integrator whose gain
// shrinks like log(t+1)/(t+1).
struct ConformalController {
  double q = 0.0;        // current threshold, in score units
  double alpha = 0.5;    // miscoverage target in (0,1)
  double gamma = 0.1;    // proportional gain
  double c_sat = 5.0;    // saturation constant
  double k_i = 0.0;      // integral gain, in score units
  double err_sum = 0.0;  // running sum of (e_i - alpha)
  std::size_t t = 0;     // number of observed errors so far
};

// The ceil((1-alpha)*n)-th order statistic of the scores (higher interpolation).
// Throws std::invalid_argument on an empty list or alpha outside (0,1).
double init_threshold(std::span<const double> scores, double alpha);

// r_t(x) = k_i * tan(clamp(x*log(t+1)/(c_sat*(t+1)), -pi/2+1e-3, pi/2-1e-3)).
double saturation(double err_sum, std::size_t t, double c_sat, double k_i);

// Creates a controller calibrated on the given scores. Both gains are
// scale-matched to the initial threshold: k_i = q and the stored proportional
// gain is gamma*|q|, so `gamma` acts as a relative step size and the
// controller behaves identically across score magnitudes.
ConformalController make_controller(std::span<const double> scores, double alpha, double gamma,
                                    double c_sat);

// Returns true iff the score exceeds the current threshold (strict).
bool should_update(const ConformalController& ctrl, double score);

// Observes one binary error and moves the threshold; returns the new q.
// Throws std::runtime_error if the update would make q non-finite.
double pi_update(ConformalController& ctrl, bool e_t);

}  // namespace coloke::conf
