#include "ykrl/env/pid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ykrl::env {

Pid::Pid(double kp, double ki, double kd, double lo, double hi)
    : kp_(kp), ki_(ki), kd_(kd), lo_(lo), hi_(hi) {
  if (!(lo < hi)) throw std::invalid_argument("Pid: invalid output limits");
}

double Pid::update(double e, double dt) {
  if (!std::isfinite(e)) throw std::invalid_argument("Pid: non-finite error");
  const double de = primed_ ? (e - prev_e_) / dt : 0.0;
  const double candidate_integral = integral_ + e * dt;
  double out = kp_ * e + ki_ * candidate_integral + kd_ * de;
  if (out > hi_ || out < lo_) {
    // Integral hold: keep the accumulator, clamp the output.
    out = kp_ * e + ki_ * integral_ + kd_ * de;
    out = std::clamp(out, lo_, hi_);
  } else {
    integral_ = candidate_integral;
  }
  prev_e2_ = prev_e_;
  prev_e_ = e;
  primed_ = true;
  return out;
}

double Pid::increment(double e, double dt) {
  if (!std::isfinite(e)) throw std::invalid_argument("Pid: non-finite error");
  const double d1 = primed_ ? e - prev_e_ : 0.0;
  const double d2 = primed_ ? (e - 2.0 * prev_e_ + prev_e2_) / dt : 0.0;
  prev_e2_ = prev_e_;
  prev_e_ = e;
  primed_ = true;
  return kp_ * d1 + ki_ * dt * e + kd_ * d2;
}

void Pid::reset() {
  integral_ = 0.0;
  prev_e_ = 0.0;
  prev_e2_ = 0.0;
  primed_ = false;
}

}  // namespace ykrl::env
