#pragma once

namespace ykrl::env {

/// Discrete PID with output clamping. Positional use (update) holds the
/// integral while saturated; velocity use (increment) returns the raw output
/// change and leaves limiting to the caller.
class Pid {
 public:
  Pid(double kp, double ki, double kd, double lo, double hi);

  /// Positional form: kp*e + ki*integral + kd*de, clamped to [lo, hi].
  double update(double e, double dt);

  /// Velocity form: kp*(e - e_prev) + ki*dt*e + kd*(e - 2 e_prev + e_prev2)/dt.
  double increment(double e, double dt);

  void reset();
  /// Preload the accumulator so the positional output at zero error equals
  /// ki * value; used to start at an operating point.
  void set_integral(double value) { integral_ = value; }
  double integral() const { return integral_; }

 private:
  double kp_, ki_, kd_;
  double lo_, hi_;
  double integral_ = 0.0;
  double prev_e_ = 0.0;
  double prev_e2_ = 0.0;
  bool primed_ = false;
};

}  // namespace ykrl::env
