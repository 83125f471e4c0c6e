#pragma once

#include <cstdint>

#include "ykrl/env/pid.hpp"
#include "ykrl/rng.hpp"

namespace ykrl::env {

struct TankParams {
  double tau_p = 2.0;     // pump filter [s]
  double tau_in = 5.0;    // inflow filter [s]
  double tau_out = 10.0;  // outflow filter [s]
  double tau_m = 1.0;     // measurement filter [s]
  double r_tank = 0.25;   // [m]
  double r_pipe = 0.02;   // [m]
  double f_c = 0.6;       // drain flow coefficient
  double f_max = 5e-3;    // maximum pump flow [m^3/s]
  double gravity = 9.81;  // [m/s^2]
  double dt = 0.5;        // control period [s]
  // Measurement noise variance in (percent of span)^2; the sensor reads the
  // level as a percentage of level_max.
  double noise_var = 0.015;
  double level_max = 1.0;  // tank span [m]
  int substeps = 5;          // RK4 substeps per control period
};

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

/// Physical state: pump speed [%], inflow and outflow [m^3/s], level and
/// filtered level [m].
struct TankState {
  double pump = 0.0;
  double f_in = 0.0;
  double f_out = 0.0;
  double level = 0.0;
  double m = 0.0;
};

/// Two-tank level process with cascaded PID controllers baked into the
/// environment. Physics run in SI; every operator-facing channel is in
/// percent: the sensor reads percent of span, setpoints are percent, and the
/// external action du_q shifts the inflow setpoint by percent-of-flow-range
/// per step on top of the level PID's own increment. Integration is RK4 at
/// the control period; gaussian noise corrupts the percent measurement.
class TwoTankEnv {
 public:
  struct Config {
    TankParams tank;
    PidGains level_pid{0.004, 1.2e-4, 0.0};  // % error -> flow fraction incr.
    PidGains flow_pid{15000.0, 8000.0, 0.0};  // m^3/s -> pump %
    bool noise = true;
  };

  TwoTankEnv(const Config& cfg, std::uint64_t noise_seed);

  /// Place the process at the exact analytic equilibrium for the given level
  /// setpoint [% of span]: all filters settled, PID internals consistent.
  void reset_settled(double level_sp_pct);

  struct Step {
    double reward = 0.0;
    double du_pid = 0.0;  // flow-fraction increment from the level PID
    double u = 0.0;       // flow setpoint after composition [fraction]
    bool clamped = false;
    double measured = 0.0;  // noisy level reading [%]
  };

  /// One control period: level PID increment from the percent error,
  /// incremental composition with du_q [%-of-flow-range per step], flow PID,
  /// RK4 integration, fresh measurement, reward.
  Step step(double du_q_pct, double level_sp_pct);

  /// Stage cost: -0.1 |lsp - m| - 0.01 du_q^2 on the percent channels.
  static double reward(double level_sp_pct, double measured_pct, double du_q);

  double to_percent(double level_m) const;
  double to_meters(double level_pct) const;

  /// Physics only: advance one control period with the pump setpoint held;
  /// PIDs, composition and measurement noise are bypassed.
  void integrate(double pump_sp);

  const TankState& state() const { return state_; }
  /// Latest (noisy) level reading [% of span].
  double measured() const { return measured_; }
  double flow_setpoint() const { return u_flow_sp_; }
  const TankParams& params() const { return cfg_.tank; }
  void set_noise(bool on) { noise_on_ = on; }
  bool noise_enabled() const { return noise_on_; }

  /// Normalized flow setpoint that balances the drain at a given level [m].
  double equilibrium_flow_fraction(double level_m) const;

 private:
  struct Derivatives {
    double pump, f_in, f_out, level, m;
  };
  Derivatives ode(const TankState& s, double pump_sp) const;
  void rk4_step(double pump_sp, double h);
  double fresh_measurement();

  Config cfg_;
  TankState state_;
  Pid pid_level_;
  Pid pid_flow_;
  double u_flow_sp_ = 0.0;  // normalized, [0, 1]
  double measured_ = 0.0;   // percent of span
  bool noise_on_ = true;
  Rng noise_rng_;
};

}  // namespace ykrl::env
