#include "ykrl/env/tank.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ykrl/youla/controller.hpp"

namespace ykrl::env {

namespace {
constexpr double kPi = std::numbers::pi;
}

TwoTankEnv::TwoTankEnv(const Config& cfg, std::uint64_t noise_seed)
    : cfg_(cfg),
      pid_level_(cfg.level_pid.kp, cfg.level_pid.ki, cfg.level_pid.kd, -1.0, 1.0),
      pid_flow_(cfg.flow_pid.kp, cfg.flow_pid.ki, cfg.flow_pid.kd, 0.0, 100.0),
      noise_on_(cfg.noise),
      noise_rng_(noise_seed) {
  const TankParams& t = cfg_.tank;
  if (t.tau_p <= 0 || t.tau_in <= 0 || t.tau_out <= 0 || t.tau_m <= 0 ||
      t.r_tank <= 0 || t.r_pipe <= 0 || t.f_max <= 0 || t.dt <= 0 ||
      t.substeps <= 0 || t.noise_var < 0 || t.f_c < 0)
    throw std::invalid_argument("TwoTankEnv: non-positive physical parameter");
  reset_settled(0.5 * t.level_max);
}

double TwoTankEnv::equilibrium_flow_fraction(double level) const {
  const TankParams& t = cfg_.tank;
  const double drain = kPi * t.r_pipe * t.r_pipe * t.f_c *
                       std::sqrt(2.0 * t.gravity * std::max(level, 0.0));
  return drain / t.f_max;
}

void TwoTankEnv::reset_settled(double level_sp_pct) {
  const TankParams& t = cfg_.tank;
  const double level_m = to_meters(level_sp_pct);
  if (level_m < 0.0 || level_m > t.level_max)
    throw std::invalid_argument("TwoTankEnv: setpoint outside level range");
  const double frac = equilibrium_flow_fraction(level_m);
  state_.level = level_m;
  state_.m = level_m;
  state_.f_out = frac * t.f_max;
  state_.f_in = state_.f_out;
  state_.pump = 100.0 * frac;

  u_flow_sp_ = frac;
  pid_level_.reset();
  pid_flow_.reset();
  // Flow PI holds the pump at its equilibrium speed when the flow error is
  // zero.
  if (cfg_.flow_pid.ki != 0.0)
    pid_flow_.set_integral(state_.pump / cfg_.flow_pid.ki);

  measured_ = fresh_measurement();
}

double TwoTankEnv::fresh_measurement() {
  double pct = to_percent(state_.m);
  if (noise_on_)
    pct += noise_rng_.gaussian(0.0, std::sqrt(cfg_.tank.noise_var));
  return pct;
}

TwoTankEnv::Derivatives TwoTankEnv::ode(const TankState& s,
                                        double pump_sp) const {
  const TankParams& t = cfg_.tank;
  Derivatives d;
  d.pump = (pump_sp - s.pump) / t.tau_p;
  d.f_in = (t.f_max * (s.pump / 100.0) - s.f_in) / t.tau_in;
  const double bernoulli =
      s.level > 0.0 ? kPi * t.r_pipe * t.r_pipe * t.f_c *
                          std::sqrt(2.0 * t.gravity * s.level)
                    : 0.0;
  d.f_out = (bernoulli - s.f_out) / t.tau_out;
  d.level = (s.f_in - s.f_out) / (kPi * t.r_tank * t.r_tank);
  d.m = (s.level - s.m) / t.tau_m;
  return d;
}

void TwoTankEnv::rk4_step(double pump_sp, double h) {
  auto advance = [](const TankState& s, const Derivatives& d, double f) {
    TankState n = s;
    n.pump += f * d.pump;
    n.f_in += f * d.f_in;
    n.f_out += f * d.f_out;
    n.level += f * d.level;
    n.m += f * d.m;
    return n;
  };
  const Derivatives k1 = ode(state_, pump_sp);
  const Derivatives k2 = ode(advance(state_, k1, h / 2.0), pump_sp);
  const Derivatives k3 = ode(advance(state_, k2, h / 2.0), pump_sp);
  const Derivatives k4 = ode(advance(state_, k3, h), pump_sp);
  state_.pump += h / 6.0 * (k1.pump + 2.0 * k2.pump + 2.0 * k3.pump + k4.pump);
  state_.f_in += h / 6.0 * (k1.f_in + 2.0 * k2.f_in + 2.0 * k3.f_in + k4.f_in);
  state_.f_out +=
      h / 6.0 * (k1.f_out + 2.0 * k2.f_out + 2.0 * k3.f_out + k4.f_out);
  state_.level +=
      h / 6.0 * (k1.level + 2.0 * k2.level + 2.0 * k3.level + k4.level);
  state_.m += h / 6.0 * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m);

  // Empty tank: the level cannot go negative and the drain stops.
  if (state_.level <= 0.0) {
    state_.level = 0.0;
    state_.f_out = 0.0;
  }
  if (state_.level > cfg_.tank.level_max) state_.level = cfg_.tank.level_max;
}

void TwoTankEnv::integrate(double pump_sp) {
  const double h = cfg_.tank.dt / cfg_.tank.substeps;
  for (int i = 0; i < cfg_.tank.substeps; ++i) rk4_step(pump_sp, h);
}

double TwoTankEnv::reward(double level_sp_pct, double measured_pct,
                          double du_q) {
  return -0.1 * std::abs(level_sp_pct - measured_pct) - 0.01 * du_q * du_q;
}

double TwoTankEnv::to_percent(double level_m) const {
  return 100.0 * level_m / cfg_.tank.level_max;
}

double TwoTankEnv::to_meters(double level_pct) const {
  return level_pct / 100.0 * cfg_.tank.level_max;
}

TwoTankEnv::Step TwoTankEnv::step(double du_q_pct, double level_sp_pct) {
  if (!std::isfinite(du_q_pct))
    throw std::invalid_argument("TwoTankEnv: non-finite action");
  if (!std::isfinite(level_sp_pct))
    throw std::invalid_argument("TwoTankEnv: non-finite setpoint");
  const TankParams& t = cfg_.tank;

  Step out;
  const double e_level_pct = level_sp_pct - measured_;
  out.du_pid = pid_level_.increment(e_level_pct, t.dt);
  const youla::ComposeResult comp = youla::compose_incremental(
      du_q_pct / 100.0, out.du_pid, u_flow_sp_, 0.0, 1.0);
  u_flow_sp_ = comp.u;
  out.u = comp.u;
  out.clamped = comp.clamped;

  const double f_in_sp = u_flow_sp_ * t.f_max;
  const double pump_sp = pid_flow_.update(f_in_sp - state_.f_in, t.dt);
  integrate(pump_sp);

  measured_ = fresh_measurement();
  out.measured = measured_;
  out.reward = reward(level_sp_pct, measured_, du_q_pct);
  return out;
}

}  // namespace ykrl::env
