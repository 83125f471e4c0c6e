#include "ykrl/env/excitation.hpp"

#include <sstream>
#include <stdexcept>

#include "ykrl/behavior/hankel.hpp"

namespace ykrl::env {

behavior::Trajectory collect_excitation(TwoTankEnv& env,
                                        const ExcitationConfig& cfg, Rng& rng) {
  if (cfg.samples < 2)
    throw std::invalid_argument("collect_excitation: need at least 2 samples");
  if (cfg.hold_steps < 1)
    throw std::invalid_argument("collect_excitation: hold_steps must be >= 1");

  env.reset_settled(cfg.setpoint);
  const int settle_steps =
      static_cast<int>(cfg.settle_time / env.params().dt + 0.5);
  for (int i = 0; i < settle_steps; ++i) env.step(0.0, cfg.setpoint);

  behavior::Trajectory traj;
  traj.dt = env.params().dt;
  traj.u.reserve(cfg.samples);
  traj.y.reserve(cfg.samples);

  // Random doublets: each held pulse is followed by its negation, so the
  // integrated flow-setpoint stays near the operating point while the record
  // keeps exciting the short-horizon dynamics.
  double symbol = 0.0;
  const int period = 2 * cfg.hold_steps;
  for (int k = 0; k < cfg.samples; ++k) {
    const int phase = k % period;
    if (phase == 0)
      symbol = rng.uniform() < 0.5 ? -cfg.amplitude : cfg.amplitude;
    else if (phase == cfg.hold_steps)
      symbol = -symbol;
    // Output sample is the measurement seen when the input is chosen, so the
    // record is strictly causal (no direct feedthrough).
    traj.u.push_back(symbol);
    traj.y.push_back(env.measured() - cfg.setpoint);
    env.step(symbol, cfg.setpoint);
  }

  if (cfg.pe_order > 0) {
    const behavior::PeReport rep =
        behavior::pe_report(std::span<const double>(traj.u), cfg.pe_order);
    if (!rep.pass) {
      std::ostringstream os;
      os << "collect_excitation: input not persistently exciting of order "
         << cfg.pe_order << " (rank " << rep.rank << " of " << cfg.pe_order
         << ")";
      throw std::runtime_error(os.str());
    }
  }
  return traj;
}

}  // namespace ykrl::env
