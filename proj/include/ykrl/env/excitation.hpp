#pragma once

#include "ykrl/behavior/trajectory.hpp"
#include "ykrl/env/tank.hpp"
#include "ykrl/rng.hpp"

namespace ykrl::env {

/// Excitation experiment on the PID-closed loop: hold the level setpoint,
/// settle, then drive du_q with a pseudorandom binary sequence.
struct ExcitationConfig {
  int samples = 400;
  double amplitude = 2.0;  // doublet magnitude on du_q [%-of-flow-range/step]
  int hold_steps = 4;      // control periods per PRBS symbol
  double setpoint = 50.0;  // collection operating level [% of span]
  double settle_time = 120.0;  // [s] of PID-only settling before recording
  int pe_order = 0;            // required excitation order (0 = 2L+1 check is
                               // done later by the model)
};

/// Drives the loop and returns the (du_q, level deviation) record; the output
/// channel is the measured level minus the collection setpoint so that the
/// record is a trajectory of the (locally) linear closed loop. Throws with a
/// rank diagnostic if the input fails the persistent-excitation check.
behavior::Trajectory collect_excitation(TwoTankEnv& env,
                                        const ExcitationConfig& cfg, Rng& rng);

}  // namespace ykrl::env
