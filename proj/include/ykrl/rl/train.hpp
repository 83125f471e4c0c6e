#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ykrl/behavior/hankel.hpp"
#include "ykrl/env/tank.hpp"
#include "ykrl/rl/td3.hpp"
#include "ykrl/stablenet/q_parameter.hpp"

namespace ykrl::rl {

/// Setpoint program: the level alternates A -> B -> A with two switches per
/// episode. Training episodes draw the switch times (unpredictable switch
/// phase keeps the value function a smooth hazard expectation); evaluation
/// uses the fixed mid-episode times.
struct EpisodeSchedule {
  int steps = 300;
  double level_a = 40.0;  // [% of span]
  double level_b = 60.0;
  int switch_step = 100;  // nominal first-switch step (evaluation program)

  std::vector<double> fixed_program() const;
  std::vector<double> random_program(Rng& rng) const;
};

struct TrainSetup {
  env::TwoTankEnv::Config env;
  EpisodeSchedule episode;
  stablenet::QParameter::Options q;
  Td3Config td3;
  int episodes = 30;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  bool baseline = false;
  std::string out_dir;  // run artifacts land here; empty disables logging
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<double> episode_rewards;  // cumulative per training episode
  int aborted_episodes = 0;
  double eval_reward = 0.0;
};

struct TrainResult {
  std::vector<SeedResult> seeds;
};

/// Full training run: per seed, TD3 on the tank environment wrapped by the
/// data-driven controller. Writes rewards.csv plus per-seed rollout logs,
/// checkpoints and a final evaluation rollout when out_dir is set.
TrainResult train(const TrainSetup& setup, const behavior::HankelModel& model);

}  // namespace ykrl::rl
