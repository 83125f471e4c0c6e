#pragma once

#include <memory>
#include <vector>

#include "ykrl/nn/adam.hpp"
#include "ykrl/rl/actor.hpp"
#include "ykrl/rl/replay_buffer.hpp"

namespace ykrl::rl {

struct Td3Config {
  double gamma = 0.99;
  double tau = 0.005;          // target soft-update rate
  int batch = 64;
  std::size_t buffer_capacity = 100000;
  int policy_delay = 4;
  // Action units are percent-of-flow-range per step; the noise scales keep
  // the canonical TD3 ratios of the action limit (0.1, 0.2, 0.5).
  double explore_noise = 0.5;
  /// Exploration anneals linearly to this fraction of explore_noise over the
  /// first two thirds of training.
  double explore_floor = 1.0;
  double target_noise = 1.0;
  double target_clip = 2.5;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  int warmup_episodes = 2;
  int critic_hidden = 64;
  double action_limit = 5.0;
  /// Learner-side scale on rewards entering the TD targets; keeps critic
  /// values O(1) regardless of the stage-cost units. Logged rewards are
  /// unscaled.
  double reward_scale = 0.02;
  /// Transition-parameter learning rate as a fraction of actor_lr.
  double filter_lr_ratio = 0.1;
  /// Stage costs are nonpositive, so discounted values live in
  /// [reward_scale * min_reward / (1 - gamma), 0]; TD targets are clipped to
  /// that range.
  double min_reward = -10.25;
};

/// Per-sample target diagnostics captured on request; used to assert that the
/// twin-critic minimum enters the bootstrap.
struct CriticTargetDiag {
  std::vector<double> q1;
  std::vector<double> q2;
  std::vector<double> target;
  std::vector<double> reward;
  std::vector<bool> done;
  double gamma = 0.0;
};

/// Twin-critic TD3 update engine around an Actor. The actor owns the policy
/// parameters; this class owns the critics, all target copies, and the
/// optimizers.
class Td3 {
 public:
  Td3(std::unique_ptr<Actor> actor, ObsLayout layout, const Td3Config& cfg,
      Rng& init_rng);

  struct CriticStats {
    double loss1 = 0.0;
    double loss2 = 0.0;
  };

  /// One twin-critic regression step toward
  /// r + gamma * min(targets at the smoothed target action).
  CriticStats critic_update(const Batch& batch, Rng& noise_rng,
                            CriticTargetDiag* diag = nullptr);

  /// Deterministic policy-gradient step through critic 1 followed by target
  /// soft updates. Returns false (update skipped) on non-finite gradients.
  bool actor_update(const Batch& batch);

  /// Convenience: sample a batch and run the delayed-update pattern.
  void update_from(const ReplayBuffer& buffer, Rng& sample_rng, Rng& noise_rng);

  Actor& actor() { return *actor_; }
  const Actor& actor() const { return *actor_; }
  Actor& target_actor() { return *target_actor_; }
  nn::DenseNet& critic1() { return critic1_; }
  nn::DenseNet& critic2() { return critic2_; }
  const Td3Config& config() const { return cfg_; }
  long critic_update_count() const { return critic_updates_; }
  long actor_update_count() const { return actor_updates_; }

  static Batch make_batch(const std::vector<const Transition*>& sample);

 private:
  Eigen::RowVectorXd target_values(const Batch& batch, Rng& noise_rng,
                                   CriticTargetDiag* diag) const;
  void soft_update_targets();

  Td3Config cfg_;
  ObsLayout layout_;
  std::unique_ptr<Actor> actor_;
  std::unique_ptr<Actor> target_actor_;
  nn::DenseNet critic1_, critic2_;
  nn::DenseNet target_critic1_, target_critic2_;
  nn::Adam actor_opt_, critic1_opt_, critic2_opt_;
  std::unique_ptr<nn::Adam> actor_filter_opt_;  // transition params, if any
  long critic_updates_ = 0;
  long actor_updates_ = 0;
};

}  // namespace ykrl::rl
