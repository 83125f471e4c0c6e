#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "ykrl/nn/dense_net.hpp"
#include "ykrl/stablenet/q_parameter.hpp"

namespace ykrl::rl {

/// Observation layout fed to actor and critic: tracking error, internal-model
/// prediction, the Q input r_hat, then the policy state z.
struct ObsLayout {
  int nq = 4;
  static constexpr int kError = 0;
  static constexpr int kPrediction = 1;
  static constexpr int kRhat = 2;
  static constexpr int kStateStart = 3;
  int dim() const { return kStateStart + nq; }
};

struct Batch {
  Eigen::MatrixXd s;        // obs_dim x B
  Eigen::RowVectorXd a;     // 1 x B
  Eigen::RowVectorXd r;     // 1 x B
  Eigen::MatrixXd s2;       // obs_dim x B
  Eigen::RowVectorXd done;  // 1 x B, {0,1}
  Eigen::Index size() const { return a.cols(); }
};

/// Policy abstraction shared by the stable Q parameter and the unconstrained
/// comparison actor. Rollout evaluation may be stateful; replayed minibatch
/// evaluation is stateless because the policy state is part of the stored
/// observation.
class Actor {
 public:
  virtual ~Actor() = default;

  /// Deterministic action at a stored observation (stateless).
  virtual double act(const Eigen::VectorXd& obs) const = 0;

  /// Stateful rollout action; advances internal policy state if any.
  virtual double rollout_action(const Eigen::VectorXd& obs) = 0;
  virtual void rollout_reset() = 0;
  virtual Eigen::VectorXd policy_state() const = 0;

  /// Scalar loss node to minimize: the negated critic value of this actor's
  /// action over the batch.
  virtual nn::Tape::NodeId actor_loss(nn::Tape& tape, const Batch& batch,
                                      nn::DenseNet& critic, double gamma) = 0;

  virtual std::vector<nn::Param*> params() = 0;
  /// Input/output maps (C, D and peers): adapted at the full actor rate.
  virtual std::vector<nn::Param*> readout_params() { return params(); }
  /// Internal-filter parameters (B and the corrected dynamics): adapted
  /// slower, since replayed policy states were produced under earlier filter
  /// weights.
  virtual std::vector<nn::Param*> transition_params() { return {}; }
  virtual std::unique_ptr<Actor> clone() const = 0;
  virtual void save(const std::string& path) const = 0;

  /// Non-null for the stability-constrained actor.
  virtual stablenet::QParameter* stable_q() { return nullptr; }
};

/// Stability-constrained actor: the Youla Q parameter itself. The minibatch
/// objective pairs the critic value at the stored observation with the value
/// at the next observation rebuilt from the policy's own one-step state
/// unroll, so the transition parameters (B and the corrected dynamics,
/// including the Lyapunov scale) receive gradients.
class StableActor : public Actor {
 public:
  StableActor(const stablenet::QParameter::Options& opts, ObsLayout layout,
              double action_limit, Rng& rng);

  double act(const Eigen::VectorXd& obs) const override;
  double rollout_action(const Eigen::VectorXd& obs) override;
  void rollout_reset() override { q_.reset(); }
  Eigen::VectorXd policy_state() const override { return q_.state(); }

  nn::Tape::NodeId actor_loss(nn::Tape& tape, const Batch& batch,
                              nn::DenseNet& critic, double gamma) override;

  std::vector<nn::Param*> params() override { return q_.params(); }
  std::vector<nn::Param*> readout_params() override;
  std::vector<nn::Param*> transition_params() override;
  std::unique_ptr<Actor> clone() const override;
  void save(const std::string& path) const override { q_.save(path); }
  stablenet::QParameter* stable_q() override { return &q_; }

 private:
  ObsLayout layout_;
  double action_limit_;
  stablenet::QParameter q_;
};

/// Unconstrained feedforward actor used for the comparison runs: same width
/// and activation as the critic, tanh-squashed output scaled to the action
/// limit. Its policy-state slot in the observation stays zero.
class BaselineActor : public Actor {
 public:
  BaselineActor(ObsLayout layout, int hidden, double action_limit, Rng& rng);

  double act(const Eigen::VectorXd& obs) const override;
  double rollout_action(const Eigen::VectorXd& obs) override { return act(obs); }
  void rollout_reset() override {}
  Eigen::VectorXd policy_state() const override {
    return Eigen::VectorXd::Zero(layout_.nq);
  }

  nn::Tape::NodeId actor_loss(nn::Tape& tape, const Batch& batch,
                              nn::DenseNet& critic, double gamma) override;

  std::vector<nn::Param*> params() override { return net_.params(); }
  std::unique_ptr<Actor> clone() const override;
  void save(const std::string& path) const override;

 private:
  ObsLayout layout_;
  double action_limit_;
  nn::DenseNet net_;
};

}  // namespace ykrl::rl
