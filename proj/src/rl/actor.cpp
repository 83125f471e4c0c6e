#include "ykrl/rl/actor.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "ykrl/nn/checkpoint.hpp"

namespace ykrl::rl {

using nn::Tape;

static const double kSecondTermToggle = std::getenv("YKRL_ONE_TERM") ? 0.0 : 1.0;

StableActor::StableActor(const stablenet::QParameter::Options& opts,
                         ObsLayout layout, double action_limit, Rng& rng)
    : layout_(layout), action_limit_(action_limit), q_(opts, rng) {
  if (layout_.nq != opts.state_dim)
    throw std::invalid_argument(
        "StableActor: observation layout and Q state dimension disagree");
}

double StableActor::act(const Eigen::VectorXd& obs) const {
  const Eigen::VectorXd z = obs.segment(ObsLayout::kStateStart, layout_.nq);
  const double raw = q_.action_at(z, obs(ObsLayout::kRhat));
  return std::clamp(raw, -action_limit_, action_limit_);
}

double StableActor::rollout_action(const Eigen::VectorXd& obs) {
  return std::clamp(q_.step(obs(ObsLayout::kRhat)), -action_limit_,
                    action_limit_);
}

Tape::NodeId StableActor::actor_loss(nn::Tape& tape, const Batch& batch,
                                     nn::DenseNet& critic, double gamma) {
  const Tape::NodeId s = tape.leaf(batch.s);
  const Tape::NodeId z = tape.rows(s, ObsLayout::kStateStart, layout_.nq);
  const Tape::NodeId rhat = tape.rows(s, ObsLayout::kRhat, 1);
  // The deployed action saturates at the actuator-increment limit; the
  // objective evaluates the critic at the same saturated action.
  const Tape::NodeId a =
      tape.clamp(q_.action(tape, z, rhat), -action_limit_, action_limit_);
  const Tape::NodeId value_now = critic.forward(tape, tape.vstack(s, a));

  // One-step unroll of the policy state into the stored next observation.
  const Tape::NodeId s2_head =
      tape.leaf(batch.s2.topRows(ObsLayout::kStateStart));
  const Tape::NodeId z2 = q_.next_state(tape, z, rhat);
  const Tape::NodeId s2 = tape.vstack(s2_head, z2);
  const Tape::NodeId rhat2 = tape.rows(s2_head, ObsLayout::kRhat, 1);
  const Tape::NodeId a2 =
      tape.clamp(q_.action(tape, z2, rhat2), -action_limit_, action_limit_);
  const Tape::NodeId value_next = critic.forward(tape, tape.vstack(s2, a2));

  const Tape::NodeId gain = tape.add(
      tape.col_mean(value_now), tape.scale(tape.col_mean(value_next), gamma * kSecondTermToggle));
  return tape.scale(gain, -1.0);
}

std::vector<nn::Param*> StableActor::readout_params() {
  // C and D drive the action directly; B joins the readout-rate group only
  // through next_state, handled in transition_params.
  std::vector<nn::Param*> ps = q_.params();
  return {ps[ps.size() - 2], ps[ps.size() - 1]};  // C, D
}

std::vector<nn::Param*> StableActor::transition_params() {
  std::vector<nn::Param*> ps = q_.params();
  ps.resize(ps.size() - 2);  // corrected dynamics plus B
  return ps;
}

std::unique_ptr<Actor> StableActor::clone() const {
  return std::make_unique<StableActor>(*this);
}

BaselineActor::BaselineActor(ObsLayout layout, int hidden, double action_limit,
                             Rng& rng)
    : layout_(layout),
      action_limit_(action_limit),
      net_({layout.dim(), hidden, hidden, 1},
           {nn::Activation::kSoftplus, nn::Activation::kSoftplus,
            nn::Activation::kTanh},
           "actor") {
  net_.init(rng);
}

double BaselineActor::act(const Eigen::VectorXd& obs) const {
  return action_limit_ * net_.forward(obs)(0);
}

Tape::NodeId BaselineActor::actor_loss(nn::Tape& tape, const Batch& batch,
                                       nn::DenseNet& critic, double /*gamma*/) {
  const Tape::NodeId s = tape.leaf(batch.s);
  const Tape::NodeId a = tape.scale(net_.forward(tape, s), action_limit_);
  const Tape::NodeId value = critic.forward(tape, tape.vstack(s, a));
  return tape.scale(tape.col_mean(value), -1.0);
}

std::unique_ptr<Actor> BaselineActor::clone() const {
  return std::make_unique<BaselineActor>(*this);
}

void BaselineActor::save(const std::string& path) const {
  std::vector<std::pair<std::string, const Eigen::MatrixXd*>> arrays;
  for (const nn::Param* p : net_.params()) arrays.emplace_back(p->name, &p->value);
  nn::save_checkpoint(path, arrays, {{"action_limit", action_limit_}});
}

}  // namespace ykrl::rl
