#include "ykrl/rl/td3.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ykrl::rl {

using nn::Activation;
using nn::Tape;

namespace {

nn::DenseNet make_critic(int input_dim, int hidden, const std::string& name) {
  return nn::DenseNet(
      {input_dim, hidden, hidden, 1},
      {Activation::kSoftplus, Activation::kSoftplus, Activation::kIdentity},
      name);
}

void copy_params(const std::vector<nn::Param*>& from,
                 const std::vector<nn::Param*>& to) {
  for (std::size_t i = 0; i < from.size(); ++i) to[i]->value = from[i]->value;
}

void polyak(const std::vector<nn::Param*>& src,
            const std::vector<nn::Param*>& dst, double tau) {
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i]->value = (1.0 - tau) * dst[i]->value + tau * src[i]->value;
}

}  // namespace

Td3::Td3(std::unique_ptr<Actor> actor, ObsLayout layout, const Td3Config& cfg,
         Rng& init_rng)
    : cfg_(cfg),
      layout_(layout),
      actor_(std::move(actor)),
      target_actor_(actor_->clone()),
      critic1_(make_critic(layout.dim() + 1, cfg.critic_hidden, "critic1")),
      critic2_(make_critic(layout.dim() + 1, cfg.critic_hidden, "critic2")),
      target_critic1_(make_critic(layout.dim() + 1, cfg.critic_hidden, "tc1")),
      target_critic2_(make_critic(layout.dim() + 1, cfg.critic_hidden, "tc2")),
      actor_opt_(actor_->readout_params(), cfg.actor_lr),
      critic1_opt_(critic1_.params(), cfg.critic_lr),
      critic2_opt_(critic2_.params(), cfg.critic_lr) {
  if (cfg.gamma <= 0.0 || cfg.gamma >= 1.0)
    throw std::invalid_argument("Td3: gamma must lie in (0,1)");
  if (cfg.policy_delay < 1)
    throw std::invalid_argument("Td3: policy delay must be >= 1");
  if (!actor_->transition_params().empty())
    actor_filter_opt_ = std::make_unique<nn::Adam>(
        actor_->transition_params(), cfg.actor_lr * cfg.filter_lr_ratio);
  critic1_.init(init_rng);
  critic2_.init(init_rng);
  copy_params(critic1_.params(), target_critic1_.params());
  copy_params(critic2_.params(), target_critic2_.params());
}

Batch Td3::make_batch(const std::vector<const Transition*>& sample) {
  if (sample.empty()) throw std::invalid_argument("Td3: empty batch");
  const Eigen::Index b = static_cast<Eigen::Index>(sample.size());
  const Eigen::Index dim = sample.front()->s.size();
  Batch batch;
  batch.s.resize(dim, b);
  batch.s2.resize(dim, b);
  batch.a.resize(b);
  batch.r.resize(b);
  batch.done.resize(b);
  for (Eigen::Index j = 0; j < b; ++j) {
    const Transition& t = *sample[static_cast<std::size_t>(j)];
    batch.s.col(j) = t.s;
    batch.s2.col(j) = t.s2;
    batch.a(j) = t.a;
    batch.r(j) = t.r;
    batch.done(j) = t.done ? 1.0 : 0.0;
  }
  return batch;
}

Eigen::RowVectorXd Td3::target_values(const Batch& batch, Rng& noise_rng,
                                      CriticTargetDiag* diag) const {
  const Eigen::Index b = batch.size();
  Eigen::MatrixXd x2(batch.s2.rows() + 1, b);
  x2.topRows(batch.s2.rows()) = batch.s2;
  for (Eigen::Index j = 0; j < b; ++j) {
    double noise = noise_rng.gaussian(0.0, cfg_.target_noise);
    noise = std::clamp(noise, -cfg_.target_clip, cfg_.target_clip);
    const double a2 = std::clamp(target_actor_->act(batch.s2.col(j)) + noise,
                                 -cfg_.action_limit, cfg_.action_limit);
    x2(batch.s2.rows(), j) = a2;
  }
  const Eigen::MatrixXd q1 = target_critic1_.forward(x2);
  const Eigen::MatrixXd q2 = target_critic2_.forward(x2);

  Eigen::RowVectorXd y(b);
  if (diag) {
    diag->q1.clear();
    diag->q2.clear();
    diag->target.clear();
    diag->reward.clear();
    diag->done.clear();
    diag->gamma = cfg_.gamma;
  }
  for (Eigen::Index j = 0; j < b; ++j) {
    const double boot = std::min(q1(0, j), q2(0, j));
    y(j) = cfg_.reward_scale * batch.r(j) +
           (batch.done(j) != 0.0 ? 0.0 : cfg_.gamma * boot);
    y(j) = std::clamp(y(j), cfg_.reward_scale * cfg_.min_reward / (1.0 - cfg_.gamma),
                      0.0);
    if (diag) {
      diag->q1.push_back(q1(0, j));
      diag->q2.push_back(q2(0, j));
      diag->target.push_back(y(j));
      diag->reward.push_back(batch.r(j));
      diag->done.push_back(batch.done(j) != 0.0);
    }
  }
  return y;
}

Td3::CriticStats Td3::critic_update(const Batch& batch, Rng& noise_rng,
                                    CriticTargetDiag* diag) {
  const Eigen::RowVectorXd y = target_values(batch, noise_rng, diag);

  Eigen::MatrixXd x(batch.s.rows() + 1, batch.size());
  x.topRows(batch.s.rows()) = batch.s;
  x.row(batch.s.rows()) = batch.a;

  CriticStats stats;
  auto fit = [&](nn::DenseNet& critic, nn::Adam& opt) {
    Tape tape;
    const Tape::NodeId pred = critic.forward(tape, tape.leaf(x));
    const Tape::NodeId loss =
        tape.mean_sq_diff(pred, tape.leaf(Eigen::MatrixXd(y)));
    const double value = tape.value(loss)(0, 0);
    if (!std::isfinite(value))
      throw std::runtime_error("Td3: non-finite critic loss (targets " +
                               std::to_string(y.minCoeff()) + ".." +
                               std::to_string(y.maxCoeff()) + ")");
    opt.zero_grad();
    tape.backward(loss);
    opt.step();
    return value;
  };
  stats.loss1 = fit(critic1_, critic1_opt_);
  stats.loss2 = fit(critic2_, critic2_opt_);
  ++critic_updates_;
  return stats;
}

bool Td3::actor_update(const Batch& batch) {
  Tape tape;
  const Tape::NodeId loss =
      actor_->actor_loss(tape, batch, critic1_, cfg_.gamma);
  actor_opt_.zero_grad();
  if (actor_filter_opt_) actor_filter_opt_->zero_grad();
  for (nn::Param* p : critic1_.params()) p->zero_grad();
  tape.backward(loss);
  bool applied = actor_opt_.step();
  if (applied && actor_filter_opt_) applied = actor_filter_opt_->step();
  if (applied) {
    ++actor_updates_;
    soft_update_targets();
  }
  return applied;
}

void Td3::update_from(const ReplayBuffer& buffer, Rng& sample_rng,
                      Rng& noise_rng) {
  const Batch batch = make_batch(
      buffer.sample(sample_rng, static_cast<std::size_t>(cfg_.batch)));
  critic_update(batch, noise_rng);
  if (critic_updates_ % cfg_.policy_delay == 0) actor_update(batch);
}

void Td3::soft_update_targets() {
  polyak(actor_->params(), target_actor_->params(), cfg_.tau);
  polyak(critic1_.params(), target_critic1_.params(), cfg_.tau);
  polyak(critic2_.params(), target_critic2_.params(), cfg_.tau);
}

}  // namespace ykrl::rl
