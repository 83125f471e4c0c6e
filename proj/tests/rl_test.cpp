#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ykrl/behavior/hankel.hpp"
#include "ykrl/env/excitation.hpp"
#include "ykrl/nn/adam.hpp"
#include "ykrl/rl/train.hpp"
#include "ykrl/verify/fd_check.hpp"
#include "ykrl/verify/suites.hpp"

using namespace ykrl;

namespace {

rl::Transition random_transition(Rng& rng, int dim) {
  rl::Transition t;
  t.s = Eigen::VectorXd::NullaryExpr(dim, [&](Eigen::Index) { return rng.gaussian(); });
  t.s2 = Eigen::VectorXd::NullaryExpr(dim, [&](Eigen::Index) { return rng.gaussian(); });
  t.a = rng.gaussian();
  t.r = -std::abs(t.a);
  t.done = false;
  return t;
}

rl::Td3 make_td3(Rng& rng, rl::Td3Config cfg = {}, bool baseline = false) {
  const rl::ObsLayout layout{4};
  std::unique_ptr<rl::Actor> actor;
  if (baseline)
    actor = std::make_unique<rl::BaselineActor>(layout, cfg.critic_hidden,
                                                cfg.action_limit, rng);
  else
    actor = std::make_unique<rl::StableActor>(stablenet::QParameter::Options{},
                                              layout, cfg.action_limit, rng);
  return rl::Td3(std::move(actor), layout, cfg, rng);
}

}  // namespace

TEST_CASE("replay buffer: ring semantics and bounds") {
  rl::ReplayBuffer buf(8);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) buf.add(random_transition(rng, 3));
  CHECK(buf.size() == 8);
  CHECK_THROWS_AS(buf.sample(rng, 9), std::invalid_argument);

  rl::Transition bad = random_transition(rng, 3);
  bad.r = std::nan("");
  CHECK_THROWS_AS(buf.add(bad), std::invalid_argument);
}

TEST_CASE("replay buffer: sampling is uniform (chi-square, p > 0.01)") {
  const std::size_t n = 50;
  rl::ReplayBuffer buf(n);
  Rng rng(2);
  for (std::size_t i = 0; i < n; ++i) buf.add(random_transition(rng, 2));

  std::vector<long> counts(n, 0);
  const int batches = 4000;
  const std::size_t batch = 10;
  for (int b = 0; b < batches; ++b)
    for (const std::size_t idx : buf.sample_indices(rng, batch))
      counts[idx] += 1;

  const double expected =
      static_cast<double>(batches) * batch / static_cast<double>(n);
  double chi2 = 0.0;
  for (long c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  // dof = 49; the p = 0.01 critical value via the Wilson-Hilferty cube.
  const double dof = static_cast<double>(n - 1);
  const double z99 = 2.3263478740408408;
  const double crit =
      dof * std::pow(1.0 - 2.0 / (9.0 * dof) + z99 * std::sqrt(2.0 / (9.0 * dof)), 3);
  CHECK(chi2 < crit);

  // Within one batch indices are distinct.
  for (int b = 0; b < 50; ++b) {
    auto idx = buf.sample_indices(rng, batch);
    std::sort(idx.begin(), idx.end());
    CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
  }
}

TEST_CASE("critic update: zero discount regresses straight to the reward") {
  Rng rng(3);
  rl::Td3Config cfg;
  cfg.gamma = 1e-12;  // effectively discount-free
  cfg.batch = 16;
  rl::Td3 td3 = make_td3(rng, cfg);

  rl::ReplayBuffer buf(64);
  for (int i = 0; i < 32; ++i) {
    rl::Transition t = random_transition(rng, 7);
    t.r = 0.7;  // constant reward
    buf.add(t);
  }
  Rng noise(4);
  rl::CriticTargetDiag diag;
  const rl::Batch batch = rl::Td3::make_batch(buf.sample(rng, 16));
  td3.critic_update(batch, noise, &diag);
  for (std::size_t i = 0; i < diag.target.size(); ++i)
    CHECK(diag.target[i] == doctest::Approx(0.7).epsilon(1e-9));

  double loss = 0.0;
  for (int k = 0; k < 400; ++k)
    loss = td3.critic_update(batch, noise).loss1;
  CHECK(loss < 1e-3);
}

TEST_CASE("critic update: terminal transitions skip the bootstrap") {
  Rng rng(5);
  rl::Td3Config cfg;
  cfg.batch = 8;
  rl::Td3 td3 = make_td3(rng, cfg);

  rl::ReplayBuffer buf(16);
  for (int i = 0; i < 8; ++i) {
    rl::Transition t = random_transition(rng, 7);
    t.done = true;
    buf.add(t);
  }
  Rng noise(6);
  rl::CriticTargetDiag diag;
  const rl::Batch batch = rl::Td3::make_batch(buf.sample(rng, 8));
  td3.critic_update(batch, noise, &diag);
  for (std::size_t i = 0; i < diag.target.size(); ++i) {
    CHECK(diag.done[i]);
    CHECK(diag.target[i] == diag.reward[i]);
  }
}

TEST_CASE("critic update: twin minimum enters the bootstrap") {
  Rng rng(7);
  rl::Td3Config cfg;
  cfg.batch = 16;
  rl::Td3 td3 = make_td3(rng, cfg);
  rl::ReplayBuffer buf(64);
  for (int i = 0; i < 32; ++i) buf.add(random_transition(rng, 7));

  Rng noise(8);
  rl::CriticTargetDiag diag;
  const rl::Batch batch = rl::Td3::make_batch(buf.sample(rng, 16));
  td3.critic_update(batch, noise, &diag);
  for (std::size_t i = 0; i < diag.target.size(); ++i) {
    const double boot = std::min(diag.q1[i], diag.q2[i]);
    CHECK(diag.target[i] ==
          doctest::Approx(diag.reward[i] + diag.gamma * boot).epsilon(1e-12));
  }
}

TEST_CASE("critic update: single terminal transition converges to its reward") {
  Rng rng(9);
  rl::Td3Config cfg;
  cfg.batch = 1;
  cfg.critic_lr = 1e-3;
  rl::Td3 td3 = make_td3(rng, cfg);

  rl::Transition t = random_transition(rng, 7);
  t.done = true;
  t.r = -0.42;
  rl::ReplayBuffer buf(2);
  buf.add(t);

  Rng noise(10);
  const rl::Batch batch = rl::Td3::make_batch(buf.sample(rng, 1));
  for (int k = 0; k < 2000; ++k) td3.critic_update(batch, noise);

  Eigen::MatrixXd x(8, 1);
  x.topRows(7) = t.s;
  x(7, 0) = t.a;
  CHECK(td3.critic1().forward(x)(0, 0) == doctest::Approx(-0.42).epsilon(0.025));
}

TEST_CASE("actor update: a constant critic leaves the actor untouched") {
  Rng rng(11);
  rl::Td3Config cfg;
  cfg.batch = 8;
  rl::Td3 td3 = make_td3(rng, cfg);
  // Zero all critic-1 parameters: output is identically zero.
  for (nn::Param* p : td3.critic1().params()) p->value.setZero();

  std::vector<Eigen::MatrixXd> before;
  for (nn::Param* p : td3.actor().params()) before.push_back(p->value);

  rl::ReplayBuffer buf(16);
  for (int i = 0; i < 8; ++i) buf.add(random_transition(rng, 7));
  const rl::Batch batch = rl::Td3::make_batch(buf.sample(rng, 8));
  CHECK(td3.actor_update(batch));

  std::size_t i = 0;
  for (nn::Param* p : td3.actor().params()) CHECK(p->value == before[i++]);
}

TEST_CASE("actor update: a quadratic critic shrinks the action magnitude") {
  Rng rng(13);
  rl::Td3Config cfg;
  cfg.batch = 32;
  cfg.actor_lr = 2e-3;
  rl::Td3 td3 = make_td3(rng, cfg);

  // Fit critic 1 to Q(s, a) = -a^2 on random observations.
  Rng fit_rng(14);
  nn::Adam critic_opt(td3.critic1().params(), 1e-3);
  for (int k = 0; k < 3000; ++k) {
    Eigen::MatrixXd x(8, 64);
    Eigen::MatrixXd target(1, 64);
    for (int j = 0; j < 64; ++j) {
      for (int r = 0; r < 7; ++r) x(r, j) = fit_rng.gaussian();
      const double a = fit_rng.uniform(-1.0, 1.0);
      x(7, j) = a;
      target(0, j) = -a * a;
    }
    nn::Tape tape;
    const auto pred = td3.critic1().forward(tape, tape.leaf(x));
    const auto loss = tape.mean_sq_diff(pred, tape.leaf(target));
    critic_opt.zero_grad();
    tape.backward(loss);
    critic_opt.step();
  }

  // Give the policy a visible initial action, then let the actor descend.
  stablenet::QParameter* q = td3.actor().stable_q();
  REQUIRE(q != nullptr);
  q->params().back()->value(0, 0) = 0.8;  // feedthrough D

  rl::ReplayBuffer buf(256);
  Rng obs_rng(15);
  for (int i = 0; i < 128; ++i) buf.add(random_transition(obs_rng, 7));

  auto mean_abs_action = [&]() {
    double acc = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i)
      acc += std::abs(td3.actor().act(buf[i].s));
    return acc / static_cast<double>(buf.size());
  };

  const double before = mean_abs_action();
  const double d_before = std::abs(q->params().back()->value(0, 0));
  for (int k = 0; k < 250; ++k) {
    const rl::Batch batch = rl::Td3::make_batch(buf.sample(obs_rng, 32));
    CHECK(td3.actor_update(batch));
  }
  const double after = mean_abs_action();
  CHECK(after < 0.5 * before);
  CHECK(std::abs(q->params().back()->value(0, 0)) < d_before);
}

TEST_CASE("policy delay: one actor update per four critic updates") {
  Rng rng(17);
  rl::Td3Config cfg;
  cfg.batch = 8;
  rl::Td3 td3 = make_td3(rng, cfg);
  rl::ReplayBuffer buf(64);
  for (int i = 0; i < 16; ++i) buf.add(random_transition(rng, 7));

  Rng sample(18), noise(19);
  const int k = 23;
  for (int i = 0; i < k; ++i) td3.update_from(buf, sample, noise);
  CHECK(td3.critic_update_count() == k);
  CHECK(td3.actor_update_count() == k / 4);
}

TEST_CASE("actor gradients through the full loss match finite differences") {
  Rng rng(21);
  rl::Td3Config cfg;
  cfg.batch = 4;
  rl::Td3 td3 = make_td3(rng, cfg);
  stablenet::QParameter* q = td3.actor().stable_q();
  REQUIRE(q != nullptr);

  // Batch away from the correction's switching surface so the finite
  // difference stays on one branch.
  rl::ReplayBuffer buf(16);
  Rng obs_rng(22);
  int added = 0;
  while (added < 8) {
    rl::Transition t = random_transition(obs_rng, 7);
    const Eigen::VectorXd z = t.s.segment(3, 4);
    const Eigen::VectorXd f =
        q->dynamics().candidate(Eigen::MatrixXd(z)).col(0);
    const double vz = q->dynamics().lyapunov().value(z);
    const double vf = q->dynamics().lyapunov().value(f);
    if (std::abs(vf - q->dynamics().beta() * vz) <
        0.05 * (vf + q->dynamics().beta() * vz + 0.1))
      continue;
    buf.add(t);
    ++added;
  }
  Rng pick(23);
  const rl::Batch batch = rl::Td3::make_batch(buf.sample(pick, 4));

  auto loss_plain = [&]() {
    nn::Tape tape;
    const auto loss =
        td3.actor().actor_loss(tape, batch, td3.critic1(), cfg.gamma);
    return tape.value(loss)(0, 0);
  };
  auto loss_and_grad = [&]() {
    for (nn::Param* p : q->params()) p->zero_grad();
    for (nn::Param* p : td3.critic1().params()) p->zero_grad();
    nn::Tape tape;
    const auto loss =
        td3.actor().actor_loss(tape, batch, td3.critic1(), cfg.gamma);
    tape.backward(loss);
    return tape.value(loss)(0, 0);
  };
  const verify::FdReport rep = verify::finite_difference_check(
      q->params(), loss_plain, loss_and_grad, 1e-5);
  INFO("entries checked: " << rep.entries);
  CHECK(rep.max_rel < 1e-3);
}

TEST_CASE("train: fixed seeds reproduce the reward series exactly") {
  env::TwoTankEnv::Config env_cfg;
  env::TwoTankEnv env(env_cfg, 31);
  env::ExcitationConfig excfg;
  excfg.samples = 260;
  excfg.settle_time = 20.0;
  excfg.pe_order = 17;
  Rng rng(32);
  const behavior::Trajectory traj = env::collect_excitation(env, excfg, rng);
  const behavior::HankelModel model(traj, 8, 1e-6);

  rl::TrainSetup setup;
  setup.env = env_cfg;
  setup.episode.steps = 60;
  setup.episode.switch_step = 30;
  setup.td3.warmup_episodes = 1;
  setup.td3.buffer_capacity = 4096;
  setup.episodes = 3;
  setup.seeds = {5};
  setup.out_dir = "";

  const rl::TrainResult a = rl::train(setup, model);
  const rl::TrainResult b = rl::train(setup, model);
  REQUIRE(a.seeds.size() == 1);
  CHECK(a.seeds[0].episode_rewards == b.seeds[0].episode_rewards);
  CHECK(a.seeds[0].eval_reward == b.seeds[0].eval_reward);
  CHECK(a.seeds[0].aborted_episodes == 0);

  // Episode rewards are sums of nonpositive stage costs.
  for (double r : a.seeds[0].episode_rewards) CHECK(r <= 0.0);

  // Zero-length training: the evaluation rollout is the initialized policy's.
  rl::TrainSetup none = setup;
  none.episodes = 0;
  const rl::TrainResult c = rl::train(none, model);
  const rl::TrainResult d = rl::train(none, model);
  CHECK(c.seeds[0].episode_rewards.empty());
  CHECK(c.seeds[0].eval_reward == d.seeds[0].eval_reward);
}

TEST_CASE("stability certificate holds at initialization and mid-training") {
  const verify::SuiteResult res =
      verify::decrease_suite(4, 1000, 33, /*include_trained=*/true);
  INFO(res.detail);
  CHECK(res.pass);
}
