#include "ykrl/rl/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "ykrl/youla/controller.hpp"

namespace ykrl::rl {

namespace fs = std::filesystem;

std::vector<double> EpisodeSchedule::fixed_program() const {
  std::vector<double> sp(static_cast<std::size_t>(steps), level_a);
  for (int t = 0; t < steps; ++t) {
    const int phase = t / std::max(1, switch_step);
    sp[static_cast<std::size_t>(t)] = phase % 2 == 0 ? level_a : level_b;
  }
  return sp;
}

std::vector<double> EpisodeSchedule::random_program(Rng& rng) const {
  // Two switches with enforced dwell so the transients stay separable.
  std::vector<double> sp(static_cast<std::size_t>(steps), level_a);
  if (steps < 120) return sp;
  const int t1 = 30 + static_cast<int>(rng.uniform_index(
                          static_cast<std::uint64_t>(steps / 2 - 30)));
  const int t2 =
      t1 + 60 + static_cast<int>(rng.uniform_index(
                    static_cast<std::uint64_t>(std::max(1, steps - 30 - (t1 + 60)))));
  for (int t = 0; t < steps; ++t) {
    const double v = t < t1 ? level_a : (t < t2 ? level_b : level_a);
    sp[static_cast<std::size_t>(t)] = v;
  }
  return sp;
}

namespace {

class RolloutLog {
 public:
  explicit RolloutLog(const std::string& path) {
    if (path.empty()) return;
    out_.open(path);
    if (!out_) throw std::runtime_error("train: cannot open log " + path);
    out_ << "t,lsp,l,m,fin,fout,p,du_q,du_pid,u,reward,e,yhat,rhat,clamp\n";
  }

  // Levels are logged on the percent channel; flows stay SI.
  void row(double t, double lsp, const env::TwoTankEnv& env,
           const env::TwoTankEnv::Step& st, double du_q, double e, double yhat,
           double rhat) {
    if (!out_.is_open()) return;
    const env::TankState& s = env.state();
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,"
                  "%.10g,%.10g,%.10g,%.10g,%.10g,%d",
                  t, lsp, env.to_percent(s.level), st.measured, s.f_in,
                  s.f_out, s.pump, du_q, st.du_pid, st.u, st.reward, e, yhat,
                  rhat, st.clamped ? 1 : 0);
    out_ << buf << "\n";
  }

 private:
  std::ofstream out_;
};

Eigen::VectorXd make_obs(const ObsLayout& layout, double e, double y_pred,
                         double r_hat, const Eigen::VectorXd& z) {
  Eigen::VectorXd obs(layout.dim());
  obs(ObsLayout::kError) = e;
  obs(ObsLayout::kPrediction) = y_pred;
  obs(ObsLayout::kRhat) = r_hat;
  obs.segment(ObsLayout::kStateStart, layout.nq) = z;
  return obs;
}

struct EpisodeOutcome {
  double cum_reward = 0.0;
  bool aborted = false;
};

/// One episode. When `td3` is non-null the transitions are stored and the
/// delayed updates run (unless still in warmup); exploration noise is drawn
/// from `explore_rng` when given.
EpisodeOutcome run_episode(env::TwoTankEnv& env, youla::Controller& controller,
                           Actor& actor, const std::vector<double>& program,
                           const ObsLayout& layout, const Td3Config& cfg,
                           Td3* td3, ReplayBuffer* buffer, Rng* explore_rng,
                           Rng* sample_rng, Rng* target_rng, bool learn,
                           double explore_sigma, RolloutLog* log) {
  EpisodeOutcome out;
  const int steps = static_cast<int>(program.size());
  env.reset_settled(program.front());
  controller.reset();
  actor.rollout_reset();

  try {
    for (int t = 0; t < steps; ++t) {
      const double lsp = program[static_cast<std::size_t>(t)];
      const double e = lsp - env.measured();
      const youla::Controller::Prepared prep = controller.prepare(e);
      const Eigen::VectorXd obs =
          make_obs(layout, e, prep.y_pred, prep.r_hat, actor.policy_state());

      double a = actor.rollout_action(obs);
      if (explore_rng) a += explore_rng->gaussian(0.0, explore_sigma);
      a = std::clamp(a, -cfg.action_limit, cfg.action_limit);

      controller.commit(a, prep.y_pred);
      const env::TwoTankEnv::Step st = env.step(a, lsp);
      out.cum_reward += st.reward;

      if (log)
        log->row(t * env.params().dt, lsp, env, st, a, e, prep.y_pred,
                 prep.r_hat);

      if (buffer) {
        const double lsp2 =
            program[static_cast<std::size_t>(std::min(t + 1, steps - 1))];
        const double e2 = lsp2 - env.measured();
        const youla::Controller::Prepared prep2 = controller.prepare(e2);
        const Eigen::VectorXd obs2 = make_obs(layout, e2, prep2.y_pred,
                                              prep2.r_hat, actor.policy_state());
        buffer->add({obs, a, st.reward, obs2, false});
      }

      if (learn && td3 && buffer &&
          buffer->size() >= static_cast<std::size_t>(cfg.batch))
        td3->update_from(*buffer, *sample_rng, *target_rng);

      if (!std::isfinite(env.state().level) || !std::isfinite(env.measured()))
        throw std::runtime_error("non-finite environment state");
    }
  } catch (const std::exception& ex) {
    std::cerr << "episode aborted: " << ex.what() << "\n";
    out.aborted = true;
  }
  return out;
}

}  // namespace

TrainResult train(const TrainSetup& setup, const behavior::HankelModel& model) {
  TrainResult result;
  const ObsLayout layout{setup.q.state_dim};
  const bool logging = !setup.out_dir.empty();
  if (logging) fs::create_directories(setup.out_dir);

  std::ofstream rewards_csv;
  if (logging) {
    rewards_csv.open(fs::path(setup.out_dir) / "rewards.csv");
    if (!rewards_csv) throw std::runtime_error("train: cannot open rewards.csv");
    rewards_csv << "episode,cumulative_reward,seed\n";
  }

  for (const std::uint64_t seed : setup.seeds) {
    Rng master(seed);
    Rng init_rng = master.spawn(1);
    Rng explore_rng = master.spawn(2);
    Rng sample_rng = master.spawn(3);
    Rng target_rng = master.spawn(4);
    const std::uint64_t env_seed = master.spawn(5).next_u64();
    const std::uint64_t eval_env_seed = master.spawn(6).next_u64();
    Rng program_rng = master.spawn(7);

    std::unique_ptr<Actor> actor;
    if (setup.baseline) {
      actor = std::make_unique<BaselineActor>(layout, setup.td3.critic_hidden,
                                              setup.td3.action_limit, init_rng);
    } else {
      actor = std::make_unique<StableActor>(setup.q, layout,
                                            setup.td3.action_limit, init_rng);
    }
    Td3 td3(std::move(actor), layout, setup.td3, init_rng);
    ReplayBuffer buffer(setup.td3.buffer_capacity);

    env::TwoTankEnv env(setup.env, env_seed);
    youla::Controller controller(model);  // actor drives Q through the loop

    fs::path seed_dir;
    if (logging) {
      seed_dir = fs::path(setup.out_dir) / ("seed_" + std::to_string(seed));
      fs::create_directories(seed_dir);
    }

    SeedResult sr;
    sr.seed = seed;
    for (int ep = 0; ep < setup.episodes; ++ep) {
      const bool learn = ep >= setup.td3.warmup_episodes;
      // Linear exploration annealing over the first two thirds of training.
      const int anneal_span = std::max(1, 2 * setup.episodes / 3);
      const double frac = std::min(1.0, static_cast<double>(ep) / anneal_span);
      const double sigma =
          setup.td3.explore_noise *
          (1.0 - (1.0 - setup.td3.explore_floor) * frac);
      std::unique_ptr<RolloutLog> log;
      if (logging)
        log = std::make_unique<RolloutLog>(
            (seed_dir / ("rollout_" + std::to_string(ep) + ".csv")).string());
      const EpisodeOutcome eo = run_episode(
          env, controller, td3.actor(), setup.episode.random_program(program_rng),
          layout, setup.td3, &td3, &buffer, &explore_rng, &sample_rng,
          &target_rng, learn, sigma, log.get());
      sr.episode_rewards.push_back(eo.cum_reward);
      if (eo.aborted) ++sr.aborted_episodes;
      if (logging) {
        td3.actor().save(
            (seed_dir / ("checkpoint_" + std::to_string(ep) + ".ckpt")).string());
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%llu", ep, eo.cum_reward,
                      static_cast<unsigned long long>(seed));
        rewards_csv << buf << "\n";
      }
    }

    // Final evaluation rollout: policy noise off, fresh environment stream.
    env::TwoTankEnv eval_env(setup.env, eval_env_seed);
    youla::Controller eval_controller(model);
    std::unique_ptr<RolloutLog> eval_log;
    if (logging)
      eval_log =
          std::make_unique<RolloutLog>((seed_dir / "rollout_eval.csv").string());
    const EpisodeOutcome eval =
        run_episode(eval_env, eval_controller, td3.actor(),
                    setup.episode.fixed_program(), layout, setup.td3, nullptr,
                    nullptr, nullptr, nullptr, nullptr, false, 0.0,
                    eval_log.get());
    sr.eval_reward = eval.cum_reward;
    if (logging)
      td3.actor().save((seed_dir / "checkpoint_final.ckpt").string());

    result.seeds.push_back(std::move(sr));
  }
  return result;
}

}  // namespace ykrl::rl
