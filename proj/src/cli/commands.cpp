#include "ykrl/cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ykrl/behavior/hankel.hpp"
#include "ykrl/env/excitation.hpp"
#include "ykrl/verify/suites.hpp"

namespace ykrl::cli {

namespace fs = std::filesystem;

int run_collect(const RunConfig& cfg) {
  try {
    cfg.validate();
  } catch (const ConfigError& ex) {
    std::cerr << ex.what() << "\n";
    return kExitValidation;
  }

  fs::create_directories(cfg.out_dir);
  Rng master(cfg.seeds.front());
  Rng prbs = master.spawn(100);
  const std::uint64_t env_seed = master.spawn(101).next_u64();

  env::TwoTankEnv env(cfg.env_cfg, env_seed);
  env::ExcitationConfig excfg = cfg.collect;
  excfg.pe_order = 2 * cfg.hankel_order + 1;

  behavior::Trajectory traj;
  try {
    traj = env::collect_excitation(env, excfg, prbs);
  } catch (const std::exception& ex) {
    std::cerr << "collect: " << ex.what() << "\n";
    std::ofstream report(fs::path(cfg.out_dir) / "pe_report.txt");
    report << "required_order " << excfg.pe_order << "\nstatus FAIL\nreason "
           << ex.what() << "\n";
    return kExitVerification;
  }

  const std::string traj_path =
      (fs::path(cfg.out_dir) / "excitation.csv").string();
  traj.save_csv(traj_path);

  const behavior::PeReport rep =
      behavior::pe_report(std::span<const double>(traj.u), excfg.pe_order);
  std::ofstream report(fs::path(cfg.out_dir) / "pe_report.txt");
  report << "required_order " << rep.order << "\n"
         << "rank " << rep.rank << "\n"
         << "sigma_max " << rep.sigma_max << "\n"
         << "sigma_min " << rep.sigma_min << "\n"
         << "margin " << (rep.sigma_max > 0 ? rep.sigma_min / rep.sigma_max : 0.0)
         << "\n"
         << "status " << (rep.pass ? "PASS" : "FAIL") << "\n";
  std::cout << "collect: wrote " << traj.size() << " samples to " << traj_path
            << " (PE order " << rep.order << ", rank " << rep.rank << ")\n";
  return rep.pass ? kExitOk : kExitVerification;
}

int run_train(const RunConfig& cfg) {
  try {
    cfg.validate();
  } catch (const ConfigError& ex) {
    std::cerr << ex.what() << "\n";
    return kExitValidation;
  }

  const std::string traj_path = cfg.resolved_trajectory_path();
  if (!fs::exists(traj_path)) {
    std::cerr << "train: trajectory file not found: " << traj_path
              << " (run `collect` first or set train.trajectory)\n";
    return kExitValidation;
  }

  behavior::Trajectory traj;
  try {
    traj = behavior::Trajectory::load_csv(traj_path);
  } catch (const std::exception& ex) {
    std::cerr << "train: " << ex.what() << "\n";
    return kExitValidation;
  }

  std::unique_ptr<behavior::HankelModel> model;
  try {
    model = std::make_unique<behavior::HankelModel>(traj, cfg.hankel_order,
                                                    cfg.hankel_ridge);
  } catch (const std::exception& ex) {
    std::cerr << "train: " << ex.what() << "\n";
    return kExitVerification;
  }

  fs::create_directories(cfg.out_dir);
  cfg.save_snapshot((fs::path(cfg.out_dir) / "config.snapshot").string());

  rl::TrainSetup setup;
  setup.env = cfg.env_cfg;
  setup.episode = cfg.episode;
  setup.q = cfg.q;
  setup.td3 = cfg.td3;
  setup.episodes = cfg.episodes;
  setup.seeds = cfg.seeds;
  setup.baseline = cfg.baseline;
  setup.out_dir = cfg.out_dir;

  const rl::TrainResult result = rl::train(setup, *model);
  int aborted = 0;
  for (const auto& sr : result.seeds) aborted += sr.aborted_episodes;
  std::cout << "train: " << result.seeds.size() << " seeds x " << cfg.episodes
            << " episodes done (" << aborted << " aborted episodes); run dir "
            << cfg.out_dir << "\n";
  return kExitOk;
}

int run_verify(const RunConfig& cfg) {
  (void)cfg;
  const std::vector<verify::SuiteResult> results = verify::run_all(42);
  bool all_pass = true;
  std::printf("%-42s %-12s %-10s %s\n", "suite", "max error", "tolerance",
              "status");
  for (const auto& r : results) {
    std::printf("%-42s %-12.3e %-10.0e %s   (%s)\n", r.name.c_str(),
                r.max_error, r.tolerance, r.pass ? "PASS" : "FAIL",
                r.detail.c_str());
    all_pass = all_pass && r.pass;
  }
  return all_pass ? kExitOk : kExitVerification;
}

}  // namespace ykrl::cli
