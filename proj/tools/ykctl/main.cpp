#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "ykrl/cli/commands.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
  int episodes = -1;
  bool baseline = false;
  bool no_noise = false;
};

ykrl::cli::RunConfig resolve(const CommonArgs& args) {
  ykrl::cli::RunConfig cfg;
  if (!args.config_path.empty())
    cfg = ykrl::cli::RunConfig::load(args.config_path);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (!args.seeds.empty()) cfg.seeds = args.seeds;
  if (args.episodes >= 0) cfg.episodes = args.episodes;
  if (args.baseline) cfg.baseline = true;
  if (args.no_noise) cfg.env_cfg.noise = false;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "config file (key = value)");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seeds, "seed list")->delimiter(',');
  cmd->add_option("--episodes", args.episodes, "training episodes");
  cmd->add_flag("--baseline", args.baseline,
                "use the unconstrained comparison actor");
  cmd->add_flag("--no-noise", args.no_noise, "disable measurement noise");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven Youla-Kucera RL control"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string export_dir;

  CLI::App* collect =
      app.add_subcommand("collect", "run the excitation experiment");
  add_common(collect, args);
  CLI::App* train = app.add_subcommand("train", "TD3 training on the tank");
  add_common(train, args);
  CLI::App* verify = app.add_subcommand("verify", "oracle and property suites");
  add_common(verify, args);
  CLI::App* exp = app.add_subcommand("export", "plot-ready CSVs from a run");
  exp->add_option("run_dir", export_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (collect->parsed()) return ykrl::cli::run_collect(resolve(args));
    if (train->parsed()) return ykrl::cli::run_train(resolve(args));
    if (verify->parsed()) return ykrl::cli::run_verify(resolve(args));
    if (exp->parsed()) return ykrl::cli::run_export(export_dir);
  } catch (const ykrl::cli::ConfigError& ex) {
    std::cerr << ex.what() << "\n";
    return ykrl::cli::kExitValidation;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
