#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ykrl/cli/commands.hpp"
#include "ykrl/cli/config.hpp"

using namespace ykrl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

cli::RunConfig tiny_config(const fs::path& out) {
  cli::RunConfig cfg;
  cfg.out_dir = out.string();
  cfg.collect.samples = 260;
  cfg.collect.settle_time = 20.0;
  cfg.hankel_order = 8;
  cfg.episodes = 1;
  cfg.seeds = {1};
  cfg.episode.steps = 50;
  cfg.episode.switch_step = 25;
  cfg.td3.warmup_episodes = 0;
  cfg.td3.buffer_capacity = 4096;
  return cfg;
}

int count_rows(const fs::path& csv) {
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::string line;
  int rows = -1;  // discount the header
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  return rows;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config: unknown keys and malformed values are rejected") {
  TempDir tmp("ykrl_cli_cfg");
  const fs::path cfg_path = tmp.path / "bad.cfg";
  {
    std::ofstream out(cfg_path);
    out << "env.tau_p = 2.0\nnot_a_key = 1\n";
  }
  CHECK_THROWS_WITH_AS(cli::RunConfig::load(cfg_path.string()),
                       doctest::Contains("unknown key"), cli::ConfigError);
  {
    std::ofstream out(cfg_path);
    out << "td3.gamma = fast\n";
  }
  CHECK_THROWS_AS(cli::RunConfig::load(cfg_path.string()), cli::ConfigError);
  {
    std::ofstream out(cfg_path);
    out << "td3.gamma 0.9\n";
  }
  CHECK_THROWS_WITH_AS(cli::RunConfig::load(cfg_path.string()),
                       doctest::Contains("key = value"), cli::ConfigError);
  CHECK_THROWS_AS(cli::RunConfig::load("/nonexistent/cfg"), cli::ConfigError);
}

TEST_CASE("config: snapshot round-trips every key") {
  TempDir tmp("ykrl_cli_snap");
  cli::RunConfig cfg;
  cfg.td3.gamma = 0.777;
  cfg.seeds = {3, 9, 27};
  cfg.baseline = true;
  cfg.env_cfg.tank.tau_p = 1.75;
  cfg.trajectory_path = "somewhere/traj.csv";

  const fs::path snap = tmp.path / "config.snapshot";
  cfg.save_snapshot(snap.string());
  const cli::RunConfig loaded = cli::RunConfig::load(snap.string());
  CHECK(loaded.td3.gamma == cfg.td3.gamma);
  CHECK(loaded.seeds == cfg.seeds);
  CHECK(loaded.baseline == cfg.baseline);
  CHECK(loaded.env_cfg.tank.tau_p == cfg.env_cfg.tank.tau_p);
  CHECK(loaded.trajectory_path == cfg.trajectory_path);

  // Snapshot of the snapshot is byte-identical.
  const fs::path snap2 = tmp.path / "config2.snapshot";
  loaded.save_snapshot(snap2.string());
  CHECK(read_all(snap) == read_all(snap2));
}

TEST_CASE("config: validation catches out-of-range values") {
  cli::RunConfig cfg;
  cfg.td3.gamma = 1.5;
  CHECK_THROWS_AS(cfg.validate(), cli::ConfigError);
  cfg = cli::RunConfig{};
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), cli::ConfigError);
}

TEST_CASE("collect: zero amplitude exits with the verification code") {
  TempDir tmp("ykrl_cli_collect0");
  cli::RunConfig cfg = tiny_config(tmp.path);
  cfg.collect.amplitude = 0.0;
  CHECK(cli::run_collect(cfg) == cli::kExitVerification);
  CHECK(read_all(tmp.path / "pe_report.txt").find("FAIL") != std::string::npos);
}

TEST_CASE("collect: default run writes the record and a passing PE report") {
  TempDir tmp("ykrl_cli_collect");
  const cli::RunConfig cfg = tiny_config(tmp.path);
  CHECK(cli::run_collect(cfg) == cli::kExitOk);

  const fs::path csv = tmp.path / "excitation.csv";
  CHECK(count_rows(csv) == cfg.collect.samples);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,u,y");

  const std::string report = read_all(tmp.path / "pe_report.txt");
  CHECK(report.find("status PASS") != std::string::npos);
  const std::string required =
      "required_order " + std::to_string(2 * cfg.hankel_order + 1);
  CHECK(report.find(required) != std::string::npos);
  CHECK(report.find("rank " + std::to_string(2 * cfg.hankel_order + 1)) !=
        std::string::npos);
}

TEST_CASE("train: missing trajectory file is a validation failure") {
  TempDir tmp("ykrl_cli_train_missing");
  const cli::RunConfig cfg = tiny_config(tmp.path);
  CHECK(cli::run_train(cfg) == cli::kExitValidation);
}

TEST_CASE("end to end: collect, train, export") {
  TempDir tmp("ykrl_cli_e2e");
  cli::RunConfig cfg = tiny_config(tmp.path);
  cfg.seeds = {1, 2};
  cfg.episodes = 2;
  REQUIRE(cli::run_collect(cfg) == cli::kExitOk);
  REQUIRE(cli::run_train(cfg) == cli::kExitOk);

  // rewards.csv has seeds x episodes rows.
  CHECK(count_rows(tmp.path / "rewards.csv") == 4);
  CHECK(fs::exists(tmp.path / "config.snapshot"));
  CHECK(fs::exists(tmp.path / "seed_1" / "rollout_0.csv"));
  CHECK(fs::exists(tmp.path / "seed_1" / "rollout_eval.csv"));
  CHECK(fs::exists(tmp.path / "seed_2" / "checkpoint_1.ckpt"));
  CHECK(count_rows(tmp.path / "seed_1" / "rollout_0.csv") == cfg.episode.steps);

  REQUIRE(cli::run_export(cfg.out_dir) == cli::kExitOk);
  CHECK(count_rows(tmp.path / "rewards_median_iqr.csv") == cfg.episodes);
  CHECK(fs::exists(tmp.path / "rollout_sample.csv"));

  // Occupancy conserves time: per episode, mean bin counts sum to steps.
  std::ifstream occ(tmp.path / "occupancy.csv");
  std::string line;
  std::getline(occ, line);
  CHECK(line == "episode,output_bin,mean_time");
  std::map<int, double> sums;
  while (std::getline(occ, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string ep, bin, val;
    std::getline(ss, ep, ',');
    std::getline(ss, bin, ',');
    std::getline(ss, val, ',');
    sums[std::stoi(ep)] += std::stod(val);
  }
  REQUIRE(sums.size() == 2);
  for (const auto& [ep, total] : sums)
    CHECK(total == doctest::Approx(cfg.episode.steps).epsilon(1e-9));

  // Re-running export is idempotent.
  const std::string before = read_all(tmp.path / "rewards_median_iqr.csv");
  REQUIRE(cli::run_export(cfg.out_dir) == cli::kExitOk);
  CHECK(read_all(tmp.path / "rewards_median_iqr.csv") == before);
}

TEST_CASE("export: quantiles match a hand-computed three-seed fixture") {
  TempDir tmp("ykrl_cli_export_fixture");
  {
    std::ofstream out(tmp.path / "rewards.csv");
    out << "episode,cumulative_reward,seed\n";
    out << "0,-3.0,1\n0,-1.0,2\n0,-2.0,3\n";
    out << "1,-5.0,1\n1,-5.0,2\n1,-8.0,3\n";
  }
  REQUIRE(cli::run_export(tmp.path.string()) == cli::kExitOk);
  std::ifstream in(tmp.path / "rewards_median_iqr.csv");
  std::string header, row0, row1;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  // Sorted [-3,-2,-1]: median -2, q25 = -2.5, q75 = -1.5 (type-7).
  CHECK(row0 == "0,-2,-2.5,-1.5");
  // Sorted [-8,-5,-5]: median -5, q25 = -6.5, q75 = -5.
  CHECK(row1 == "1,-5,-6.5,-5");
}

TEST_CASE("export: single seed degenerates to the series itself") {
  TempDir tmp("ykrl_cli_export_single");
  {
    std::ofstream out(tmp.path / "rewards.csv");
    out << "episode,cumulative_reward,seed\n0,-4.25,7\n1,-1.5,7\n";
  }
  REQUIRE(cli::run_export(tmp.path.string()) == cli::kExitOk);
  std::ifstream in(tmp.path / "rewards_median_iqr.csv");
  std::string header, row0, row1;
  std::getline(in, header);
  std::getline(in, row0);
  std::getline(in, row1);
  CHECK(row0 == "0,-4.25,-4.25,-4.25");
  CHECK(row1 == "1,-1.5,-1.5,-1.5");
}

TEST_CASE("export: a directory without rewards is rejected") {
  TempDir tmp("ykrl_cli_export_bad");
  CHECK(cli::run_export(tmp.path.string()) == cli::kExitValidation);
  CHECK(cli::run_export((tmp.path / "missing").string()) ==
        cli::kExitValidation);
}

TEST_CASE("determinism: identical configs reproduce rewards.csv bytes") {
  TempDir tmp_a("ykrl_cli_repro_a");
  TempDir tmp_b("ykrl_cli_repro_b");
  cli::RunConfig cfg_a = tiny_config(tmp_a.path);
  REQUIRE(cli::run_collect(cfg_a) == cli::kExitOk);
  REQUIRE(cli::run_train(cfg_a) == cli::kExitOk);

  // Replay from the snapshot into a second directory.
  cli::RunConfig cfg_b =
      cli::RunConfig::load((tmp_a.path / "config.snapshot").string());
  cfg_b.out_dir = tmp_b.path.string();
  REQUIRE(cli::run_collect(cfg_b) == cli::kExitOk);
  REQUIRE(cli::run_train(cfg_b) == cli::kExitOk);

  CHECK(read_all(tmp_a.path / "excitation.csv") ==
        read_all(tmp_b.path / "excitation.csv"));
  CHECK(read_all(tmp_a.path / "rewards.csv") ==
        read_all(tmp_b.path / "rewards.csv"));
  CHECK(read_all(tmp_a.path / "seed_1" / "rollout_eval.csv") ==
        read_all(tmp_b.path / "seed_1" / "rollout_eval.csv"));
}

TEST_CASE("ykctl binary: subcommand smoke test") {
  TempDir tmp("ykrl_cli_bin");
  const std::string bin = YKCTL_BIN;
  const fs::path cfg_path = tmp.path / "run.cfg";
  cli::RunConfig cfg = tiny_config(tmp.path / "out");
  cfg.save_snapshot(cfg_path.string());

  const std::string collect_cmd =
      bin + " collect --config " + cfg_path.string() + " >/dev/null 2>&1";
  CHECK(std::system(collect_cmd.c_str()) == 0);
  CHECK(fs::exists(tmp.path / "out" / "excitation.csv"));

  const std::string bad_cmd = bin + " collect --config /nonexistent/f.cfg "
                                    ">/dev/null 2>&1";
  const int rc = std::system(bad_cmd.c_str());
  CHECK(WEXITSTATUS(rc) == cli::kExitValidation);
}
