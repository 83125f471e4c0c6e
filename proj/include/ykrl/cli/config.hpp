#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ykrl/env/excitation.hpp"
#include "ykrl/env/tank.hpp"
#include "ykrl/rl/train.hpp"

namespace ykrl::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Full run configuration. Defaults are the working values; a config file
/// overrides them with `key = value` lines (# comments allowed). Unknown keys
/// are rejected, and a resolved snapshot written into each run directory
/// reproduces the run when loaded back.
struct RunConfig {
  env::TwoTankEnv::Config env_cfg;
  rl::EpisodeSchedule episode;
  env::ExcitationConfig collect;
  int hankel_order = 10;
  double hankel_ridge = 1e-6;
  stablenet::QParameter::Options q;
  rl::Td3Config td3;
  int episodes = 30;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  bool baseline = false;
  std::string out_dir = "run";
  std::string trajectory_path;  // empty resolves to <out_dir>/excitation.csv

  /// Defaults overlaid with the file's keys. Throws ConfigError on unknown
  /// keys, bad values or I/O failure.
  static RunConfig load(const std::string& path);

  /// Apply one `key = value` assignment (also used for CLI overrides).
  void set(const std::string& key, const std::string& value);

  /// Every key with its resolved value, sorted; load()ing the snapshot
  /// reproduces this config exactly.
  void save_snapshot(const std::string& path) const;

  void validate() const;

  std::string resolved_trajectory_path() const;
};

}  // namespace ykrl::cli
