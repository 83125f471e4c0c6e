#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "ykrl/cli/commands.hpp"

namespace ykrl::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

/// Type-7 (linear interpolation) quantile of a sorted vector.
double quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::runtime_error("export: empty sample");
  if (sorted.size() == 1) return sorted[0];
  const double h = p * (static_cast<double>(sorted.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = h - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

struct RewardTable {
  // episode -> rewards across seeds
  std::map<int, std::vector<double>> by_episode;
  std::vector<std::uint64_t> seeds;
};

RewardTable read_rewards(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("export: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "episode,cumulative_reward,seed")
    throw std::runtime_error("export: bad rewards.csv header in " +
                             path.string());
  RewardTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 3)
      throw std::runtime_error("export: malformed rewards row: " + line);
    const int ep = std::stoi(cells[0]);
    table.by_episode[ep].push_back(std::stod(cells[1]));
    const std::uint64_t seed = std::stoull(cells[2]);
    if (std::find(table.seeds.begin(), table.seeds.end(), seed) ==
        table.seeds.end())
      table.seeds.push_back(seed);
  }
  if (table.by_episode.empty())
    throw std::runtime_error("export: rewards.csv has no data rows");
  return table;
}

constexpr int kOccupancyBins = 20;

}  // namespace

int run_export(const std::string& run_dir) {
  try {
    const fs::path dir(run_dir);
    if (!fs::is_directory(dir)) {
      std::cerr << "export: not a run directory: " << run_dir << "\n";
      return kExitValidation;
    }
    const RewardTable rewards = read_rewards(dir / "rewards.csv");

    {
      std::ofstream out(dir / "rewards_median_iqr.csv");
      out << "episode,median,q25,q75\n";
      char buf[160];
      for (const auto& [ep, values] : rewards.by_episode) {
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g,%.10g", ep,
                      quantile(sorted, 0.5), quantile(sorted, 0.25),
                      quantile(sorted, 0.75));
        out << buf << "\n";
      }
    }

    // Rollout logs carry the level in percent of span.
    const double level_span = 100.0;

    {
      std::ofstream out(dir / "occupancy.csv");
      out << "episode,output_bin,mean_time\n";
      char buf[160];
      for (const auto& [ep, values] : rewards.by_episode) {
        (void)values;
        std::vector<double> mean_count(kOccupancyBins, 0.0);
        int seeds_found = 0;
        for (const std::uint64_t seed : rewards.seeds) {
          const fs::path rollout = dir / ("seed_" + std::to_string(seed)) /
                                   ("rollout_" + std::to_string(ep) + ".csv");
          if (!fs::exists(rollout)) continue;
          ++seeds_found;
          std::ifstream in(rollout);
          std::string line;
          std::getline(in, line);  // header
          while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto cells = split_csv(line);
            if (cells.size() < 4)
              throw std::runtime_error("export: malformed rollout row in " +
                                       rollout.string());
            const double m = std::stod(cells[3]);
            int bin = static_cast<int>(m / level_span * kOccupancyBins);
            bin = std::clamp(bin, 0, kOccupancyBins - 1);
            mean_count[static_cast<std::size_t>(bin)] += 1.0;
          }
        }
        if (seeds_found == 0) continue;
        for (int b = 0; b < kOccupancyBins; ++b) {
          const double center = (b + 0.5) * level_span / kOccupancyBins;
          std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g", ep, center,
                        mean_count[static_cast<std::size_t>(b)] / seeds_found);
          out << buf << "\n";
        }
      }
    }

    {
      const int last_ep = rewards.by_episode.rbegin()->first;
      const fs::path sample =
          dir / ("seed_" + std::to_string(rewards.seeds.front())) /
          ("rollout_" + std::to_string(last_ep) + ".csv");
      if (fs::exists(sample))
        fs::copy_file(sample, dir / "rollout_sample.csv",
                      fs::copy_options::overwrite_existing);
    }

    std::cout << "export: wrote rewards_median_iqr.csv, occupancy.csv, "
                 "rollout_sample.csv in "
              << run_dir << "\n";
    return kExitOk;
  } catch (const std::exception& ex) {
    std::cerr << "export: " << ex.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace ykrl::cli
