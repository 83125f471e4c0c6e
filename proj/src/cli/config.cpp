#include "ykrl/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ykrl::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return static_cast<int>(x);
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: bad boolean value for " + key + ": '" + v + "'");
}

std::vector<std::uint64_t> parse_seeds(const std::string& key,
                                       const std::string& v) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw ConfigError("config: bad seed list for " + key + ": '" + v + "'");
    }
  }
  if (out.empty()) throw ConfigError("config: empty seed list for " + key);
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Entry {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define YKRL_DOUBLE_KEY(key, field)                                       \
  Entry{[](RunConfig& c, const std::string& v) {                           \
          c.field = parse_double(key, v);                                  \
        },                                                                 \
        [](const RunConfig& c) { return fmt_double(c.field); }}
#define YKRL_INT_KEY(key, field)                                           \
  Entry{[](RunConfig& c, const std::string& v) {                           \
          c.field = parse_int(key, v);                                     \
        },                                                                 \
        [](const RunConfig& c) { return std::to_string(c.field); }}
#define YKRL_BOOL_KEY(key, field)                                          \
  Entry{[](RunConfig& c, const std::string& v) {                           \
          c.field = parse_bool(key, v);                                    \
        },                                                                 \
        [](const RunConfig& c) { return c.field ? "true" : "false"; }}
#define YKRL_STRING_KEY(key, field)                                        \
  Entry{[](RunConfig& c, const std::string& v) { c.field = v; },           \
        [](const RunConfig& c) { return c.field; }}

const std::map<std::string, Entry>& schema() {
  static const std::map<std::string, Entry> table = {
      {"env.tau_p", YKRL_DOUBLE_KEY("env.tau_p", env_cfg.tank.tau_p)},
      {"env.tau_in", YKRL_DOUBLE_KEY("env.tau_in", env_cfg.tank.tau_in)},
      {"env.tau_out", YKRL_DOUBLE_KEY("env.tau_out", env_cfg.tank.tau_out)},
      {"env.tau_m", YKRL_DOUBLE_KEY("env.tau_m", env_cfg.tank.tau_m)},
      {"env.r_tank", YKRL_DOUBLE_KEY("env.r_tank", env_cfg.tank.r_tank)},
      {"env.r_pipe", YKRL_DOUBLE_KEY("env.r_pipe", env_cfg.tank.r_pipe)},
      {"env.f_c", YKRL_DOUBLE_KEY("env.f_c", env_cfg.tank.f_c)},
      {"env.f_max", YKRL_DOUBLE_KEY("env.f_max", env_cfg.tank.f_max)},
      {"env.gravity", YKRL_DOUBLE_KEY("env.gravity", env_cfg.tank.gravity)},
      {"env.dt", YKRL_DOUBLE_KEY("env.dt", env_cfg.tank.dt)},
      {"env.noise_var", YKRL_DOUBLE_KEY("env.noise_var", env_cfg.tank.noise_var)},
      {"env.level_max", YKRL_DOUBLE_KEY("env.level_max", env_cfg.tank.level_max)},
      {"env.substeps", YKRL_INT_KEY("env.substeps", env_cfg.tank.substeps)},
      {"pid.level_kp", YKRL_DOUBLE_KEY("pid.level_kp", env_cfg.level_pid.kp)},
      {"pid.level_ki", YKRL_DOUBLE_KEY("pid.level_ki", env_cfg.level_pid.ki)},
      {"pid.level_kd", YKRL_DOUBLE_KEY("pid.level_kd", env_cfg.level_pid.kd)},
      {"pid.flow_kp", YKRL_DOUBLE_KEY("pid.flow_kp", env_cfg.flow_pid.kp)},
      {"pid.flow_ki", YKRL_DOUBLE_KEY("pid.flow_ki", env_cfg.flow_pid.ki)},
      {"pid.flow_kd", YKRL_DOUBLE_KEY("pid.flow_kd", env_cfg.flow_pid.kd)},
      {"episode.steps", YKRL_INT_KEY("episode.steps", episode.steps)},
      {"episode.level_a", YKRL_DOUBLE_KEY("episode.level_a", episode.level_a)},
      {"episode.level_b", YKRL_DOUBLE_KEY("episode.level_b", episode.level_b)},
      {"episode.switch_step", YKRL_INT_KEY("episode.switch_step", episode.switch_step)},
      {"collect.samples", YKRL_INT_KEY("collect.samples", collect.samples)},
      {"collect.amplitude", YKRL_DOUBLE_KEY("collect.amplitude", collect.amplitude)},
      {"collect.hold_steps", YKRL_INT_KEY("collect.hold_steps", collect.hold_steps)},
      {"collect.setpoint", YKRL_DOUBLE_KEY("collect.setpoint", collect.setpoint)},
      {"collect.settle_time", YKRL_DOUBLE_KEY("collect.settle_time", collect.settle_time)},
      {"hankel.order", YKRL_INT_KEY("hankel.order", hankel_order)},
      {"hankel.ridge", YKRL_DOUBLE_KEY("hankel.ridge", hankel_ridge)},
      {"q.state_dim", YKRL_INT_KEY("q.state_dim", q.state_dim)},
      {"q.fhat_hidden", YKRL_INT_KEY("q.fhat_hidden", q.fhat_hidden)},
      {"q.v_hidden", YKRL_INT_KEY("q.v_hidden", q.v_hidden)},
      {"q.beta", YKRL_DOUBLE_KEY("q.beta", q.beta)},
      {"q.eps", YKRL_DOUBLE_KEY("q.eps", q.eps)},
      {"q.io_scale", YKRL_DOUBLE_KEY("q.io_scale", q.io_scale)},
      {"td3.gamma", YKRL_DOUBLE_KEY("td3.gamma", td3.gamma)},
      {"td3.tau", YKRL_DOUBLE_KEY("td3.tau", td3.tau)},
      {"td3.batch", YKRL_INT_KEY("td3.batch", td3.batch)},
      {"td3.buffer",
       Entry{[](RunConfig& c, const std::string& v) {
               c.td3.buffer_capacity =
                   static_cast<std::size_t>(parse_int("td3.buffer", v));
             },
             [](const RunConfig& c) {
               return std::to_string(c.td3.buffer_capacity);
             }}},
      {"td3.policy_delay", YKRL_INT_KEY("td3.policy_delay", td3.policy_delay)},
      {"td3.explore_noise", YKRL_DOUBLE_KEY("td3.explore_noise", td3.explore_noise)},
      {"td3.explore_floor", YKRL_DOUBLE_KEY("td3.explore_floor", td3.explore_floor)},
      {"td3.target_noise", YKRL_DOUBLE_KEY("td3.target_noise", td3.target_noise)},
      {"td3.target_clip", YKRL_DOUBLE_KEY("td3.target_clip", td3.target_clip)},
      {"td3.actor_lr", YKRL_DOUBLE_KEY("td3.actor_lr", td3.actor_lr)},
      {"td3.critic_lr", YKRL_DOUBLE_KEY("td3.critic_lr", td3.critic_lr)},
      {"td3.warmup_episodes", YKRL_INT_KEY("td3.warmup_episodes", td3.warmup_episodes)},
      {"td3.critic_hidden", YKRL_INT_KEY("td3.critic_hidden", td3.critic_hidden)},
      {"td3.reward_scale", YKRL_DOUBLE_KEY("td3.reward_scale", td3.reward_scale)},
      {"td3.filter_lr_ratio", YKRL_DOUBLE_KEY("td3.filter_lr_ratio", td3.filter_lr_ratio)},
      {"td3.min_reward", YKRL_DOUBLE_KEY("td3.min_reward", td3.min_reward)},
      {"td3.action_limit", YKRL_DOUBLE_KEY("td3.action_limit", td3.action_limit)},
      {"train.episodes", YKRL_INT_KEY("train.episodes", episodes)},
      {"train.seeds",
       Entry{[](RunConfig& c, const std::string& v) {
               c.seeds = parse_seeds("train.seeds", v);
             },
             [](const RunConfig& c) {
               std::string s;
               for (std::size_t i = 0; i < c.seeds.size(); ++i)
                 s += (i ? "," : "") + std::to_string(c.seeds[i]);
               return s;
             }}},
      {"train.trajectory", YKRL_STRING_KEY("train.trajectory", trajectory_path)},
      {"run.out", YKRL_STRING_KEY("run.out", out_dir)},
      {"run.baseline", YKRL_BOOL_KEY("run.baseline", baseline)},
      {"run.noise", YKRL_BOOL_KEY("run.noise", env_cfg.noise)},
  };
  return table;
}

#undef YKRL_DOUBLE_KEY
#undef YKRL_INT_KEY
#undef YKRL_BOOL_KEY
#undef YKRL_STRING_KEY

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& table = schema();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("config: unknown key '" + key + "'");
  it->second.set(*this, value);
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected 'key = value' at " + path + ":" +
                        std::to_string(lineno));
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

void RunConfig::save_snapshot(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("config: cannot write snapshot " + path);
  for (const auto& [key, entry] : schema())
    out << key << " = " << entry.get(*this) << "\n";
  if (!out) throw ConfigError("config: snapshot write failed: " + path);
}

void RunConfig::validate() const {
  if (hankel_order <= 0) throw ConfigError("config: hankel.order must be positive");
  if (hankel_ridge < 0.0) throw ConfigError("config: hankel.ridge must be nonnegative");
  if (episodes < 0) throw ConfigError("config: train.episodes must be nonnegative");
  if (episode.steps <= 0) throw ConfigError("config: episode.steps must be positive");
  if (td3.gamma <= 0.0 || td3.gamma >= 1.0)
    throw ConfigError("config: td3.gamma must lie in (0,1)");
  if (td3.batch <= 0) throw ConfigError("config: td3.batch must be positive");
  if (q.beta <= 0.0 || q.beta >= 1.0)
    throw ConfigError("config: q.beta must lie in (0,1)");
  if (q.eps <= 0.0) throw ConfigError("config: q.eps must be positive");
  if (seeds.empty()) throw ConfigError("config: train.seeds must not be empty");
  if (out_dir.empty()) throw ConfigError("config: run.out must not be empty");
}

std::string RunConfig::resolved_trajectory_path() const {
  if (!trajectory_path.empty()) return trajectory_path;
  return (std::filesystem::path(out_dir) / "excitation.csv").string();
}

}  // namespace ykrl::cli
