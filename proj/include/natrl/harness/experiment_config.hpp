#pragma once

// Experiment configuration: a flat `key = value` file plus `--key=value`
// overrides. Every key has a documented default; unknown keys are errors.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "natrl/core/errors.hpp"

namespace natrl {

// name -> default value. Ordered so the echoed configuration is stable.
inline const std::map<std::string, std::string>& config_defaults() {
  static const std::map<std::string, std::string> defaults = {
      // environment
      {"env", "catcher"},
      {"dataset", ""},
      {"data_dir", ""},
      {"train_images", ""},
      {"train_labels", ""},
      {"test_images", ""},
      {"test_labels", ""},
      {"train_files", ""},
      {"test_files", ""},
      {"dataset_limit", "0"},
      {"window", "5"},
      {"max_steps", "auto"},
      {"num_classes", "0"},
      {"synth_samples", "64"},
      {"synth_height", "64"},
      {"synth_width", "64"},
      {"synth_classes", "8"},
      {"synth_objects", "2"},
      {"catcher_size", "21"},
      {"catcher_paddle", "3"},
      {"wrappers", ""},
      {"clip_dir", ""},
      {"clip_split", "disjoint"},
      {"resize_height", "84"},
      {"resize_width", "84"},
      {"skip_repeat", "4"},
      {"sticky_p", "0.25"},
      {"stack_k", "4"},
      {"gauss_mean", "128"},
      {"gauss_std", "32"},
      // agent
      {"algorithm", "q_tabular"},
      {"approximator", "linear"},
      {"hidden", "32"},
      {"init_scale", "0.1"},
      {"state_encoder", "auto"},
      {"feature_scale", "0.00392156862745098"},
      {"alpha", "0.1"},
      {"alpha_critic", "0.01"},
      {"gamma", "0.99"},
      {"epsilon", "0.1"},
      {"batch", "32"},
      {"replay_capacity", "10000"},
      {"learning_starts", "100"},
      {"target_interval", "100"},
      {"a2c_actors", "4"},
      {"ppo_epsilon", "0.2"},
      {"ppo_epochs", "4"},
      {"ppo_minibatch", "32"},
      {"ppo_rollout_episodes", "8"},
      // run
      {"seeds", "0"},
      {"episodes", "100"},
      {"step_budget", "0"},
      {"eval_interval", "0"},
      {"eval_episodes", "100"},
      {"eval_split", "test"},
      {"final_window", "100"},
      {"out_dir", "runs"},
      {"log_wall_clock", "false"},
      {"probe_threshold", "0.05"},
      {"checkpoint", ""},
  };
  return defaults;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return v;
}

}  // namespace detail

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct ExperimentConfig {
  std::map<std::string, std::string> values = config_defaults();

  static bool known(const std::string& key) { return config_defaults().count(key) != 0; }

  void set(const std::string& key, const std::string& value) {
    if (!known(key)) throw ConfigError("unknown config key '" + key + "'");
    values[key] = detail::trim(value);
  }

  const std::string& str(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw ConfigError("unknown config key '" + key + "'");
    return it->second;
  }

  long long integer(const std::string& key) const { return detail::parse_number<long long>(key, str(key)); }
  std::uint64_t count(const std::string& key) const { return detail::parse_number<std::uint64_t>(key, str(key)); }
  double real(const std::string& key) const { return detail::parse_number<double>(key, str(key)); }
  bool flag(const std::string& key) const {
    const auto& v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
  }
  std::vector<std::string> list(const std::string& key) const { return split_list(str(key)); }

  std::vector<std::uint64_t> seeds() const {
    std::vector<std::uint64_t> out;
    for (const auto& s : list("seeds")) out.push_back(detail::parse_number<std::uint64_t>("seeds", s));
    if (out.empty()) throw ConfigError("config key 'seeds' is empty");
    return out;
  }

  std::filesystem::path out_dir() const { return str("out_dir"); }

  // Text form that parse_config_text reads back to the same values.
  std::string to_text() const {
    std::string out;
    for (const auto& [k, v] : values) out += k + " = " + v + "\n";
    return out;
  }
};

// `key = value` lines; '#' starts a comment; blank lines ignored.
inline ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "config") {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    try {
      cfg.set(key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

inline ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

// Applies `--key=value` arguments in order.
inline void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& args) {
  for (const auto& arg : args) {
    if (arg.rfind("--", 0) != 0 || arg.find('=') == std::string::npos) {
      throw ConfigError("override '" + arg + "' is not of the form --key=value");
    }
    const auto eq = arg.find('=');
    cfg.set(arg.substr(2, eq - 2), arg.substr(eq + 1));
  }
}

}  // namespace natrl
