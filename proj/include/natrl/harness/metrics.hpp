#pragma once

// Metrics files: one JSON object per line, header first, flushed per line so
// an interrupted run leaves a valid prefix.

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "natrl/core/errors.hpp"
#include "natrl/harness/experiment_config.hpp"

namespace natrl {

inline constexpr int kMetricsFormatVersion = 1;

struct MetricsRow {
  std::uint64_t seed = 0;
  std::string split;  // "train" or "test"
  std::string phase;  // "train" or "eval"
  std::uint64_t episode = 0;
  std::uint64_t steps = 0;  // training steps taken when the row was written
  double ret = 0.0;
  std::uint64_t length = 0;
  bool success = false;
  double wall_ms = 0.0;
};

class MetricsWriter {
 public:
  MetricsWriter(const std::filesystem::path& path, std::uint64_t seed, const ExperimentConfig& cfg, bool wall_clock)
      : out_(path, std::ios::binary | std::ios::trunc), wall_clock_(wall_clock) {
    if (!out_) throw ConfigError("cannot write metrics file '" + path.string() + "'");
    nlohmann::ordered_json header;
    header["format"] = "natrl-metrics";
    header["version"] = kMetricsFormatVersion;
    header["seed"] = seed;
    // Location independent: out_dir is not echoed.
    auto values = cfg.values;
    values.erase("out_dir");
    header["config"] = values;
    write(header);
  }

  void append(const MetricsRow& r) {
    nlohmann::ordered_json j;
    j["seed"] = r.seed;
    j["split"] = r.split;
    j["phase"] = r.phase;
    j["episode"] = r.episode;
    j["steps"] = r.steps;
    j["return"] = r.ret;
    j["length"] = r.length;
    j["success"] = r.success;
    if (wall_clock_) j["wall_ms"] = r.wall_ms;
    write(j);
  }

 private:
  void write(const nlohmann::ordered_json& j) {
    out_ << j.dump() << '\n';
    out_.flush();
  }

  std::ofstream out_;
  bool wall_clock_;
};

struct MetricsFile {
  nlohmann::json header;
  std::vector<nlohmann::json> rows;
};

inline MetricsFile read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metrics file '" + path.string() + "'");
  MetricsFile f;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line);
    if (first) f.header = std::move(j);
    else f.rows.push_back(std::move(j));
    first = false;
  }
  if (first) throw FormatError("metrics file '" + path.string() + "' has no header");
  return f;
}

}  // namespace natrl
