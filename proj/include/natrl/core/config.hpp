#pragma once

#include <string>

#include "natrl/core/errors.hpp"

namespace natrl {

enum class EnvKind { kClassify, kLocalize, kCatcher };
enum class Split { kTrain, kTest };

inline const char* split_name(Split s) { return s == Split::kTrain ? "train" : "test"; }

inline Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  throw ConfigError("unknown split '" + s + "' (expected train or test)");
}

struct EnvConfig {
  EnvKind kind = EnvKind::kClassify;
  int window = 5;      // w, pixels per grid cell
  int max_steps = 20;  // M
  Split split = Split::kTrain;
  std::string wrappers;  // comma-separated chain, innermost first
  double gamma = 0.99;

  void validate() const {
    if (window < 1) throw ConfigError("window must be >= 1");
    if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  }
};

}  // namespace natrl
