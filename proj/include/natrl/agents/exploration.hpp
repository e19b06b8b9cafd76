#pragma once

#include <span>

#include "natrl/agents/tabular.hpp"
#include "natrl/core/random.hpp"

namespace natrl {

// With probability epsilon a uniform action, otherwise the greedy one
// (lowest id on ties). Always consumes one uniform draw, plus one more when
// exploring.
inline int epsilon_greedy(std::span<const double> q_values, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ContractViolation("epsilon_greedy: epsilon must lie in [0, 1]");
  if (rng.uniform() < epsilon) return rng.uniform_index(static_cast<int>(q_values.size()));
  return greedy_action(q_values);
}

}  // namespace natrl
