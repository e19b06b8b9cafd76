#pragma once

// PPO with the clipped surrogate objective
//   L = mean_t min(rho_t * A_t, clip(rho_t, 1 - eps, 1 + eps) * A_t),
//   rho_t = pi(A_t|S_t) / pi_old(A_t|S_t),
// maximized by several epochs of minibatch gradient ascent per rollout.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "natrl/agents/policy.hpp"

namespace natrl {

struct PpoSample {
  std::vector<double> state;
  int action = 0;
  double old_prob = 0.0;  // pi_old(action | state) at collection time
  double advantage = 0.0;
};

struct PpoParams {
  double epsilon = 0.2;
  int epochs = 4;
  std::size_t minibatch = 32;
  double alpha = 0.01;
};

inline double clipped_surrogate(double ratio, double advantage, double epsilon) {
  return std::min(ratio * advantage, std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon) * advantage);
}

inline void check_old_prob(const PpoSample& s) {
  if (!(s.old_prob > 0.0)) throw ContractViolation("ppo: stored pi_old probability must be > 0");
}

inline double ppo_objective(const SoftmaxPolicy& policy, std::span<const PpoSample> batch, double epsilon) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : batch) {
    check_old_prob(s);
    const double ratio = policy.probs(s.state)[static_cast<std::size_t>(s.action)] / s.old_prob;
    total += clipped_surrogate(ratio, s.advantage, epsilon);
  }
  return total / static_cast<double>(batch.size());
}

// Gradient of ppo_objective. A term contributes A * rho * grad log pi unless
// the clip is active on the side that binds the min (A > 0 and rho > 1+eps,
// or A < 0 and rho < 1-eps), where its gradient is zero.
inline ParamVector ppo_gradient(const SoftmaxPolicy& policy, std::span<const PpoSample> batch, double epsilon) {
  ParamVector grad(policy.net().num_params(), 0.0);
  if (batch.empty()) return grad;
  for (const auto& s : batch) {
    check_old_prob(s);
    const auto p = policy.probs(s.state);
    const double ratio = p[static_cast<std::size_t>(s.action)] / s.old_prob;
    const bool clipped = (s.advantage > 0.0 && ratio > 1.0 + epsilon) || (s.advantage < 0.0 && ratio < 1.0 - epsilon);
    if (clipped || s.advantage == 0.0) continue;
    // d rho / d logits = rho * (onehot(a) - p)
    std::vector<double> g(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) g[k] = -p[k] * ratio * s.advantage;
    g[static_cast<std::size_t>(s.action)] += ratio * s.advantage;
    policy.net().backward(s.state, g, grad);
  }
  for (auto& v : grad) v /= static_cast<double>(batch.size());
  return grad;
}

inline void ppo_clipped_step(SoftmaxPolicy& policy, std::span<const PpoSample> rollout, const PpoParams& params, Rng& rng) {
  if (params.minibatch == 0 || params.epochs < 0) throw ContractViolation("ppo: invalid minibatch or epochs");
  for (const auto& s : rollout) check_old_prob(s);
  std::vector<std::size_t> order(rollout.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<PpoSample> mb;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += params.minibatch) {
      const std::size_t end = std::min(order.size(), start + params.minibatch);
      mb.clear();
      for (std::size_t i = start; i < end; ++i) mb.push_back(rollout[order[i]]);
      policy.net().add_scaled(ppo_gradient(policy, mb, params.epsilon), params.alpha);
    }
  }
}

}  // namespace natrl
