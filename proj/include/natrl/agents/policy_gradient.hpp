#pragma once

// Policy-gradient learners: REINFORCE (with and without a learned baseline),
// one-step actor-critic, the synchronous batched A2C update, and the
// single-sample advantage.

#include <span>
#include <vector>

#include "natrl/agents/approximator.hpp"
#include "natrl/agents/policy.hpp"
#include "natrl/core/environment.hpp"

namespace natrl {

struct EpisodeStep {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
};

inline std::vector<double> episode_returns(std::span<const EpisodeStep> episode, double gamma) {
  std::vector<double> r;
  r.reserve(episode.size());
  for (const auto& s : episode) r.push_back(s.reward);
  return discounted_returns(r, gamma);
}

// sum_t weight_t * grad log pi(A_t | S_t), all evaluated at the current theta.
inline ParamVector weighted_score(const SoftmaxPolicy& policy, std::span<const EpisodeStep> episode,
                                  std::span<const double> weights) {
  ParamVector dir(policy.net().num_params(), 0.0);
  for (std::size_t t = 0; t < episode.size(); ++t) {
    if (weights[t] == 0.0) continue;
    const auto g = policy.grad_log_prob(episode[t].state, episode[t].action);
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] += weights[t] * g[i];
  }
  return dir;
}

// theta += alpha * sum_t G_t * grad log pi(A_t | S_t, theta). The gradients
// for every step use the parameters from before the update.
inline void reinforce_step(SoftmaxPolicy& policy, std::span<const EpisodeStep> episode, double alpha, double gamma) {
  const auto returns = episode_returns(episode, gamma);
  policy.net().add_scaled(weighted_score(policy, episode, returns), alpha);
}

inline double advantage_estimate(double return_or_q, double value) { return return_or_q - value; }

// REINFORCE with baseline b(s) = V(s; w):
//   theta += alpha * sum_t (G_t - b(S_t)) grad log pi
//   w     += alpha_baseline * sum_t (G_t - b(S_t)) grad b(S_t)
inline void reinforce_baseline_step(SoftmaxPolicy& policy, Approximator& baseline, std::span<const EpisodeStep> episode,
                                    double alpha, double alpha_baseline, double gamma) {
  if (baseline.output_dim() != 1) throw ContractViolation("reinforce_baseline_step: baseline must be scalar");
  const auto returns = episode_returns(episode, gamma);
  std::vector<double> adv(episode.size());
  ParamVector bgrad(baseline.num_params(), 0.0);
  for (std::size_t t = 0; t < episode.size(); ++t) {
    adv[t] = advantage_estimate(returns[t], baseline.forward(episode[t].state)[0]);
    const double g = adv[t];
    baseline.backward(episode[t].state, std::span<const double>(&g, 1), bgrad);
  }
  policy.net().add_scaled(weighted_score(policy, episode, adv), alpha);
  baseline.add_scaled(bgrad, alpha_baseline);
}

// delta = r + gamma * V(s') * (1 - terminal) - V(s)
inline double td_error(const Approximator& critic, const Experience& e, double gamma) {
  const double next = e.terminal ? 0.0 : critic.forward(e.next_state)[0];
  return e.reward + gamma * next - critic.forward(e.state)[0];
}

// theta += alpha_actor * delta * grad log pi(A|S);  w += alpha_critic * delta * grad V(S).
// Returns delta.
inline double actor_critic_step(SoftmaxPolicy& policy, Approximator& critic, const Experience& e, double alpha_actor,
                                double alpha_critic, double gamma) {
  if (critic.output_dim() != 1) throw ContractViolation("actor_critic_step: critic must be scalar");
  const double delta = td_error(critic, e, gamma);
  if (delta == 0.0) return 0.0;
  const auto score = policy.grad_log_prob(e.state, e.action);
  const auto vgrad = critic.gradient(e.state, 0);
  policy.net().add_scaled(score, alpha_actor * delta);
  critic.add_scaled(vgrad, alpha_critic * delta);
  return delta;
}

// Synchronous A2C: one transition from each of N actors, advantages
// A = r + gamma V(s') - V(s) all computed before any parameter moves, and the
// averaged actor and critic gradients applied once.
inline void a2c_step(SoftmaxPolicy& policy, Approximator& critic, std::span<const Experience> batch, double alpha_actor,
                     double alpha_critic, double gamma) {
  if (batch.empty()) return;
  ParamVector pgrad(policy.net().num_params(), 0.0);
  ParamVector vgrad(critic.num_params(), 0.0);
  for (const auto& e : batch) {
    const double next = e.terminal ? 0.0 : critic.forward(e.next_state)[0];
    const double adv = advantage_estimate(e.reward + gamma * next, critic.forward(e.state)[0]);
    const auto score = policy.grad_log_prob(e.state, e.action);
    for (std::size_t i = 0; i < pgrad.size(); ++i) pgrad[i] += adv * score[i];
    critic.backward(e.state, std::span<const double>(&adv, 1), vgrad);
  }
  const double n = static_cast<double>(batch.size());
  policy.net().add_scaled(pgrad, alpha_actor / n);
  critic.add_scaled(vgrad, alpha_critic / n);
}

}  // namespace natrl
