#pragma once

// Semi-gradient TD control for parameterized Q functions, and DQN (frozen
// target network plus experience replay).

#include <vector>

#include "natrl/agents/approximator.hpp"
#include "natrl/agents/replay.hpp"
#include "natrl/agents/tabular.hpp"

namespace natrl {

// r + gamma * max_a Q(s', a; target) unless terminal.
inline double td_target(const Approximator& target, const Experience& e, double gamma) {
  if (e.terminal) return e.reward;
  return e.reward + gamma * max_value(target.forward(e.next_state));
}

// w += alpha * (r + gamma * max_a Q(s',a;w) - Q(s,a;w)) * grad_w Q(s,a;w).
// The target is treated as a constant. Returns the TD error.
inline double td_q_gradient_step(Approximator& q, const Experience& e, double alpha, double gamma) {
  const double target = td_target(q, e, gamma);
  const double delta = target - q.forward(e.state)[static_cast<std::size_t>(e.action)];
  q.add_scaled(q.gradient(e.state, e.action), alpha * delta);
  return delta;
}

// Frozen copy w' of the online parameters, refreshed every `sync_interval`
// calls to tick().
class TargetNetwork {
 public:
  TargetNetwork(const Approximator& online, int sync_interval) : net_(online), interval_(sync_interval) {
    if (sync_interval < 1) throw ConfigError("target network: sync interval must be >= 1");
  }

  const Approximator& net() const { return net_; }
  int sync_interval() const { return interval_; }
  int steps_since_sync() const { return since_sync_; }

  void tick(const Approximator& online) {
    if (++since_sync_ >= interval_) sync(online);
  }

  void sync(const Approximator& online) {
    net_ = online;
    since_sync_ = 0;
  }

 private:
  Approximator net_;
  int interval_;
  int since_sync_ = 0;
};

// One DQN update: draw `batch` experiences uniformly (with replacement),
// average delta * grad Q(s,a;w) using targets from w', apply, then advance
// the target network's sync counter. Returns the mean squared TD error.
inline double dqn_step(Approximator& q, TargetNetwork& target, const ReplayBuffer<Experience>& buffer,
                       std::size_t batch, double alpha, double gamma, Rng& rng) {
  if (batch == 0) throw ContractViolation("dqn_step: batch must be >= 1");
  const auto items = buffer.sample(batch, rng);
  ParamVector grad(q.num_params(), 0.0);
  double loss = 0.0;
  for (const Experience* e : items) {
    const double delta = td_target(target.net(), *e, gamma) - q.forward(e->state)[static_cast<std::size_t>(e->action)];
    std::vector<double> g(static_cast<std::size_t>(q.output_dim()), 0.0);
    g[static_cast<std::size_t>(e->action)] = delta;
    q.backward(e->state, g, grad);
    loss += delta * delta;
  }
  q.add_scaled(grad, alpha / static_cast<double>(batch));
  target.tick(q);
  return loss / static_cast<double>(batch);
}

}  // namespace natrl
