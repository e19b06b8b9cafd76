#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "natrl/core/errors.hpp"
#include "natrl/core/observation.hpp"
#include "natrl/core/random.hpp"

namespace natrl {

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool terminal = false;
};

struct Transition {
  Observation obs;
  int action = 0;
  double reward = 0.0;
  Observation next_obs;
  bool terminal = false;

  bool operator==(const Transition&) const = default;
};

// Single-threaded episodic environment. Environments draw all of their
// randomness from the SeedTree passed to reset(); wrappers forward the same
// tree inward and take their own stream from a labelled child.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Observation reset(const SeedTree& seed) = 0;
  virtual StepResult step(int action) = 0;

  virtual int num_actions() const = 0;
  virtual Shape observation_shape() const = 0;
  virtual bool done() const = 0;
  virtual std::string name() const = 0;
};

// Base for observation/action wrappers; forwards everything by default.
class EnvWrapper : public Environment {
 public:
  explicit EnvWrapper(std::unique_ptr<Environment> inner) : inner_(std::move(inner)) {
    if (!inner_) throw ContractViolation("EnvWrapper: null inner environment");
  }

  Observation reset(const SeedTree& seed) override { return inner_->reset(seed); }
  StepResult step(int action) override { return inner_->step(action); }
  int num_actions() const override { return inner_->num_actions(); }
  Shape observation_shape() const override { return inner_->observation_shape(); }
  bool done() const override { return inner_->done(); }

  Environment& inner() { return *inner_; }
  const Environment& inner() const { return *inner_; }

 protected:
  std::unique_ptr<Environment> inner_;
};

// G = sum_k gamma^k r_k, accumulated back to front.
inline double compute_return(std::span<const double> rewards, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::domain_error("compute_return: gamma must lie in [0, 1), got " + std::to_string(gamma));
  }
  double g = 0.0;
  for (auto it = rewards.rbegin(); it != rewards.rend(); ++it) g = *it + gamma * g;
  return g;
}

// Per-step returns G_t for every t in one backward pass.
inline std::vector<double> discounted_returns(std::span<const double> rewards, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::domain_error("discounted_returns: gamma must lie in [0, 1)");
  }
  std::vector<double> out(rewards.size());
  double g = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    g = rewards[i] + gamma * g;
    out[i] = g;
  }
  return out;
}

using Policy = std::function<int(const Observation&, Rng&)>;

// Rolls out one episode. The environment is reset with seed/"env" and the
// policy draws from seed/"policy", so (env, policy, seed) fixes every byte.
inline std::vector<Transition> run_episode(Environment& env, const Policy& policy, const SeedTree& seed,
                                           int max_steps) {
  std::vector<Transition> trajectory;
  Observation obs = env.reset(seed.derive("env", 0));
  Rng rng = seed.derive("policy", 0).stream();
  const int n_actions = env.num_actions();
  while (static_cast<int>(trajectory.size()) < max_steps && !env.done()) {
    const int action = policy(obs, rng);
    if (action < 0 || action >= n_actions) {
      throw ContractViolation("run_episode: policy returned action " + std::to_string(action) +
                              " outside [0, " + std::to_string(n_actions) + ")");
    }
    StepResult r = env.step(action);
    if (!std::isfinite(r.reward)) throw ContractViolation("run_episode: non-finite reward");
    trajectory.push_back(Transition{std::move(obs), action, r.reward, r.obs, r.terminal});
    obs = std::move(r.obs);
    if (r.terminal) break;
  }
  return trajectory;
}

inline std::vector<double> rewards_of(const std::vector<Transition>& trajectory) {
  std::vector<double> r;
  r.reserve(trajectory.size());
  for (const auto& t : trajectory) r.push_back(t.reward);
  return r;
}

}  // namespace natrl
