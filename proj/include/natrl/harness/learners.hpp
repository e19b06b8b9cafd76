#pragma once

// Agents as the harness drives them: act on observations, learn from each
// step, and round-trip through checkpoints.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "natrl/agents/checkpoint.hpp"
#include "natrl/agents/exploration.hpp"
#include "natrl/agents/policy_gradient.hpp"
#include "natrl/agents/ppo.hpp"
#include "natrl/agents/value_learning.hpp"
#include "natrl/envs/catcher.hpp"
#include "natrl/harness/experiment_config.hpp"

namespace natrl {

// Flattened observation values times `scale`, followed by a one-hot of the
// goal class when the environment provides one.
struct FeatureEncoder {
  std::size_t obs_size = 0;
  int goal_classes = 0;
  double scale = 1.0;

  int dim() const { return static_cast<int>(obs_size) + goal_classes; }

  std::vector<double> operator()(const Observation& obs) const {
    if (obs.values.size() != obs_size) {
      throw ContractViolation("features: observation has " + std::to_string(obs.values.size()) +
                              " values, expected " + std::to_string(obs_size));
    }
    std::vector<double> x(static_cast<std::size_t>(dim()), 0.0);
    for (std::size_t i = 0; i < obs_size; ++i) x[i] = scale * obs.values[i];
    if (goal_classes > 0 && obs.goal && *obs.goal >= 0 && *obs.goal < goal_classes) {
      x[obs_size + static_cast<std::size_t>(*obs.goal)] = 1.0;
    }
    return x;
  }
};

// Observation -> table row id for tabular agents.
using StateEncoder = std::function<StateId(const Observation&)>;

inline StateId hash_state(const Observation& obs) {
  std::string bytes(obs.values.size() * sizeof(float) + sizeof(int), '\0');
  std::memcpy(bytes.data(), obs.values.data(), obs.values.size() * sizeof(float));
  const int goal = obs.goal.value_or(-1);
  std::memcpy(bytes.data() + obs.values.size() * sizeof(float), &goal, sizeof(int));
  return fnv1a64(bytes);
}

struct LearnerSpec {
  std::string algorithm;
  int num_actions = 0;
  FeatureEncoder features;
  StateEncoder state_encoder;
  std::string approximator = "linear";
  int hidden = 32;
  double init_scale = 0.1;
  double alpha = 0.1;
  double alpha_critic = 0.1;
  double gamma = 0.99;
  double epsilon = 0.1;
  std::size_t batch = 32;
  std::size_t replay_capacity = 10000;
  std::size_t learning_starts = 100;
  int target_interval = 100;
  int a2c_actors = 4;
  PpoParams ppo;
  int ppo_rollout_episodes = 8;
};

inline const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names = {"q_tabular",    "q_linear", "dqn", "reinforce", "reinforce_baseline",
                                                 "actor_critic", "a2c",      "ppo"};
  return names;
}

class Learner {
 public:
  virtual ~Learner() = default;

  // explore = false selects the greedy action.
  virtual int act(const Observation& obs, Rng& rng, bool explore) = 0;
  virtual void observe(const Observation& obs, int action, double reward, const Observation& next, bool terminal,
                       Rng& rng) = 0;
  // Called once every actor has observed its transition for this step.
  virtual void flush(Rng&) {}
  virtual void end_episode(Rng&) {}
  virtual int actors() const { return 1; }

  virtual Checkpoint checkpoint(std::uint64_t steps) const = 0;
  virtual void load(const Checkpoint& ckpt) = 0;
};

namespace detail {

inline void check_finite(std::span<const double> v, const std::string& what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw ContractViolation(what + " became non-finite; the learning rates are too large for these features");
    }
  }
}

inline Approximator make_net(const LearnerSpec& spec, int outputs) {
  if (spec.approximator == "linear") return Approximator::linear(spec.features.dim(), outputs);
  if (spec.approximator == "mlp") return Approximator::mlp(spec.features.dim(), spec.hidden, outputs);
  throw ConfigError("approximator must be linear or mlp, got '" + spec.approximator + "'");
}

inline Approximator load_net(const Checkpoint& ckpt, const std::string& role, const Approximator& expected) {
  const auto& block = ckpt.get(role);
  const auto* net = std::get_if<Approximator>(&block.model);
  if (!net) throw ConfigError("checkpoint block '" + role + "' is not a parameterized model");
  if (net->kind() != expected.kind() || net->input_dim() != expected.input_dim() ||
      net->hidden_dim() != expected.hidden_dim() || net->output_dim() != expected.output_dim() ||
      net->has_bias() != expected.has_bias()) {
    auto describe = [](const Approximator& a) {
      return std::string(a.kind() == ApproxKind::kLinear ? "linear" : "mlp") + " " + std::to_string(a.input_dim()) +
             "->" + (a.kind() == ApproxKind::kMlp ? std::to_string(a.hidden_dim()) + "->" : "") +
             std::to_string(a.output_dim());
    };
    throw ConfigError("checkpoint block '" + role + "' is " + describe(*net) + " but the configured environment needs " +
                      describe(expected));
  }
  return *net;
}

}  // namespace detail

// Tabular Q-learning. When acting, a state absent from the table is treated
// as the reserved unknown state (id 0), so everything the agent has never
// seen shares one row.
class TabularQLearner : public Learner {
 public:
  explicit TabularQLearner(const LearnerSpec& spec)
      : spec_(spec), table_(spec.num_actions, spec.alpha, spec.gamma) {}

  int act(const Observation& obs, Rng& rng, bool explore) override {
    StateId s = spec_.state_encoder(obs);
    if (!table_.contains(s)) s = kUnknownCatcherState;
    const auto row = table_.row(s);
    return explore ? epsilon_greedy(row, spec_.epsilon, rng) : greedy_action(row);
  }

  void observe(const Observation& obs, int action, double reward, const Observation& next, bool terminal,
               Rng&) override {
    table_.update(spec_.state_encoder(obs), action, reward, terminal ? 0 : spec_.state_encoder(next), terminal);
  }

  Checkpoint checkpoint(std::uint64_t steps) const override {
    Checkpoint c;
    c.blocks.push_back({"q", steps, table_});
    return c;
  }

  void load(const Checkpoint& ckpt) override {
    const auto* t = std::get_if<QTable>(&ckpt.get("q").model);
    if (!t) throw ConfigError("checkpoint block 'q' is not a table");
    if (t->num_actions() != spec_.num_actions) {
      throw ConfigError("checkpoint table has " + std::to_string(t->num_actions()) + " actions, environment has " +
                        std::to_string(spec_.num_actions));
    }
    table_ = QTable(spec_.num_actions, spec_.alpha, spec_.gamma);
    for (StateId s : t->states()) table_.mutable_row(s) = t->row(s);
  }

  const QTable& table() const { return table_; }

 private:
  LearnerSpec spec_;
  QTable table_;
};

// Semi-gradient Q-learning, optionally with replay and a target network (dqn).
class ApproxQLearner : public Learner {
 public:
  ApproxQLearner(const LearnerSpec& spec, Rng& init, bool dqn)
      : spec_(spec), q_(detail::make_net(spec, spec.num_actions)), target_(q_, std::max(1, spec.target_interval)),
        replay_(std::max<std::size_t>(1, spec.replay_capacity)), dqn_(dqn) {
    q_.init_uniform(init, spec.init_scale);
    target_.sync(q_);
    if (dqn && spec.batch == 0) throw ConfigError("dqn: batch must be >= 1");
  }

  int act(const Observation& obs, Rng& rng, bool explore) override {
    const auto q = q_.forward(spec_.features(obs));
    detail::check_finite(q, "Q-values");
    return explore ? epsilon_greedy(q, spec_.epsilon, rng) : greedy_action(q);
  }

  void observe(const Observation& obs, int action, double reward, const Observation& next, bool terminal,
               Rng& rng) override {
    Experience e{spec_.features(obs), action, reward, spec_.features(next), terminal};
    if (!dqn_) {
      td_q_gradient_step(q_, e, spec_.alpha, spec_.gamma);
      return;
    }
    replay_.push(std::move(e));
    if (replay_.size() >= std::max(spec_.batch, spec_.learning_starts)) {
      dqn_step(q_, target_, replay_, spec_.batch, spec_.alpha, spec_.gamma, rng);
    }
  }

  Checkpoint checkpoint(std::uint64_t steps) const override {
    Checkpoint c;
    c.blocks.push_back({"q", steps, q_});
    return c;
  }

  void load(const Checkpoint& ckpt) override {
    q_ = detail::load_net(ckpt, "q", q_);
    target_.sync(q_);
  }

 private:
  LearnerSpec spec_;
  Approximator q_;
  TargetNetwork target_;
  ReplayBuffer<Experience> replay_;
  bool dqn_;
};

// Softmax-policy learners: reinforce, reinforce_baseline, actor_critic, a2c, ppo.
class PolicyLearner : public Learner {
 public:
  PolicyLearner(const LearnerSpec& spec, Rng& init)
      : spec_(spec), policy_(detail::make_net(spec, spec.num_actions)), critic_(detail::make_net(spec, 1)) {
    policy_.net().init_uniform(init, spec.init_scale);
    critic_.init_uniform(init, spec.init_scale);
    if (spec.algorithm == "a2c" && spec.a2c_actors < 1) throw ConfigError("a2c_actors must be >= 1");
    if (spec.algorithm == "ppo" && spec.ppo_rollout_episodes < 1) throw ConfigError("ppo_rollout_episodes must be >= 1");
  }

  int act(const Observation& obs, Rng& rng, bool explore) override {
    const auto x = spec_.features(obs);
    const auto p = policy_.probs(x);
    detail::check_finite(p, "policy probabilities");
    return explore ? sample_categorical(p, rng) : policy_.greedy(x);
  }

  void observe(const Observation& obs, int action, double reward, const Observation& next, bool terminal,
               Rng&) override {
    const std::string& alg = spec_.algorithm;
    if (alg == "actor_critic") {
      actor_critic_step(policy_, critic_, {spec_.features(obs), action, reward, spec_.features(next), terminal},
                        spec_.alpha, spec_.alpha_critic, spec_.gamma);
    } else if (alg == "a2c") {
      pending_.push_back({spec_.features(obs), action, reward, spec_.features(next), terminal});
    } else {
      auto x = spec_.features(obs);
      if (alg == "ppo") old_probs_.push_back(policy_.probs(x)[static_cast<std::size_t>(action)]);
      episode_.push_back({std::move(x), action, reward});
    }
  }

  void flush(Rng&) override {
    if (pending_.empty()) return;
    a2c_step(policy_, critic_, pending_, spec_.alpha, spec_.alpha_critic, spec_.gamma);
    pending_.clear();
  }

  void end_episode(Rng& rng) override {
    const std::string& alg = spec_.algorithm;
    if (alg == "reinforce") {
      reinforce_step(policy_, episode_, spec_.alpha, spec_.gamma);
    } else if (alg == "reinforce_baseline") {
      reinforce_baseline_step(policy_, critic_, episode_, spec_.alpha, spec_.alpha_critic, spec_.gamma);
    } else if (alg == "ppo") {
      collect_ppo_episode();
      if (++rollout_episodes_ >= spec_.ppo_rollout_episodes) ppo_update(rng);
    }
    episode_.clear();
    old_probs_.clear();
  }

  int actors() const override { return spec_.algorithm == "a2c" ? spec_.a2c_actors : 1; }

  Checkpoint checkpoint(std::uint64_t steps) const override {
    Checkpoint c;
    c.blocks.push_back({"policy", steps, policy_.net()});
    if (spec_.algorithm != "reinforce") {
      c.blocks.push_back({spec_.algorithm == "reinforce_baseline" ? "baseline" : "critic", steps, critic_});
    }
    return c;
  }

  void load(const Checkpoint& ckpt) override {
    policy_.net() = detail::load_net(ckpt, "policy", policy_.net());
    if (spec_.algorithm == "reinforce") return;
    critic_ = detail::load_net(ckpt, spec_.algorithm == "reinforce_baseline" ? "baseline" : "critic", critic_);
  }

 private:
  // Advantage G_t - V(s_t); V is regressed toward G_t after the policy update.
  void collect_ppo_episode() {
    const auto returns = episode_returns(episode_, spec_.gamma);
    for (std::size_t t = 0; t < episode_.size(); ++t) {
      rollout_.push_back({episode_[t].state, episode_[t].action, old_probs_[t],
                          advantage_estimate(returns[t], critic_.forward(episode_[t].state)[0])});
      rollout_returns_.push_back(returns[t]);
    }
  }

  void ppo_update(Rng& rng) {
    ppo_clipped_step(policy_, rollout_, spec_.ppo, rng);
    for (std::size_t i = 0; i < rollout_.size(); ++i) {
      const double err = rollout_returns_[i] - critic_.forward(rollout_[i].state)[0];
      critic_.add_scaled(critic_.gradient(rollout_[i].state, 0), spec_.alpha_critic * err);
    }
    rollout_.clear();
    rollout_returns_.clear();
    rollout_episodes_ = 0;
  }

  LearnerSpec spec_;
  SoftmaxPolicy policy_;
  Approximator critic_;
  std::vector<EpisodeStep> episode_;
  std::vector<double> old_probs_;
  std::vector<Experience> pending_;
  std::vector<PpoSample> rollout_;
  std::vector<double> rollout_returns_;
  int rollout_episodes_ = 0;
};

inline std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, const SeedTree& seed) {
  Rng init = seed.derive("agent_init", 0).stream();
  const std::string& alg = spec.algorithm;
  if (alg == "q_tabular") {
    if (!spec.state_encoder) throw ConfigError("q_tabular needs a state encoder");
    return std::make_unique<TabularQLearner>(spec);
  }
  if (alg == "q_linear") return std::make_unique<ApproxQLearner>(spec, init, false);
  if (alg == "dqn") return std::make_unique<ApproxQLearner>(spec, init, true);
  if (std::find(known_algorithms().begin(), known_algorithms().end(), alg) != known_algorithms().end()) {
    return std::make_unique<PolicyLearner>(spec, init);
  }
  throw ConfigError("unknown algorithm '" + alg + "'");
}

}  // namespace natrl
