#pragma once

// Training, evaluation and the open-loop probe.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "natrl/harness/env_factory.hpp"
#include "natrl/harness/learners.hpp"
#include "natrl/harness/metrics.hpp"

namespace natrl {

struct EpisodeStats {
  double ret = 0.0;
  std::uint64_t length = 0;
  bool success = false;  // last reward of the episode was positive
};

struct EvalSummary {
  std::string split;
  std::size_t episodes = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over episodes
  double success_rate = 0.0;
  std::vector<EpisodeStats> per_episode;
};

inline EvalSummary summarize(const std::string& split, std::vector<EpisodeStats> eps) {
  EvalSummary s;
  s.split = split;
  s.episodes = eps.size();
  if (!eps.empty()) {
    double sum = 0.0, succ = 0.0;
    for (const auto& e : eps) {
      sum += e.ret;
      succ += e.success ? 1.0 : 0.0;
    }
    s.mean = sum / static_cast<double>(eps.size());
    s.success_rate = succ / static_cast<double>(eps.size());
    if (eps.size() > 1) {
      double ss = 0.0;
      for (const auto& e : eps) ss += (e.ret - s.mean) * (e.ret - s.mean);
      s.std = std::sqrt(ss / static_cast<double>(eps.size() - 1));
    }
  }
  s.per_episode = std::move(eps);
  return s;
}

// Everything a run needs that does not depend on the seed.
struct RunSetup {
  ExperimentConfig cfg;
  EnvSources sources;
  LearnerSpec spec;
};

inline LearnerSpec make_learner_spec(const ExperimentConfig& cfg, const EnvSources& src) {
  LearnerSpec spec;
  spec.algorithm = cfg.str("algorithm");
  if (std::find(known_algorithms().begin(), known_algorithms().end(), spec.algorithm) == known_algorithms().end()) {
    throw ConfigError("unknown algorithm '" + spec.algorithm + "'");
  }
  const auto probe = make_env(src, cfg, Split::kTrain);
  spec.num_actions = probe->num_actions();
  spec.features.obs_size = shape_size(probe->observation_shape());
  spec.features.goal_classes = goal_classes(src);
  spec.features.scale = cfg.real("feature_scale");
  if (spec.algorithm == "q_tabular") {
    std::string enc = cfg.str("state_encoder");
    if (enc == "auto") enc = src.kind == "catcher" ? "catcher" : "hash";
    if (enc == "catcher") {
      if (src.kind != "catcher") throw ConfigError("state_encoder catcher needs env catcher");
      spec.state_encoder = [p = src.catcher](const Observation& o) { return encode_catcher_observation(o, p); };
    } else if (enc == "hash") {
      spec.state_encoder = hash_state;
    } else {
      throw ConfigError("state_encoder must be auto, catcher or hash, got '" + enc + "'");
    }
  }
  spec.approximator = cfg.str("approximator");
  if (spec.approximator != "linear" && spec.approximator != "mlp") {
    throw ConfigError("approximator must be linear or mlp, got '" + spec.approximator + "'");
  }
  spec.hidden = static_cast<int>(cfg.integer("hidden"));
  spec.init_scale = cfg.real("init_scale");
  spec.alpha = cfg.real("alpha");
  spec.alpha_critic = cfg.real("alpha_critic");
  spec.gamma = cfg.real("gamma");
  spec.epsilon = cfg.real("epsilon");
  if (!(spec.gamma >= 0.0 && spec.gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(spec.epsilon >= 0.0 && spec.epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(spec.alpha >= 0.0) || !(spec.alpha_critic >= 0.0)) throw ConfigError("learning rates must be >= 0");
  spec.batch = cfg.count("batch");
  spec.replay_capacity = cfg.count("replay_capacity");
  spec.learning_starts = cfg.count("learning_starts");
  spec.target_interval = static_cast<int>(cfg.integer("target_interval"));
  spec.a2c_actors = static_cast<int>(cfg.integer("a2c_actors"));
  spec.ppo.epsilon = cfg.real("ppo_epsilon");
  spec.ppo.epochs = static_cast<int>(cfg.integer("ppo_epochs"));
  spec.ppo.minibatch = cfg.count("ppo_minibatch");
  spec.ppo.alpha = spec.alpha;
  spec.ppo_rollout_episodes = static_cast<int>(cfg.integer("ppo_rollout_episodes"));
  return spec;
}

// Loads datasets and checks every setting, so that errors surface before any
// training starts.
inline RunSetup prepare_run(const ExperimentConfig& cfg) {
  RunSetup s{cfg, load_env_sources(cfg), {}};
  s.spec = make_learner_spec(cfg, s.sources);
  cfg.seeds();
  parse_split(cfg.str("eval_split"));
  cfg.count("episodes");
  cfg.count("step_budget");
  cfg.count("eval_interval");
  cfg.count("eval_episodes");
  if (cfg.count("final_window") == 0) throw ConfigError("final_window must be >= 1");
  cfg.flag("log_wall_clock");
  if (cfg.real("probe_threshold") < 0.0) throw ConfigError("probe_threshold must be >= 0");
  make_learner(s.spec, SeedTree(0));
  return s;
}

inline EpisodeStats play_episode(Environment& env, Learner& agent, const SeedTree& seed, Rng& rng, bool explore) {
  EpisodeStats st;
  Observation obs = env.reset(seed);
  double last = 0.0;
  while (!env.done()) {
    StepResult r = env.step(agent.act(obs, rng, explore));
    st.ret += r.reward;
    last = r.reward;
    ++st.length;
    obs = std::move(r.obs);
  }
  st.success = last > 0.0;
  return st;
}

// Greedy evaluation; episode i is seeded from SeedTree(seed)/eval/episode i,
// so every evaluation of a seed sees the same episodes.
inline EvalSummary evaluate(Environment& env, Learner& agent, std::uint64_t seed, std::size_t episodes,
                            const std::string& split) {
  const SeedTree base = SeedTree(seed).derive("eval", 0);
  Rng unused(0);
  std::vector<EpisodeStats> eps;
  eps.reserve(episodes);
  for (std::size_t i = 0; i < episodes; ++i) eps.push_back(play_episode(env, agent, base.derive("episode", i), unused, false));
  return summarize(split, std::move(eps));
}

struct SeedResult {
  std::uint64_t seed = 0;
  std::uint64_t episodes = 0;
  std::uint64_t steps = 0;
  double final_return = 0.0;  // mean of the last final_window training returns
  std::optional<EvalSummary> last_eval;
  std::filesystem::path metrics_path;
  std::filesystem::path checkpoint_path;
};

inline std::filesystem::path metrics_path(const std::filesystem::path& dir, std::uint64_t seed) {
  return dir / ("metrics_seed" + std::to_string(seed) + ".jsonl");
}
inline std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::uint64_t seed) {
  return dir / ("checkpoint_seed" + std::to_string(seed) + ".bin");
}

// Trains one seed. Stops after `episodes` training episodes or once
// `step_budget` steps have been taken (0 = no budget); an episode in progress
// when the budget runs out is finished.
inline SeedResult train_seed(const RunSetup& setup, std::uint64_t seed) {
  const ExperimentConfig& cfg = setup.cfg;
  const auto out = cfg.out_dir();
  const auto max_episodes = cfg.count("episodes");
  const auto budget = cfg.count("step_budget");
  const auto eval_interval = cfg.count("eval_interval");
  const auto eval_episodes = cfg.count("eval_episodes");
  const auto window = cfg.count("final_window");
  const Split eval_split = parse_split(cfg.str("eval_split"));
  const bool wall = cfg.flag("log_wall_clock");

  SeedResult res;
  res.seed = seed;
  res.metrics_path = metrics_path(out, seed);
  res.checkpoint_path = checkpoint_path(out, seed);
  MetricsWriter metrics(res.metrics_path, seed, cfg, wall);
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };

  const SeedTree root(seed);
  auto agent = make_learner(setup.spec, root);
  Rng rng = root.derive("explore", 0).stream();
  std::unique_ptr<Environment> eval_env;

  const int n_actors = agent->actors();
  struct Slot {
    std::unique_ptr<Environment> env;
    Observation obs;
    std::uint64_t index = 0;
    EpisodeStats stats;
    double last = 0.0;
    bool active = false;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n_actors));
  for (auto& s : slots) s.env = make_env(setup.sources, cfg, Split::kTrain);

  std::uint64_t started = 0;
  std::deque<double> recent;
  auto can_start = [&] { return started < max_episodes && (budget == 0 || res.steps < budget); };
  auto start = [&](Slot& s) {
    s.active = can_start();
    if (!s.active) return;
    s.index = started++;
    s.stats = {};
    s.last = 0.0;
    s.obs = s.env->reset(root.derive("train_episode", s.index));
  };
  for (auto& s : slots) start(s);

  bool any = std::any_of(slots.begin(), slots.end(), [](const Slot& s) { return s.active; });
  while (any) {
    for (auto& s : slots) {
      if (!s.active) continue;
      const int a = agent->act(s.obs, rng, true);
      StepResult r = s.env->step(a);
      agent->observe(s.obs, a, r.reward, r.obs, r.terminal, rng);
      s.stats.ret += r.reward;
      s.last = r.reward;
      ++s.stats.length;
      ++res.steps;
      s.obs = std::move(r.obs);
    }
    agent->flush(rng);
    any = false;
    for (auto& s : slots) {
      if (s.active && s.env->done()) {
        agent->end_episode(rng);
        s.stats.success = s.last > 0.0;
        metrics.append({seed, "train", "train", s.index, res.steps, s.stats.ret, s.stats.length, s.stats.success,
                        elapsed_ms()});
        recent.push_back(s.stats.ret);
        if (recent.size() > window) recent.pop_front();
        ++res.episodes;
        if (eval_interval > 0 && eval_episodes > 0 && res.episodes % eval_interval == 0) {
          if (!eval_env) eval_env = make_env(setup.sources, cfg, eval_split);
          auto ev = evaluate(*eval_env, *agent, seed, eval_episodes, split_name(eval_split));
          for (std::size_t i = 0; i < ev.per_episode.size(); ++i) {
            const auto& e = ev.per_episode[i];
            metrics.append({seed, ev.split, "eval", i, res.steps, e.ret, e.length, e.success, elapsed_ms()});
          }
          res.last_eval = std::move(ev);
        }
        start(s);
      }
      any = any || s.active;
    }
  }

  if (!recent.empty()) res.final_return = std::accumulate(recent.begin(), recent.end(), 0.0) / recent.size();
  save_checkpoint(agent->checkpoint(res.steps), res.checkpoint_path);
  return res;
}

inline void write_summary_csv(const std::filesystem::path& path, const std::vector<SeedResult>& results) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << "seed,episodes,steps,final_return,eval_split,eval_mean,eval_std,eval_success_rate\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : results) {
    out << r.seed << ',' << r.episodes << ',' << r.steps << ',' << num(r.final_return) << ',';
    if (r.last_eval) {
      out << r.last_eval->split << ',' << num(r.last_eval->mean) << ',' << num(r.last_eval->std) << ','
          << num(r.last_eval->success_rate) << '\n';
    } else {
      out << ",,,\n";
    }
  }
}

// One metrics file and checkpoint per seed in out_dir, then summary.csv.
inline std::vector<SeedResult> run_train(const ExperimentConfig& cfg) {
  const RunSetup setup = prepare_run(cfg);
  std::filesystem::create_directories(cfg.out_dir());
  {
    std::ofstream echo(cfg.out_dir() / "config.txt", std::ios::binary | std::ios::trunc);
    echo << cfg.to_text();
  }
  std::vector<SeedResult> results;
  for (auto seed : cfg.seeds()) results.push_back(train_seed(setup, seed));
  write_summary_csv(cfg.out_dir() / "summary.csv", results);
  return results;
}

inline std::unique_ptr<Learner> load_learner(const RunSetup& setup, const std::filesystem::path& ckpt) {
  auto agent = make_learner(setup.spec, SeedTree(0));
  agent->load(load_checkpoint(ckpt));
  return agent;
}

inline std::filesystem::path resolve_checkpoint(const ExperimentConfig& cfg) {
  const std::string& c = cfg.str("checkpoint");
  if (!c.empty()) return c;
  return checkpoint_path(cfg.out_dir(), cfg.seeds().front());
}

// Greedy evaluation of a checkpoint on eval_split, seeded by the first seed.
inline EvalSummary run_eval(const ExperimentConfig& cfg, const std::filesystem::path& ckpt) {
  const RunSetup setup = prepare_run(cfg);
  auto agent = load_learner(setup, ckpt);
  const Split split = parse_split(cfg.str("eval_split"));
  auto env = make_env(setup.sources, cfg, split);
  return evaluate(*env, *agent, cfg.seeds().front(), cfg.count("eval_episodes"), split_name(split));
}

struct ProbeResult {
  double normal_mean = 0.0;
  double noise_mean = 0.0;
  double gap = 0.0;  // normal - noise
  double threshold = 0.0;
  bool suspect = false;
};

inline const char* probe_verdict(const ProbeResult& r) { return r.suspect ? "open-loop suspect" : "reactive"; }

// Open-loop suspect iff |gap| < threshold * |normal mean|.
inline ProbeResult probe_verdict_for(double normal_mean, double noise_mean, double threshold) {
  ProbeResult r;
  r.normal_mean = normal_mean;
  r.noise_mean = noise_mean;
  r.gap = normal_mean - noise_mean;
  r.threshold = threshold;
  r.suspect = std::abs(r.gap) < threshold * std::abs(normal_mean);
  return r;
}

// Evaluates the checkpoint with the configured wrappers minus pure_noise, then
// again with pure_noise outermost, on the same evaluation episodes.
inline ProbeResult probe_openloop(const ExperimentConfig& cfg, const std::filesystem::path& ckpt) {
  RunSetup setup = prepare_run(cfg);
  auto agent = load_learner(setup, ckpt);
  const Split split = parse_split(cfg.str("eval_split"));
  const auto seed = cfg.seeds().front();
  const auto n = cfg.count("eval_episodes");

  auto names = setup.sources.wrappers;
  names.erase(std::remove(names.begin(), names.end(), "pure_noise"), names.end());
  auto normal_env = apply_wrappers(make_base_env(setup.sources, split), names, setup.sources, cfg, split);
  names.push_back("pure_noise");
  auto noise_env = apply_wrappers(make_base_env(setup.sources, split), names, setup.sources, cfg, split);

  const auto normal = evaluate(*normal_env, *agent, seed, n, split_name(split));
  const auto noise = evaluate(*noise_env, *agent, seed, n, split_name(split));
  return probe_verdict_for(normal.mean, noise.mean, cfg.real("probe_threshold"));
}

}  // namespace natrl
