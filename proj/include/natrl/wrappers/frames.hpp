#pragma once

// Frame skipping with sticky actions, and frame stacking.

#include <deque>
#include <memory>

#include "natrl/core/environment.hpp"

namespace natrl {

struct FrameSkipParams {
  int repeat = 4;
  double sticky_p = 0.25;
};

// Runs `repeat` inner steps per agent step. At each inner step, with
// probability sticky_p the previously executed action is executed instead
// of the commanded one (before any action has executed in the episode the
// commanded action is always used). Rewards are summed; stops early on a
// terminal inner step and returns the last frame.
class FrameSkipEnv : public EnvWrapper {
 public:
  FrameSkipEnv(std::unique_ptr<Environment> inner, FrameSkipParams params = {})
      : EnvWrapper(std::move(inner)), params_(params), rng_(0) {
    if (params.repeat < 1) throw ConfigError("frame skip: repeat must be >= 1");
    if (!(params.sticky_p >= 0.0 && params.sticky_p <= 1.0)) throw ConfigError("frame skip: sticky_p must be in [0, 1]");
  }

  Observation reset(const SeedTree& seed) override {
    rng_ = seed.derive("sticky_actions", 0).stream();
    previous_ = -1;
    executed_.clear();
    return inner_->reset(seed);
  }

  StepResult step(int action) override {
    StepResult out;
    for (int i = 0; i < params_.repeat; ++i) {
      int a = action;
      if (previous_ >= 0 && rng_.bernoulli(params_.sticky_p)) a = previous_;
      StepResult r = inner_->step(a);
      previous_ = a;
      executed_.push_back(a);
      out.reward += r.reward;
      out.obs = std::move(r.obs);
      out.terminal = r.terminal;
      if (r.terminal) break;
    }
    return out;
  }

  std::string name() const override { return "skip(" + inner_->name() + ")"; }

  // Inner actions actually executed since reset.
  const std::vector<int>& executed_actions() const { return executed_; }

 private:
  FrameSkipParams params_;
  Rng rng_;
  int previous_ = -1;
  std::vector<int> executed_;
};

// Sliding window over the last k frames, concatenated along channels with the
// oldest frame first. reset() fills the window with k copies of the first frame.
class FrameStack {
 public:
  explicit FrameStack(int k = 4) : k_(k) {
    if (k < 1) throw ConfigError("frame stack: k must be >= 1");
  }

  Observation reset(const Observation& first) {
    check_rank(first);
    frames_.assign(static_cast<std::size_t>(k_), first);
    return stacked();
  }

  Observation push(const Observation& frame) {
    check_rank(frame);
    if (frames_.empty()) return reset(frame);
    if (frame.shape != frames_.front().shape) throw ContractViolation("frame stack: frame shape changed");
    frames_.pop_front();
    frames_.push_back(frame);
    return stacked();
  }

  Observation stacked() const {
    const Shape& s = frames_.front().shape;
    const std::size_t pixels = s[0] * s[1];
    const std::size_t ch = s[2];
    Observation out;
    out.shape = {s[0], s[1], ch * frames_.size()};
    out.values.resize(pixels * ch * frames_.size());
    out.goal = frames_.back().goal;
    const std::size_t stride = ch * frames_.size();
    for (std::size_t f = 0; f < frames_.size(); ++f) {
      const auto& v = frames_[f].values;
      for (std::size_t p = 0; p < pixels; ++p) {
        for (std::size_t c = 0; c < ch; ++c) out.values[p * stride + f * ch + c] = v[p * ch + c];
      }
    }
    return out;
  }

  int k() const { return k_; }

 private:
  static void check_rank(const Observation& o) {
    if (o.shape.size() != 3) throw ContractViolation("frame stack: expected {H, W, C} frames");
  }

  int k_;
  std::deque<Observation> frames_;
};

inline Observation frame_stack(std::deque<Observation>& history, const Observation& new_frame, int k = 4) {
  if (history.empty()) {
    history.assign(static_cast<std::size_t>(k), new_frame);
  } else {
    history.push_back(new_frame);
    while (history.size() > static_cast<std::size_t>(k)) history.pop_front();
    while (history.size() < static_cast<std::size_t>(k)) history.push_front(history.front());
  }
  FrameStack stack(k);
  stack.reset(history.front());
  for (std::size_t i = 1; i < history.size(); ++i) stack.push(history[i]);
  return stack.stacked();
}

class FrameStackEnv : public EnvWrapper {
 public:
  FrameStackEnv(std::unique_ptr<Environment> inner, int k = 4) : EnvWrapper(std::move(inner)), stack_(k) {}

  Observation reset(const SeedTree& seed) override { return stack_.reset(inner_->reset(seed)); }
  StepResult step(int action) override {
    StepResult r = inner_->step(action);
    r.obs = stack_.push(r.obs);
    return r;
  }
  Shape observation_shape() const override {
    Shape s = inner_->observation_shape();
    s.back() *= static_cast<std::size_t>(stack_.k());
    return s;
  }
  std::string name() const override { return "stack(" + inner_->name() + ")"; }

 private:
  FrameStack stack_;
};

}  // namespace natrl
