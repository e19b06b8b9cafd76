#pragma once

// Navigation for object localization.
//
// The agent starts on the cell holding the image center and is told a goal
// class. Reward is 1 (terminal) once its w x w footprint overlaps a pixel of
// that class, 0 otherwise; the episode times out after 200 steps.
//
// Observation: {H, W, 4} = RGB image plus a footprint channel (255 inside the
// agent's window), with the goal class in Observation::goal.
//
// If the starting footprint already overlaps the goal, the episode is decided
// at reset: the first step (any move) returns reward 1 and terminates without
// moving the agent.

#include <memory>
#include <vector>

#include "natrl/core/config.hpp"
#include "natrl/core/environment.hpp"
#include "natrl/datasets/segmentation.hpp"
#include "natrl/envs/nav_grid.hpp"

namespace natrl {

inline constexpr int kLocalizeMaxSteps = 200;

struct NavLocalizeState {
  std::size_t sample_index = 0;
  int goal = 0;
  Cell cell;
  int steps = 0;
  bool done = false;
  bool reached_at_reset = false;
};

inline bool footprint_overlap(const ImageTensor& mask, const NavGrid& grid, Cell cell, int goal_class) {
  if (!grid.contains(cell)) throw ContractViolation("footprint_overlap: cell outside grid");
  const PixelRect r = grid.footprint(cell);
  for (int y = r.y0; y < r.y1; ++y) {
    for (int x = r.x0; x < r.x1; ++x) {
      if (mask.at(y, x, 0) == goal_class) return true;
    }
  }
  return false;
}

inline bool footprint_overlap(const ImageTensor& mask, Cell cell, int window, int goal_class) {
  return footprint_overlap(mask, NavGrid(mask.height, mask.width, window), cell, goal_class);
}

class LocalizeEnv : public Environment {
 public:
  LocalizeEnv(std::shared_ptr<const std::vector<SegmentationSample>> samples, int num_classes, int window,
              int max_steps = kLocalizeMaxSteps)
      : samples_(std::move(samples)), num_classes_(num_classes), window_(window), max_steps_(max_steps) {
    if (!samples_ || samples_->empty()) throw ConfigError("localize: no samples");
    if (window < 1) throw ConfigError("localize: window must be >= 1");
    if (max_steps < 1) throw ConfigError("localize: max_steps must be >= 1");
    const auto& first = samples_->front();
    for (std::size_t i = 0; i < samples_->size(); ++i) {
      const auto& s = (*samples_)[i];
      validate_segmentation(s, num_classes_);
      if (!s.image.same_shape(first.image)) throw ConfigError("localize: samples differ in shape");
      if (goals(s).empty()) {
        throw ConfigError("localize: sample " + std::to_string(i) + " has no non-background class");
      }
    }
    grid_ = NavGrid(first.image.height, first.image.width, window_);
    state_.done = true;  // until reset
  }

  Observation reset(const SeedTree& seed) override {
    Rng rng = seed.stream();
    state_ = NavLocalizeState{};
    state_.sample_index = rng.uniform_int(samples_->size());
    const auto g = goals(sample());
    state_.goal = g[rng.uniform_int(g.size())];
    state_.cell = grid_.center();
    state_.reached_at_reset = footprint_overlap(sample().label_mask, grid_, state_.cell, state_.goal);
    return observe();
  }

  StepResult step(int action) override {
    if (state_.done) throw ContractViolation("localize: step after terminal");
    if (action < 0 || action >= kNumMoves) throw ContractViolation("localize: action out of range");
    ++state_.steps;
    StepResult r;
    if (state_.reached_at_reset) {
      r.reward = 1.0;
      state_.done = true;
    } else {
      state_.cell = grid_.moved(state_.cell, static_cast<Move>(action));
      if (footprint_overlap(sample().label_mask, grid_, state_.cell, state_.goal)) {
        r.reward = 1.0;
        state_.done = true;
      } else {
        state_.done = state_.steps >= max_steps_;
      }
    }
    r.terminal = state_.done;
    r.obs = observe();
    return r;
  }

  int num_actions() const override { return kNumMoves; }
  Shape observation_shape() const override {
    return {static_cast<std::size_t>(grid_.height), static_cast<std::size_t>(grid_.width), 4};
  }
  bool done() const override { return state_.done; }
  std::string name() const override { return "localize"; }

  const NavLocalizeState& state() const { return state_; }
  const NavGrid& grid() const { return grid_; }
  const SegmentationSample& sample() const { return (*samples_)[state_.sample_index]; }
  int num_classes() const { return num_classes_; }

  static std::vector<int> goals(const SegmentationSample& s) {
    std::vector<int> g;
    for (int c : s.classes_present) {
      if (c != 0) g.push_back(c);
    }
    return g;
  }

 private:
  Observation observe() const {
    const auto& img = sample().image;
    Observation obs;
    obs.shape = observation_shape();
    obs.values.assign(img.pixel_count() * 4, 0.0f);
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
      for (std::size_t c = 0; c < 3; ++c) obs.values[p * 4 + c] = img.data[p * 3 + c];
    }
    const PixelRect r = grid_.footprint(state_.cell);
    for (int y = r.y0; y < r.y1; ++y) {
      for (int x = r.x0; x < r.x1; ++x) obs.values[(static_cast<std::size_t>(y) * img.width + x) * 4 + 3] = 255.0f;
    }
    obs.goal = state_.goal;
    return obs;
  }

  std::shared_ptr<const std::vector<SegmentationSample>> samples_;
  int num_classes_;
  int window_;
  int max_steps_;
  NavGrid grid_;
  NavLocalizeState state_;
};

// Fewest cell moves from `start` until the footprint overlaps `goal`
// (0 if it already does), or -1 if no cell overlaps. Breadth-first search.
inline int shortest_path_to_goal(const ImageTensor& mask, const NavGrid& grid, Cell start, int goal) {
  const int rows = grid.rows();
  const int cols = grid.cols();
  std::vector<int> dist(static_cast<std::size_t>(rows) * cols, -1);
  std::vector<Cell> frontier{start};
  dist[static_cast<std::size_t>(start.row) * cols + start.col] = 0;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const Cell c = frontier[head];
    const int d = dist[static_cast<std::size_t>(c.row) * cols + c.col];
    if (footprint_overlap(mask, grid, c, goal)) return d;
    for (int m = 0; m < kNumMoves; ++m) {
      const Cell n = grid.moved(c, static_cast<Move>(m));
      auto& dn = dist[static_cast<std::size_t>(n.row) * cols + n.col];
      if (dn < 0) {
        dn = d + 1;
        frontier.push_back(n);
      }
    }
  }
  return -1;
}

}  // namespace natrl
