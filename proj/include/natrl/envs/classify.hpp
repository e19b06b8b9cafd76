#pragma once

// Navigation for image classification.
//
// The agent sits on a cell of a coarse grid over a masked image. Each step it
// moves one cell and guesses a class. The w x w window under every visited
// cell becomes visible. A correct guess ends the episode with +1; a wrong
// guess costs -0.1, and the episode also ends after M steps.

#include <memory>
#include <vector>

#include "natrl/core/config.hpp"
#include "natrl/core/environment.hpp"
#include "natrl/datasets/labeled.hpp"
#include "natrl/envs/nav_grid.hpp"

namespace natrl {

inline constexpr double kClassifyCorrectReward = 1.0;
inline constexpr double kClassifyWrongReward = -0.1;

// Joint action id = move * num_classes + guess.
struct NavClassifyAction {
  Move move = Move::kUp;
  int guess = 0;

  static NavClassifyAction decode(int action, int num_classes) {
    return {static_cast<Move>(action / num_classes), action % num_classes};
  }
  int encode(int num_classes) const { return static_cast<int>(move) * num_classes + guess; }
};

struct NavClassifyState {
  std::size_t image_index = 0;
  Cell cell;
  std::vector<std::uint8_t> visible;  // H x W, 1 = unmasked
  int steps = 0;
  bool done = false;
};

// out[p] = image[p] where visible, else 0.
inline Observation visible_observation(const ImageTensor& image, const std::vector<std::uint8_t>& visible) {
  if (visible.size() != image.pixel_count()) {
    throw ContractViolation("visible_observation: mask has " + std::to_string(visible.size()) + " pixels, image has " +
                            std::to_string(image.pixel_count()));
  }
  Observation obs;
  obs.shape = {static_cast<std::size_t>(image.height), static_cast<std::size_t>(image.width),
               static_cast<std::size_t>(image.channels)};
  obs.values.assign(image.data.size(), 0.0f);
  const auto ch = static_cast<std::size_t>(image.channels);
  for (std::size_t p = 0; p < visible.size(); ++p) {
    if (!visible[p]) continue;
    for (std::size_t c = 0; c < ch; ++c) obs.values[p * ch + c] = image.data[p * ch + c];
  }
  return obs;
}

class ClassifyEnv : public Environment {
 public:
  ClassifyEnv(std::shared_ptr<const LabeledImageSet> data, const EnvConfig& config)
      : data_(std::move(data)), window_(config.window), max_steps_(config.max_steps) {
    config.validate();
    if (!data_ || data_->size() == 0) throw ConfigError("classify: empty dataset");
    if (data_->split != config.split) {
      throw ConfigError(std::string("classify: dataset split '") + split_name(data_->split) +
                        "' does not match configured split '" + split_name(config.split) + "'");
    }
    data_->validate();
    const auto& first = data_->images.front();
    for (const auto& img : data_->images) {
      if (!img.same_shape(first)) throw ConfigError("classify: dataset images differ in shape");
    }
    grid_ = NavGrid(first.height, first.width, window_);
    state_.done = true;  // until reset
  }

  Observation reset(const SeedTree& seed) override {
    Rng rng = seed.stream();
    state_ = NavClassifyState{};
    state_.image_index = rng.uniform_int(data_->size());
    state_.cell = {rng.uniform_index(grid_.rows()), rng.uniform_index(grid_.cols())};
    state_.visible.assign(image().pixel_count(), 0);
    unmask(state_.cell);
    return observe();
  }

  StepResult step(int action) override {
    if (state_.done) throw ContractViolation("classify: step after terminal");
    if (action < 0 || action >= num_actions()) {
      throw ContractViolation("classify: action " + std::to_string(action) + " out of range");
    }
    const auto a = NavClassifyAction::decode(action, data_->num_classes);
    state_.cell = grid_.moved(state_.cell, a.move);
    unmask(state_.cell);
    ++state_.steps;
    StepResult r;
    if (a.guess == label()) {
      r.reward = kClassifyCorrectReward;
      state_.done = true;
    } else {
      r.reward = kClassifyWrongReward;
      state_.done = state_.steps >= max_steps_;
    }
    r.terminal = state_.done;
    r.obs = observe();
    return r;
  }

  int num_actions() const override { return kNumMoves * data_->num_classes; }
  Shape observation_shape() const override {
    const auto& img = data_->images.front();
    return {static_cast<std::size_t>(img.height), static_cast<std::size_t>(img.width),
            static_cast<std::size_t>(img.channels)};
  }
  bool done() const override { return state_.done; }
  std::string name() const override { return "classify"; }

  const NavClassifyState& state() const { return state_; }
  const NavGrid& grid() const { return grid_; }
  const ImageTensor& image() const { return data_->images[state_.image_index]; }
  int label() const { return data_->labels[state_.image_index]; }
  int num_classes() const { return data_->num_classes; }
  int max_steps() const { return max_steps_; }

 private:
  void unmask(Cell c) {
    const PixelRect r = grid_.footprint(c);
    const int width = image().width;
    for (int y = r.y0; y < r.y1; ++y) {
      for (int x = r.x0; x < r.x1; ++x) state_.visible[static_cast<std::size_t>(y) * width + x] = 1;
    }
  }

  Observation observe() const { return visible_observation(image(), state_.visible); }

  std::shared_ptr<const LabeledImageSet> data_;
  int window_;
  int max_steps_;
  NavGrid grid_;
  NavClassifyState state_;
};

}  // namespace natrl
