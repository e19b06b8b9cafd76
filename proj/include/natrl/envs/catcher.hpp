#pragma once

// Catcher: a black-background arcade game used to exercise the pixel
// wrappers without an emulator.
//
// A ball falls one row per step from row 0 of a square board; the agent
// slides a paddle along the bottom row. When the ball reaches the bottom the
// episode ends with +1 if the paddle is under it and -1 otherwise. Ball and
// paddle are white (255,255,255) on exact black.

#include <algorithm>
#include <cstdlib>
#include <optional>

#include "natrl/core/environment.hpp"

namespace natrl {

enum class CatcherAction : int { kLeft = 0, kStay = 1, kRight = 2 };
inline constexpr int kCatcherActions = 3;

struct CatcherParams {
  int size = 21;         // board is size x size; horizon is size - 1 steps
  int paddle_width = 3;  // odd

  int half() const { return paddle_width / 2; }
  int horizon() const { return size - 1; }
  int paddle_min() const { return half(); }
  int paddle_max() const { return size - 1 - half(); }
  int paddle_start() const { return size / 2; }

  void validate() const {
    if (size < 2) throw ConfigError("catcher: board size must be >= 2");
    if (paddle_width < 1 || paddle_width % 2 == 0 || paddle_width > size) {
      throw ConfigError("catcher: paddle width must be odd and fit the board");
    }
  }
};

struct CatcherState {
  int ball_row = 0;
  int ball_col = 0;
  int paddle = 0;  // center column
  int step = 0;
  bool done = false;

  bool operator==(const CatcherState&) const = default;
};

inline ImageTensor render_catcher(const CatcherParams& p, const CatcherState& s) {
  ImageTensor frame(p.size, p.size, 3, 0);
  auto paint = [&](int y, int x) {
    for (int c = 0; c < 3; ++c) frame.at(y, x, c) = 255;
  };
  paint(s.ball_row, s.ball_col);
  for (int x = s.paddle - p.half(); x <= s.paddle + p.half(); ++x) paint(p.size - 1, x);
  return frame;
}

class CatcherEnv : public Environment {
 public:
  explicit CatcherEnv(CatcherParams params = {}) : params_(params) {
    params_.validate();
    state_.done = true;  // until reset
  }

  Observation reset(const SeedTree& seed) override {
    Rng rng = seed.stream();
    state_ = CatcherState{};
    state_.ball_col = rng.uniform_index(params_.size);
    state_.paddle = params_.paddle_start();
    return to_observation(frame());
  }

  StepResult step(int action) override {
    if (state_.done) throw ContractViolation("catcher: step after terminal");
    if (action < 0 || action >= kCatcherActions) throw ContractViolation("catcher: action out of range");
    state_.paddle = std::clamp(state_.paddle + (action - 1), params_.paddle_min(), params_.paddle_max());
    ++state_.ball_row;
    ++state_.step;
    StepResult r;
    if (state_.ball_row == params_.size - 1) {
      r.reward = std::abs(state_.ball_col - state_.paddle) <= params_.half() ? 1.0 : -1.0;
      state_.done = true;
    }
    r.terminal = state_.done;
    r.obs = to_observation(frame());
    return r;
  }

  int num_actions() const override { return kCatcherActions; }
  Shape observation_shape() const override {
    return {static_cast<std::size_t>(params_.size), static_cast<std::size_t>(params_.size), 3};
  }
  bool done() const override { return state_.done; }
  std::string name() const override { return "catcher"; }

  ImageTensor frame() const { return render_catcher(params_, state_); }
  const CatcherState& state() const { return state_; }
  const CatcherParams& params() const { return params_; }

 private:
  CatcherParams params_;
  CatcherState state_;
};

// Reserved id for frames that do not parse as a Catcher board.
inline constexpr std::uint64_t kUnknownCatcherState = 0;

// Exact symbolic reading of a raw frame: (ball row, ball col, paddle center).
// Returns nothing unless every pixel is pure black or pure white and the
// white pixels form exactly one ball above the bottom row plus one paddle.
inline std::optional<CatcherState> decode_catcher_frame(const Observation& obs, const CatcherParams& p = {}) {
  if (obs.shape != Shape{static_cast<std::size_t>(p.size), static_cast<std::size_t>(p.size), 3}) return std::nullopt;
  int ball_row = -1, ball_col = -1, paddle_lo = -1, paddle_hi = -1;
  for (int y = 0; y < p.size; ++y) {
    for (int x = 0; x < p.size; ++x) {
      const std::size_t at = (static_cast<std::size_t>(y) * p.size + x) * 3;
      const float r = obs.values[at], g = obs.values[at + 1], b = obs.values[at + 2];
      if (r != g || g != b) return std::nullopt;
      if (r == 0.0f) continue;
      if (r != 255.0f) return std::nullopt;
      if (y == p.size - 1) {
        if (paddle_lo < 0) paddle_lo = x;
        else if (x != paddle_hi + 1) return std::nullopt;
        paddle_hi = x;
      } else {
        if (ball_row >= 0) return std::nullopt;
        ball_row = y;
        ball_col = x;
      }
    }
  }
  if (ball_row < 0 || paddle_lo < 0 || paddle_hi - paddle_lo + 1 != p.paddle_width) return std::nullopt;
  CatcherState s;
  s.ball_row = ball_row;
  s.ball_col = ball_col;
  s.paddle = paddle_lo + p.half();
  s.step = ball_row;
  return s;
}

// Dense 1-based id for a non-terminal board; 0 is kUnknownCatcherState.
inline std::uint64_t catcher_state_id(const CatcherState& s, const CatcherParams& p = {}) {
  const auto n = static_cast<std::uint64_t>(p.size);
  return 1 + (static_cast<std::uint64_t>(s.ball_row) * n + static_cast<std::uint64_t>(s.ball_col)) * n +
         static_cast<std::uint64_t>(s.paddle);
}

inline std::uint64_t encode_catcher_observation(const Observation& obs, const CatcherParams& p = {}) {
  const auto s = decode_catcher_frame(obs, p);
  return s ? catcher_state_id(*s, p) : kUnknownCatcherState;
}

// Best expected return of any action sequence fixed in advance. Such a
// sequence ignores the ball, so it ends with some reachable paddle center c
// and catches the ball_col values inside c's span; the ball column is
// uniform over the board.
inline double best_open_loop_value(const CatcherParams& p = {}) {
  p.validate();
  double best = -1.0;
  for (int c = p.paddle_min(); c <= p.paddle_max(); ++c) {
    if (std::abs(c - p.paddle_start()) > p.horizon()) continue;
    int caught = 0;
    for (int ball = 0; ball < p.size; ++ball) caught += std::abs(ball - c) <= p.half() ? 1 : 0;
    best = std::max(best, (caught - (p.size - caught)) / static_cast<double>(p.size));
  }
  return best;
}

// The reactive policy that walks the paddle toward the ball column.
inline int catcher_tracking_action(const CatcherState& s) {
  if (s.ball_col < s.paddle) return static_cast<int>(CatcherAction::kLeft);
  if (s.ball_col > s.paddle) return static_cast<int>(CatcherAction::kRight);
  return static_cast<int>(CatcherAction::kStay);
}

}  // namespace natrl
