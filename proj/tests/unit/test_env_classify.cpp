#include <gtest/gtest.h>

#include <numeric>

#include <set>

#include "natrl/envs/classify.hpp"
#include "test_util.hpp"

namespace natrl {
namespace {

std::shared_ptr<LabeledImageSet> random_set(std::uint64_t seed, int n, int h, int w, int c, int classes,
                                            Split split = Split::kTrain) {
  Rng rng(seed);
  auto set = std::make_shared<LabeledImageSet>();
  set->num_classes = classes;
  set->split = split;
  for (int i = 0; i < n; ++i) {
    set->images.push_back(test::random_image(rng, h, w, c));
    set->labels.push_back(rng.uniform_index(classes));
  }
  return set;
}

EnvConfig classify_config(int window, int max_steps) {
  EnvConfig cfg;
  cfg.kind = EnvKind::kClassify;
  cfg.window = window;
  cfg.max_steps = max_steps;
  return cfg;
}

int action(Move m, int guess, int classes) { return NavClassifyAction{m, guess}.encode(classes); }

int wrong_guess(const ClassifyEnv& env) { return (env.label() + 1) % env.num_classes(); }

TEST(ClassifyAction, EncodeDecodeRoundTrip) {
  for (int a = 0; a < 4 * 7; ++a) EXPECT_EQ(NavClassifyAction::decode(a, 7).encode(7), a);
  const auto d = NavClassifyAction::decode(2 * 10 + 3, 10);
  EXPECT_EQ(d.move, Move::kLeft);
  EXPECT_EQ(d.guess, 3);
}

TEST(ClassifyEnv, FullWindowShowsWholeImage) {
  auto data = random_set(1, 5, 28, 28, 1, 10);
  ClassifyEnv env(data, classify_config(28, 20));
  const auto obs = env.reset(SeedTree(3));
  EXPECT_EQ(obs, to_observation(env.image()));
}

TEST(ClassifyEnv, GridIsCeilOfImageOverWindow) {
  auto data = random_set(1, 5, 28, 28, 1, 10);
  ClassifyEnv env(data, classify_config(5, 20));
  EXPECT_EQ(env.grid().rows(), 6);
  EXPECT_EQ(env.grid().cols(), 6);
  const auto edge = env.grid().footprint({5, 5});
  EXPECT_EQ(edge.y0, 25);
  EXPECT_EQ(edge.y1, 28);
  EXPECT_EQ(edge.x1, 28);
}

TEST(ClassifyEnv, ResetIsDeterministic) {
  auto data = random_set(1, 50, 28, 28, 1, 10);
  ClassifyEnv a(data, classify_config(5, 20)), b(data, classify_config(5, 20));
  for (std::uint64_t s = 0; s < 20; ++s) {
    EXPECT_EQ(a.reset(SeedTree(s)), b.reset(SeedTree(s)));
    EXPECT_EQ(a.state().image_index, b.state().image_index);
    EXPECT_EQ(a.state().cell, b.state().cell);
  }
}

TEST(ClassifyEnv, StartCellAndImageAreUniform) {
  auto data = random_set(1, 4, 12, 12, 1, 3);
  ClassifyEnv env(data, classify_config(4, 20));
  std::vector<long> cells(9, 0), images(4, 0);
  for (std::uint64_t s = 0; s < 90000; ++s) {
    env.reset(SeedTree(s));
    ++cells[env.state().cell.row * 3 + env.state().cell.col];
    ++images[env.state().image_index];
  }
  EXPECT_LT(test::chi_square_uniform(cells), test::chi_square_critical_01(8));
  EXPECT_LT(test::chi_square_uniform(images), test::chi_square_critical_01(3));
}

TEST(ClassifyEnv, CorrectGuessOnFirstStep) {
  auto data = random_set(2, 10, 28, 28, 1, 10);
  ClassifyEnv env(data, classify_config(5, 20));
  env.reset(SeedTree(4));
  const auto r = env.step(action(Move::kUp, env.label(), 10));
  EXPECT_DOUBLE_EQ(r.reward, 1.0);
  EXPECT_TRUE(r.terminal);
  EXPECT_THROW(env.step(0), ContractViolation);
}

TEST(ClassifyEnv, AlwaysWrongForTwentySteps) {
  auto data = random_set(2, 10, 28, 28, 1, 10);
  ClassifyEnv env(data, classify_config(5, 20));
  env.reset(SeedTree(4));
  std::vector<double> rewards;
  StepResult r;
  do {
    r = env.step(action(Move::kRight, wrong_guess(env), 10));
    rewards.push_back(r.reward);
  } while (!r.terminal);
  EXPECT_EQ(rewards.size(), 20u);
  EXPECT_NEAR(std::accumulate(rewards.begin(), rewards.end(), 0.0), -2.0, 1e-12);
}

TEST(ClassifyEnv, MoveLeftAtColumnZeroIsClamped) {
  auto data = random_set(2, 10, 28, 28, 1, 10);
  ClassifyEnv env(data, classify_config(5, 20));
  for (std::uint64_t s = 0;; ++s) {
    env.reset(SeedTree(s));
    if (env.state().cell.col == 0) break;
  }
  const Cell before = env.state().cell;
  const auto visible_before = env.state().visible;
  env.step(action(Move::kLeft, wrong_guess(env), 10));
  EXPECT_EQ(env.state().cell, before);
  EXPECT_EQ(env.state().visible, visible_before);
}

TEST(ClassifyEnv, StepBeforeResetIsRejected) {
  ClassifyEnv env(random_set(2, 3, 8, 8, 1, 2), classify_config(2, 5));
  EXPECT_THROW(env.step(0), ContractViolation);
}

TEST(ClassifyEnv, ConfigurationErrors) {
  auto empty = std::make_shared<LabeledImageSet>();
  EXPECT_THROW(ClassifyEnv(empty, classify_config(5, 20)), ConfigError);
  auto test_split = random_set(1, 3, 8, 8, 1, 2, Split::kTest);
  EXPECT_THROW(ClassifyEnv(test_split, classify_config(5, 20)), ConfigError);
  auto data = random_set(1, 3, 8, 8, 1, 2);
  EXPECT_THROW(ClassifyEnv(data, classify_config(0, 20)), ConfigError);
  EXPECT_THROW(ClassifyEnv(data, classify_config(2, 0)), ConfigError);
}

TEST(VisibleObservation, AllVisibleAndAllHidden) {
  Rng rng(7);
  const auto img = test::random_image(rng, 9, 11, 3);
  EXPECT_EQ(visible_observation(img, std::vector<std::uint8_t>(99, 1)), to_observation(img));
  const auto hidden = visible_observation(img, std::vector<std::uint8_t>(99, 0));
  for (float v : hidden.values) EXPECT_EQ(v, 0.0f);
  EXPECT_EQ(hidden.shape, (Shape{9, 11, 3}));
}

TEST(VisibleObservation, MatchesPerPixelSelect) {
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const int h = 1 + rng.uniform_index(20), w = 1 + rng.uniform_index(20), c = rng.bernoulli(0.5) ? 1 : 3;
    const auto img = test::random_image(rng, h, w, c);
    std::vector<std::uint8_t> mask(img.pixel_count());
    for (auto& m : mask) m = rng.bernoulli(0.4) ? 1 : 0;
    const auto obs = visible_observation(img, mask);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int k = 0; k < c; ++k) {
          const float expected = mask[y * w + x] ? static_cast<float>(img.at(y, x, k)) : 0.0f;
          ASSERT_EQ(obs.values[(static_cast<std::size_t>(y) * w + x) * c + k], expected);
        }
      }
    }
  }
  EXPECT_THROW(visible_observation(ImageTensor(2, 2, 1), std::vector<std::uint8_t>(3, 1)), ContractViolation);
}

// Replays a trajectory with an independent cell walk and pixel loop.
struct ReplayOracle {
  int h, w, win;
  std::vector<std::uint8_t> visible;
  ReplayOracle(int h_, int w_, int win_) : h(h_), w(w_), win(win_), visible(static_cast<std::size_t>(h_) * w_, 0) {}
  void mark(int row, int col) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (y / win == row && x / win == col) visible[static_cast<std::size_t>(y) * w + x] = 1;
      }
    }
  }
};

TEST(ClassifyEnv, VisibilityIsUnionOfVisitedWindows) {
  for (int win : {2, 5, 7}) {
    for (int m : {10, 20, 40}) {
      auto data = random_set(win * 100 + m, 8, 28, 28, 1, 10);
      ClassifyEnv env(data, classify_config(win, m));
      Rng policy(win + m);
      for (std::uint64_t ep = 0; ep < 20; ++ep) {
        env.reset(SeedTree(ep));
        const int rows = (28 + win - 1) / win;
        int row = env.state().cell.row, col = env.state().cell.col;
        ReplayOracle oracle(28, 28, win);
        oracle.mark(row, col);
        std::size_t prev_visible = 0;
        int steps = 0;
        while (!env.done()) {
          const int a = policy.uniform_index(env.num_actions());
          const auto mv = static_cast<Move>(a / 10);
          if (mv == Move::kUp) row = std::max(0, row - 1);
          if (mv == Move::kDown) row = std::min(rows - 1, row + 1);
          if (mv == Move::kLeft) col = std::max(0, col - 1);
          if (mv == Move::kRight) col = std::min(rows - 1, col + 1);
          oracle.mark(row, col);
          env.step(a);
          ++steps;
          ASSERT_EQ(env.state().visible, oracle.visible);
          std::size_t count = 0;
          for (auto v : env.state().visible) count += v;
          ASSERT_GE(count, prev_visible);
          prev_visible = count;
        }
        ASSERT_LE(steps, m);
      }
    }
  }
}

TEST(ClassifyEnv, ReturnsLieInClosedFormSet) {
  const int m = 10;
  auto data = random_set(5, 20, 16, 16, 1, 3);
  ClassifyEnv env(data, classify_config(4, m));
  Rng policy(5);
  for (std::uint64_t ep = 0; ep < 300; ++ep) {
    env.reset(SeedTree(ep));
    std::vector<double> rewards;
    while (!env.done()) rewards.push_back(env.step(policy.uniform_index(env.num_actions())).reward);
    const double g = std::accumulate(rewards.begin(), rewards.end(), 0.0);
    bool allowed = std::abs(g - (-0.1 * m)) < 1e-9;
    for (int k = 0; k < m; ++k) allowed = allowed || std::abs(g - (1.0 - 0.1 * k)) < 1e-9;
    EXPECT_TRUE(allowed) << g;
  }
}

}  // namespace
}  // namespace natrl
