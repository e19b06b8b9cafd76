// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails, except those named with --known-red=N,[M...],
// which are still reported as FAIL.
//
// Criterion 7 uses MNIST IDX files from $NATRL_MNIST_DIR when set, and
// generated MNIST-format digits otherwise.

#include <algorithm>
#include <array>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "../unit/test_util.hpp"
#include "natrl/natrl.hpp"

using namespace natrl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;
std::set<int> known_red;

void report(int id, const std::string& title, const std::function<Verdict()>& check) {
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const bool excused = !v.pass && known_red.count(id) != 0;
  if (!v.pass && !excused) ++failures;
  std::printf("[%s] %d. %s: %s%s\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), v.detail.c_str(),
              excused ? " (known red)" : "");
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::vector<double> one_hot(int i, int n) {
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  v[static_cast<std::size_t>(i)] = 1.0;
  return v;
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * (2.0 * rng.uniform() - 1.0);
  return v;
}

ParamVector numeric_gradient(ParamVector p, const std::function<double(const ParamVector&)>& f, double h = 1e-6) {
  ParamVector g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + h;
    const double up = f(p);
    p[i] = keep - h;
    const double down = f(p);
    p[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double relative_error(const ParamVector& a, const ParamVector& b) {
  double d = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(d) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

// 1. Tabular Q-learning on a 5-state chain vs value iteration.
Verdict chain_q_learning() {
  constexpr int kStates = 5;
  constexpr double kGamma = 0.9;
  struct Outcome {
    int next;
    double reward;
    bool terminal;
  };
  auto step = [](int s, int a) {
    if (a == 1) return s == kStates - 1 ? Outcome{s, 1.0, true} : Outcome{s + 1, 0.0, false};
    return s == 0 ? Outcome{0, 0.2, false} : Outcome{s - 1, 0.0, false};
  };
  std::array<std::array<double, 2>, kStates> q_star{};
  for (int it = 0; it < 100000; ++it) {
    auto next = q_star;
    double change = 0.0;
    for (int s = 0; s < kStates; ++s) {
      for (int a = 0; a < 2; ++a) {
        const auto o = step(s, a);
        next[s][a] = o.reward + (o.terminal ? 0.0 : kGamma * std::max(q_star[o.next][0], q_star[o.next][1]));
        change = std::max(change, std::abs(next[s][a] - q_star[s][a]));
      }
    }
    q_star = next;
    if (change == 0.0) break;
  }

  const auto t0 = Clock::now();
  QTable table(2, 0.5, kGamma);
  double err = 1.0;
  int sweeps = 0;
  while (sweeps < 10000 && err >= 1e-6) {
    for (int s = 0; s < kStates; ++s) {
      for (int a = 0; a < 2; ++a) {
        const auto o = step(s, a);
        q_update(table, s, a, o.reward, o.next, o.terminal);
      }
    }
    ++sweeps;
    err = 0.0;
    for (int s = 0; s < kStates; ++s) {
      for (int a = 0; a < 2; ++a) err = std::max(err, std::abs(table.value(s, a) - q_star[s][a]));
    }
  }
  const double secs = seconds_since(t0);
  return {err < 1e-6 && secs < 5.0, fmt("max-norm error %.3g after %d sweeps in %.3f s", err, sweeps, secs)};
}

// 2. REINFORCE expected update vs exact value gradient; approximator gradients.
Verdict gradients() {
  const double reward[2][2] = {{1.0, -0.5}, {0.25, 2.0}};
  auto value = [&](const SoftmaxPolicy& pi) {
    double j = 0.0;
    for (int s = 0; s < 2; ++s) {
      const auto p = pi.probs(one_hot(s, 2));
      for (int a = 0; a < 2; ++a) j += 0.5 * p[static_cast<std::size_t>(a)] * reward[s][a];
    }
    return j;
  };
  Rng rng(2024);
  double worst_pg = 0.0;
  for (int t = 0; t < 20; ++t) {
    SoftmaxPolicy pi(Approximator::linear(2, 2));
    pi.net().set_params(random_vector(rng, pi.net().num_params()));
    ParamVector expected(pi.net().num_params(), 0.0);
    for (int s = 0; s < 2; ++s) {
      const auto p = pi.probs(one_hot(s, 2));
      for (int a = 0; a < 2; ++a) {
        auto copy = pi;
        reinforce_step(copy, std::vector<EpisodeStep>{{one_hot(s, 2), a, reward[s][a]}}, 1.0, 0.9);
        for (std::size_t i = 0; i < expected.size(); ++i) {
          expected[i] += 0.5 * p[static_cast<std::size_t>(a)] * (copy.net().params()[i] - pi.net().params()[i]);
        }
      }
    }
    auto probe = pi;
    const auto numeric = numeric_gradient(pi.net().params(), [&](const ParamVector& p) {
      probe.net().set_params(p);
      return value(probe);
    });
    worst_pg = std::max(worst_pg, relative_error(expected, numeric));
  }

  double worst_net = 0.0;
  for (int t = 0; t < 40; ++t) {
    const int in = 1 + rng.uniform_index(6), out = 1 + rng.uniform_index(4);
    std::vector<Approximator> nets{Approximator::linear(in, out), Approximator::linear(in, out, false),
                                   Approximator::mlp(in, 1 + rng.uniform_index(6), out)};
    for (auto& net : nets) {
      net.set_params(random_vector(rng, net.num_params()));
      const auto x = random_vector(rng, static_cast<std::size_t>(in), 2.0);
      for (int k = 0; k < out; ++k) {
        auto copy = net;
        const auto numeric = numeric_gradient(net.params(), [&](const ParamVector& p) {
          copy.set_params(p);
          return copy.forward(x)[static_cast<std::size_t>(k)];
        });
        worst_net = std::max(worst_net, relative_error(net.gradient(x, k), numeric));
      }
    }
    SoftmaxPolicy pi(t % 2 ? Approximator::mlp(in, 4, 2 + out) : Approximator::linear(in, 2 + out));
    pi.net().set_params(random_vector(rng, pi.net().num_params()));
    const auto x = random_vector(rng, static_cast<std::size_t>(in));
    const int a = rng.uniform_index(2 + out);
    auto copy = pi;
    const auto numeric = numeric_gradient(pi.net().params(), [&](const ParamVector& p) {
      copy.net().set_params(p);
      return copy.log_prob(x, a);
    });
    worst_net = std::max(worst_net, relative_error(pi.grad_log_prob(x, a), numeric));
  }
  return {worst_pg < 1e-4 && worst_net < 1e-5,
          fmt("REINFORCE rel. error %.3g (< 1e-4), approximator rel. error %.3g (< 1e-5)", worst_pg, worst_net)};
}


// 3. Classify visibility mask and returns against a brute-force replay.
Verdict classify_dynamics() {
  Rng rng(3);
  std::size_t mismatches = 0, bad_returns = 0, steps = 0;
  const int trajectories = 1000;
  for (int t = 0; t < trajectories; ++t) {
    const int h = 8 + rng.uniform_index(25), w = 8 + rng.uniform_index(25);
    const int win = 1 + rng.uniform_index(8), m = 1 + rng.uniform_index(40), classes = 2 + rng.uniform_index(9);
    auto data = std::make_shared<LabeledImageSet>();
    data->num_classes = classes;
    for (int i = 0; i < 4; ++i) {
      data->images.push_back(test::random_image(rng, h, w, 1));
      data->labels.push_back(rng.uniform_index(classes));
    }
    EnvConfig cfg;
    cfg.window = win;
    cfg.max_steps = m;
    ClassifyEnv env(data, cfg);
    env.reset(SeedTree(static_cast<std::uint64_t>(t)));
    const int rows = (h + win - 1) / win, cols = (w + win - 1) / win;
    int row = env.state().cell.row, col = env.state().cell.col;
    std::vector<std::pair<int, int>> visited{{row, col}};
    double g = 0.0;
    while (!env.done()) {
      const int a = rng.uniform_index(env.num_actions());
      switch (a / classes) {
        case 0: row = std::max(0, row - 1); break;
        case 1: row = std::min(rows - 1, row + 1); break;
        case 2: col = std::max(0, col - 1); break;
        default: col = std::min(cols - 1, col + 1); break;
      }
      visited.emplace_back(row, col);
      g += env.step(a).reward;
      ++steps;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          bool seen = false;
          for (const auto& [r, c] : visited) seen = seen || (y / win == r && x / win == c);
          if (seen != (env.state().visible[static_cast<std::size_t>(y) * w + x] != 0)) ++mismatches;
        }
      }
    }
    bool allowed = std::abs(g + 0.1 * m) < 1e-9;
    for (int k = 0; k < m; ++k) allowed = allowed || std::abs(g - (1.0 - 0.1 * k)) < 1e-9;
    bad_returns += allowed ? 0 : 1;
  }
  return {mismatches == 0 && bad_returns == 0,
          fmt("%d trajectories, %zu steps, %zu mask mismatches, %zu returns outside the closed-form set", trajectories,
              steps, mismatches, bad_returns)};
}

// 4. Video background injection against a per-pixel select.
Verdict injection() {
  Rng rng(4);
  std::size_t wrong = 0, altered = 0, pixels = 0;
  for (int t = 0; t < 1000; ++t) {
    const int h = 1 + rng.uniform_index(40), w = 1 + rng.uniform_index(40);
    auto frame = test::sparse_image(rng, h, w, rng.uniform());
    // Near-black game pixels must survive.
    if (rng.bernoulli(0.5)) frame.at(rng.uniform_index(h), rng.uniform_index(w), rng.uniform_index(3)) = 1;
    const auto video = test::random_image(rng, h, w, 3);
    const auto out = inject_video_background(frame, video);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const bool black = frame.at(y, x, 0) == 0 && frame.at(y, x, 1) == 0 && frame.at(y, x, 2) == 0;
        for (int c = 0; c < 3; ++c) {
          const auto expected = black ? video.at(y, x, c) : frame.at(y, x, c);
          wrong += out.at(y, x, c) != expected ? 1 : 0;
          altered += !black && out.at(y, x, c) != frame.at(y, x, c) ? 1 : 0;
        }
        ++pixels;
      }
    }
  }
  return {wrong == 0 && altered == 0,
          fmt("1000 pairs, %zu pixels, %zu oracle mismatches, %zu non-black values altered", pixels, wrong, altered)};
}

// Area average over the real-valued source span of each output pixel, in
// long double, rounding half up.
ImageTensor resize_oracle(const ImageTensor& src, int oh, int ow) {
  ImageTensor out(oh, ow, src.channels);
  const long double sy = static_cast<long double>(src.height) / oh, sx = static_cast<long double>(src.width) / ow;
  for (int i = 0; i < oh; ++i) {
    const long double y0 = i * sy, y1 = (i + 1) * sy;
    for (int j = 0; j < ow; ++j) {
      const long double x0 = j * sx, x1 = (j + 1) * sx;
      for (int c = 0; c < src.channels; ++c) {
        long double total = 0.0L;
        for (int y = static_cast<int>(std::floor(y0)); y < src.height && y < y1; ++y) {
          const long double wy = std::min<long double>(y + 1, y1) - std::max<long double>(y, y0);
          for (int x = static_cast<int>(std::floor(x0)); x < src.width && x < x1; ++x) {
            const long double wx = std::min<long double>(x + 1, x1) - std::max<long double>(x, x0);
            total += wy * wx * src.at(y, x, c);
          }
        }
        const long double mean = total / (sy * sx);
        const long double frac = mean - std::floor(mean);
        out.at(i, j, c) =
            static_cast<std::uint8_t>(std::abs(frac - 0.5L) < 1e-7L ? std::ceil(mean) : std::round(mean));
      }
    }
  }
  return out;
}

// 5. Grayscale and resize_area against double-loop oracles.
Verdict preprocessing() {
  Rng rng(5);
  std::size_t gray_wrong = 0, resize_wrong = 0, frames = 0;
  auto check = [&](const ImageTensor& img, int oh, int ow) {
    const auto g = grayscale(img);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        const int r = img.at(y, x, 0), gg = img.at(y, x, 1), b = img.at(y, x, 2);
        const int scaled = 299 * r + 587 * gg + 114 * b;  // exact in thousandths
        const int expected = scaled / 1000 + (scaled % 1000 >= 500 ? 1 : 0);
        gray_wrong += g.at(y, x, 0) != expected ? 1 : 0;
      }
    }
    const auto a = resize_area(img, oh, ow), b = resize_oracle(img, oh, ow);
    for (std::size_t i = 0; i < a.data.size(); ++i) resize_wrong += a.data[i] != b.data[i] ? 1 : 0;
    const auto ga = resize_area(g, oh, ow), gb = resize_oracle(g, oh, ow);
    for (std::size_t i = 0; i < ga.data.size(); ++i) resize_wrong += ga.data[i] != gb.data[i] ? 1 : 0;
    ++frames;
  };
  for (int t = 0; t < 5; ++t) check(test::random_image(rng, 210, 160, 3), 84, 84);
  for (int t = 0; t < 200; ++t) {
    check(test::random_image(rng, 1 + rng.uniform_index(60), 1 + rng.uniform_index(60), 3),
          1 + rng.uniform_index(60), 1 + rng.uniform_index(60));
  }
  return {gray_wrong == 0 && resize_wrong == 0,
          fmt("%zu frames incl. 210x160->84x84, %zu grayscale and %zu resize mismatches", frames, gray_wrong,
              resize_wrong)};
}

ExperimentConfig config(const std::string& text) { return parse_config_text(text, "acceptance"); }

// 6. Catcher: reactive agent vs agent trained on pure noise, and the probe.
Verdict openloop_probe(const std::filesystem::path& root) {
  const std::string base = "env = catcher\nalgorithm = q_tabular\nstate_encoder = catcher\nepisodes = 20000\n"
                           "alpha = 0.1\nepsilon = 0.1\ngamma = 0.99\nseeds = 0\neval_episodes = 1000\n";
  const auto t0 = Clock::now();
  auto normal = config(base + "out_dir = " + (root / "catcher").string() + "\n");
  run_train(normal);
  const auto normal_eval = run_eval(normal, checkpoint_path(normal.out_dir(), 0));
  const double secs = seconds_since(t0);

  auto noise = config(base + "wrappers = pure_noise\nout_dir = " + (root / "catcher_noise").string() + "\n");
  run_train(noise);
  const auto noise_eval = run_eval(noise, checkpoint_path(noise.out_dir(), 0));

  const auto probe_normal = probe_openloop(normal, checkpoint_path(normal.out_dir(), 0));
  const auto probe_noise = probe_openloop(noise, checkpoint_path(noise.out_dir(), 0));
  const double bound = best_open_loop_value() + 0.05;
  const bool pass = normal_eval.mean >= 0.9 && secs < 60.0 && noise_eval.mean <= bound && !probe_normal.suspect &&
                    probe_noise.suspect;
  return {pass, fmt("reactive mean %.3f over %zu episodes (train+eval %.1f s); noise-trained mean %.3f (bound %.3f); "
                    "probe gaps %.3f [%s] and %.3f [%s]",
                    normal_eval.mean, normal_eval.episodes, secs, noise_eval.mean, bound, probe_normal.gap,
                    probe_verdict(probe_normal), probe_noise.gap, probe_verdict(probe_noise))};
}

// MNIST-like digits: each class is a fixed set of strokes; samples are
// jittered, with random stroke intensity and sparse speckle.
LabeledImageSet synthetic_digits(std::uint64_t seed, int n, Split split) {
  const SeedTree root(seed);
  std::array<std::vector<std::array<int, 4>>, 10> strokes;
  Rng proto = SeedTree(7).derive("digit_prototypes", 0).stream();
  for (auto& s : strokes) {
    for (int k = 0; k < 3; ++k) {
      const bool vertical = proto.bernoulli(0.5);
      const int a = 4 + proto.uniform_index(20), b = 4 + proto.uniform_index(12);
      s.push_back(vertical ? std::array<int, 4>{b, a, b + 10, a + 2} : std::array<int, 4>{a, b, a + 2, b + 10});
    }
  }
  LabeledImageSet set;
  set.num_classes = 10;
  set.split = split;
  for (int i = 0; i < n; ++i) {
    Rng rng = root.derive("digit", static_cast<std::uint64_t>(i)).stream();
    const int label = i % 10;
    const int dy = rng.uniform_index(3) - 1, dx = rng.uniform_index(3) - 1;
    ImageTensor img(28, 28, 1);
    for (const auto& r : strokes[static_cast<std::size_t>(label)]) {
      const auto v = static_cast<std::uint8_t>(160 + rng.uniform_index(96));
      for (int y = r[0]; y < r[2]; ++y) {
        for (int x = r[1]; x < r[3]; ++x) {
          const int yy = std::clamp(y + dy, 0, 27), xx = std::clamp(x + dx, 0, 27);
          img.at(yy, xx, 0) = v;
        }
      }
    }
    for (int k = 0; k < 8; ++k) img.at(rng.uniform_index(28), rng.uniform_index(28), 0) = 255;
    set.images.push_back(std::move(img));
    set.labels.push_back(label);
  }
  return set;
}

// 7. Fewer allowed steps gives higher final training return at equal budget.
Verdict step_limit_ordering(const std::filesystem::path& root) {
  std::filesystem::path data = root / "digits";
  const char* mnist = std::getenv("NATRL_MNIST_DIR");
  if (mnist && *mnist) {
    data = mnist;
  } else {
    std::filesystem::create_directories(data);
    write_mnist_idx(synthetic_digits(1, 200, Split::kTrain), data / "train-images-idx3-ubyte",
                    data / "train-labels-idx1-ubyte");
    write_mnist_idx(synthetic_digits(2, 200, Split::kTest), data / "t10k-images-idx3-ubyte",
                    data / "t10k-labels-idx1-ubyte");
  }
  const std::string base = "env = classify\ndataset = mnist\ndata_dir = " + data.string() +
                           "\ndataset_limit = 200\nwindow = 7\nalgorithm = q_linear\nalpha = 0.01\n"
                           "epsilon = 0.1\ngamma = 0.9\ninit_scale = 0.01\nseeds = 0,1,2,3,4\nepisodes = 1000000\n"
                           "step_budget = 40000\nfinal_window = 200\n";
  const auto short_runs = run_train(config(base + "max_steps = 10\nout_dir = " + (root / "m10").string() + "\n"));
  const auto long_runs = run_train(config(base + "max_steps = 40\nout_dir = " + (root / "m40").string() + "\n"));
  int holds = 0;
  std::string per_seed;
  double mean10 = 0.0, mean40 = 0.0;
  for (std::size_t i = 0; i < short_runs.size(); ++i) {
    holds += short_runs[i].final_return >= long_runs[i].final_return ? 1 : 0;
    mean10 += short_runs[i].final_return / 5.0;
    mean40 += long_runs[i].final_return / 5.0;
    per_seed += fmt(" %.2f/%.2f", short_runs[i].final_return, long_runs[i].final_return);
  }
  return {holds >= 4, fmt("%s data; M=10 >= M=40 on %d of 5 seeds (need 4); mean %.3f vs %.3f; per seed (M=10/M=40):%s",
                         mnist && *mnist ? "MNIST" : "generated", holds, mean10, mean40, per_seed.c_str())};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 8. Two runs of the same train configuration give identical metrics bytes.
Verdict determinism(const std::filesystem::path& root, Clock::time_point start) {
  const std::vector<std::string> configs = {
      "env = catcher\nalgorithm = a2c\nwrappers = gauss_bg, grayscale, resize, skip, stack\nresize_height = 12\n"
      "resize_width = 12\nepisodes = 60\nseeds = 0,1\neval_interval = 20\neval_episodes = 5\n",
      "env = localize\nalgorithm = ppo\nsynth_samples = 8\nsynth_height = 32\nsynth_width = 32\nwindow = 4\n"
      "episodes = 20\nseeds = 3\n",
      "env = catcher\nalgorithm = dqn\nwrappers = pure_noise\nepisodes = 30\nlearning_starts = 50\nseeds = 2\n",
  };
  std::size_t files = 0, differing = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::vector<std::filesystem::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      dirs.push_back(root / ("det" + std::to_string(i) + "_" + std::to_string(rep)));
      run_train(config(configs[i] + "out_dir = " + dirs.back().string() + "\n"));
    }
    for (auto seed : config(configs[i]).seeds()) {
      ++files;
      differing += slurp(metrics_path(dirs[0], seed)) != slurp(metrics_path(dirs[1], seed)) ? 1 : 0;
    }
  }
  const double secs = seconds_since(start);
  return {differing == 0 && secs < 600.0,
          fmt("%zu metrics files compared, %zu differ; acceptance runtime so far %.1f s", files, differing, secs)};
}

}  // namespace

int main(int argc, char** argv) {
  const auto t0 = Clock::now();
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--known-red=", 0) == 0) {
      for (const auto& id : split_list(arg.substr(12))) known_red.insert(std::stoi(id));
    } else {
      std::fprintf(stderr, "usage: natrl_acceptance [--known-red=N[,M...]]\n");
      return 2;
    }
  }
  report(1, "tabular Q-learning chain", chain_q_learning);
  report(2, "policy-gradient and approximator gradients", gradients);
  report(3, "classify visibility and return set", classify_dynamics);
  report(4, "video injection exactness", injection);
  report(5, "preprocessing bit-exactness", preprocessing);
  test::TempDir root("acceptance");
  report(6, "open-loop probe on Catcher", [&] { return openloop_probe(root.path()); });
  report(7, "step-limit ordering on MNIST-format digits", [&] { return step_limit_ordering(root.path()); });
  report(8, "determinism and runtime", [&] { return determinism(root.path(), t0); });
  const double total = seconds_since(t0);
  std::printf("acceptance runtime %.1f s\n", total);
  return failures == 0 ? 0 : 1;
}
