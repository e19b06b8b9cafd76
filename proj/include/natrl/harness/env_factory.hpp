#pragma once

// Builds datasets, environments and wrapper chains from an ExperimentConfig.

#include <memory>
#include <string>
#include <vector>

#include "natrl/datasets/cifar.hpp"
#include "natrl/datasets/clips.hpp"
#include "natrl/datasets/idx.hpp"
#include "natrl/datasets/segmentation.hpp"
#include "natrl/envs/catcher.hpp"
#include "natrl/envs/classify.hpp"
#include "natrl/envs/localize.hpp"
#include "natrl/harness/experiment_config.hpp"
#include "natrl/wrappers/background.hpp"
#include "natrl/wrappers/frames.hpp"
#include "natrl/wrappers/noise.hpp"
#include "natrl/wrappers/preprocess.hpp"

namespace natrl {

inline constexpr int kClassifyDefaultMaxSteps = 20;

// Pass-through that remembers the last observation of the environment it
// wraps, used to dump raw frames alongside wrapped ones.
class TapEnv : public EnvWrapper {
 public:
  using EnvWrapper::EnvWrapper;

  Observation reset(const SeedTree& seed) override { return last_ = inner_->reset(seed); }
  StepResult step(int action) override {
    StepResult r = inner_->step(action);
    last_ = r.obs;
    return r;
  }
  std::string name() const override { return inner_->name(); }

  const Observation& last() const { return last_; }

 private:
  Observation last_;
};

inline const std::vector<std::string>& known_wrappers() {
  static const std::vector<std::string> names = {"video_bg", "gauss_bg", "pure_noise", "grayscale",
                                                 "resize",   "skip",     "stack"};
  return names;
}

// Everything loaded once per run and shared by all environment instances.
struct EnvSources {
  std::string kind;
  std::shared_ptr<const LabeledImageSet> classify_train, classify_test;
  std::shared_ptr<const std::vector<SegmentationSample>> localize_train, localize_test;
  int localize_classes = 0;
  CatcherParams catcher;
  std::shared_ptr<const ClipLibrary> clips_train, clips_test;
  EnvConfig env_config;
  std::vector<std::string> wrappers;
};

namespace detail {

inline bool same_file(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::error_code ec;
  return std::filesystem::equivalent(a, b, ec) && !ec;
}

inline std::filesystem::path path_or(const ExperimentConfig& cfg, const std::string& key,
                                     const std::filesystem::path& fallback) {
  const auto& v = cfg.str(key);
  return v.empty() ? fallback : std::filesystem::path(v);
}

inline std::vector<std::filesystem::path> files_or(const ExperimentConfig& cfg, const std::string& key,
                                                   const std::vector<std::filesystem::path>& fallback) {
  const auto items = cfg.list(key);
  if (items.empty()) return fallback;
  return {items.begin(), items.end()};
}

inline LabeledImageSet load_cifar_files(const std::vector<std::filesystem::path>& files, CifarVariant v, Split split) {
  LabeledImageSet all;
  all.num_classes = v == CifarVariant::kCifar10 ? 10 : 100;
  all.split = split;
  for (const auto& f : files) {
    auto part = load_cifar_binary(f, v, split);
    all.images.insert(all.images.end(), part.images.begin(), part.images.end());
    all.labels.insert(all.labels.end(), part.labels.begin(), part.labels.end());
  }
  return all;
}

inline void load_classify(const ExperimentConfig& cfg, EnvSources& src) {
  const std::filesystem::path dir = cfg.str("data_dir");
  const std::string& dataset = cfg.str("dataset");
  LabeledImageSet train, test;
  if (dataset == "mnist") {
    const auto ti = path_or(cfg, "train_images", dir / "train-images-idx3-ubyte");
    const auto tl = path_or(cfg, "train_labels", dir / "train-labels-idx1-ubyte");
    const auto vi = path_or(cfg, "test_images", dir / "t10k-images-idx3-ubyte");
    const auto vl = path_or(cfg, "test_labels", dir / "t10k-labels-idx1-ubyte");
    if (same_file(ti, vi)) throw ConfigError("train and test image files are the same file");
    train = load_mnist_idx(ti, tl, Split::kTrain);
    test = load_mnist_idx(vi, vl, Split::kTest);
  } else if (dataset == "cifar10" || dataset == "cifar100") {
    const auto v = dataset == "cifar10" ? CifarVariant::kCifar10 : CifarVariant::kCifar100;
    std::vector<std::filesystem::path> train_default, test_default;
    if (v == CifarVariant::kCifar10) {
      for (int i = 1; i <= 5; ++i) train_default.push_back(dir / ("data_batch_" + std::to_string(i) + ".bin"));
      test_default.push_back(dir / "test_batch.bin");
    } else {
      train_default.push_back(dir / "train.bin");
      test_default.push_back(dir / "test.bin");
    }
    const auto train_files = files_or(cfg, "train_files", train_default);
    const auto test_files = files_or(cfg, "test_files", test_default);
    for (const auto& a : train_files) {
      for (const auto& b : test_files) {
        if (same_file(a, b)) {
          throw ConfigError("file '" + a.string() + "' is listed in both the train and the test split");
        }
      }
    }
    train = load_cifar_files(train_files, v, Split::kTrain);
    test = load_cifar_files(test_files, v, Split::kTest);
  } else {
    throw ConfigError("classify: dataset must be mnist, cifar10 or cifar100, got '" + dataset + "'");
  }
  const auto limit = cfg.count("dataset_limit");
  if (limit > 0) {
    train = train.head(limit);
    test = test.head(limit);
  }
  src.classify_train = std::make_shared<LabeledImageSet>(std::move(train));
  src.classify_test = std::make_shared<LabeledImageSet>(std::move(test));
}

inline void load_localize(const ExperimentConfig& cfg, EnvSources& src) {
  const std::string& dataset = cfg.str("dataset");
  auto train = std::make_shared<std::vector<SegmentationSample>>();
  auto test = std::make_shared<std::vector<SegmentationSample>>();
  if (dataset == "synth" || dataset.empty()) {
    const auto n = cfg.count("synth_samples");
    if (n == 0) throw ConfigError("synth_samples must be >= 1");
    const int h = static_cast<int>(cfg.integer("synth_height"));
    const int w = static_cast<int>(cfg.integer("synth_width"));
    const int classes = static_cast<int>(cfg.integer("synth_classes"));
    const int objects = static_cast<int>(cfg.integer("synth_objects"));
    // Train samples use indices [0, n), test samples [n, 2n) of a fixed tree.
    const SeedTree data_seed = SeedTree(0).derive("synth_segmentation", 0);
    try {
      for (std::uint64_t k = 0; k < 2 * n; ++k) {
        (k < n ? train : test)->push_back(synth_segmentation(data_seed.derive("sample", k), h, w, classes, objects));
      }
    } catch (const GenerationError& e) {
      throw ConfigError(std::string("localize: ") + e.what());
    }
    src.localize_classes = classes;
  } else if (dataset == "segdir") {
    const std::filesystem::path dir = cfg.str("data_dir");
    src.localize_classes = static_cast<int>(cfg.integer("num_classes"));
    if (src.localize_classes < 2) throw ConfigError("segdir: num_classes must be >= 2");
    if (same_file(dir / "train", dir / "test")) throw ConfigError("segdir: train and test are the same");
    *train = load_segmentation_dir(dir / "train", src.localize_classes);
    *test = load_segmentation_dir(dir / "test", src.localize_classes);
  } else {
    throw ConfigError("localize: dataset must be synth or segdir, got '" + dataset + "'");
  }
  const auto limit = cfg.count("dataset_limit");
  if (limit > 0) {
    if (train->size() > limit) train->resize(limit);
    if (test->size() > limit) test->resize(limit);
  }
  src.localize_train = train;
  src.localize_test = test;
}

}  // namespace detail

// Loads datasets and clips and checks every setting that can be checked
// before an environment is stepped.
inline EnvSources load_env_sources(const ExperimentConfig& cfg) {
  EnvSources src;
  src.kind = cfg.str("env");
  src.wrappers = cfg.list("wrappers");
  for (const auto& w : src.wrappers) {
    if (std::find(known_wrappers().begin(), known_wrappers().end(), w) == known_wrappers().end()) {
      throw ConfigError("unknown wrapper '" + w + "'");
    }
  }

  EnvConfig& ec = src.env_config;
  ec.window = static_cast<int>(cfg.integer("window"));
  ec.gamma = cfg.real("gamma");
  const std::string& max_steps = cfg.str("max_steps");

  if (src.kind == "classify") {
    ec.kind = EnvKind::kClassify;
    ec.max_steps = max_steps == "auto" ? kClassifyDefaultMaxSteps : static_cast<int>(cfg.integer("max_steps"));
    detail::load_classify(cfg, src);
  } else if (src.kind == "localize") {
    ec.kind = EnvKind::kLocalize;
    ec.max_steps = max_steps == "auto" ? kLocalizeMaxSteps : static_cast<int>(cfg.integer("max_steps"));
    detail::load_localize(cfg, src);
  } else if (src.kind == "catcher") {
    ec.kind = EnvKind::kCatcher;
    if (max_steps != "auto") throw ConfigError("max_steps does not apply to catcher (fixed horizon)");
    src.catcher.size = static_cast<int>(cfg.integer("catcher_size"));
    src.catcher.paddle_width = static_cast<int>(cfg.integer("catcher_paddle"));
    src.catcher.validate();
    ec.max_steps = src.catcher.horizon();
  } else {
    throw ConfigError("env must be classify, localize or catcher, got '" + src.kind + "'");
  }
  ec.validate();

  if (std::find(src.wrappers.begin(), src.wrappers.end(), "video_bg") != src.wrappers.end()) {
    const std::string& dir = cfg.str("clip_dir");
    if (dir.empty()) throw ConfigError("video_bg wrapper needs clip_dir");
    const auto lib = load_clip_library(dir);
    const std::string& mode = cfg.str("clip_split");
    ClipSplitMode m;
    if (mode == "disjoint") m = ClipSplitMode::kDisjoint;
    else if (mode == "shared") m = ClipSplitMode::kShared;
    else throw ConfigError("clip_split must be disjoint or shared, got '" + mode + "'");
    src.clips_train = std::make_shared<ClipLibrary>(split_clips(lib, m, Split::kTrain));
    src.clips_test = std::make_shared<ClipLibrary>(split_clips(lib, m, Split::kTest));
    if (src.clips_train->empty() || src.clips_test->empty()) {
      throw ConfigError("clip library in '" + dir + "' leaves a split without clips");
    }
  }
  return src;
}

inline std::unique_ptr<Environment> make_base_env(const EnvSources& src, Split split) {
  EnvConfig ec = src.env_config;
  ec.split = split;
  if (src.kind == "classify") {
    return std::make_unique<ClassifyEnv>(split == Split::kTrain ? src.classify_train : src.classify_test, ec);
  }
  if (src.kind == "localize") {
    return std::make_unique<LocalizeEnv>(split == Split::kTrain ? src.localize_train : src.localize_test,
                                         src.localize_classes, ec.window, ec.max_steps);
  }
  return std::make_unique<CatcherEnv>(src.catcher);
}

// Wraps `env` with the named wrappers, first name innermost.
inline std::unique_ptr<Environment> apply_wrappers(std::unique_ptr<Environment> env,
                                                   const std::vector<std::string>& names, const EnvSources& src,
                                                   const ExperimentConfig& cfg, Split split) {
  for (const auto& w : names) {
    const Shape shape = env->observation_shape();
    const std::size_t channels = shape.empty() ? 0 : shape.back();
    if (w == "video_bg") {
      const auto& clips = split == Split::kTrain ? src.clips_train : src.clips_test;
      if (channels != 3) throw ConfigError("video_bg needs 3-channel frames, got " + shape_string(shape));
      const auto& frame = clips->clips.front().front();
      if (static_cast<std::size_t>(frame.height) != shape[0] || static_cast<std::size_t>(frame.width) != shape[1]) {
        throw ConfigError("clip frames are " + std::to_string(frame.height) + "x" + std::to_string(frame.width) +
                          " but observations are " + shape_string(shape) + "; convert the clips to the frame size");
      }
      env = std::make_unique<VideoBackgroundEnv>(std::move(env), clips);
    } else if (w == "gauss_bg") {
      if (channels != 3) throw ConfigError("gauss_bg needs 3-channel frames, got " + shape_string(shape));
      env = std::make_unique<GaussianBackgroundEnv>(std::move(env),
                                                    GaussianBackground{cfg.real("gauss_mean"), cfg.real("gauss_std")});
    } else if (w == "pure_noise") {
      env = std::make_unique<PureNoiseEnv>(std::move(env));
    } else if (w == "grayscale") {
      if (channels != 3) throw ConfigError("grayscale needs 3-channel frames, got " + shape_string(shape));
      env = std::make_unique<GrayscaleEnv>(std::move(env));
    } else if (w == "resize") {
      env = std::make_unique<ResizeEnv>(std::move(env), static_cast<int>(cfg.integer("resize_height")),
                                        static_cast<int>(cfg.integer("resize_width")));
    } else if (w == "skip") {
      env = std::make_unique<FrameSkipEnv>(
          std::move(env), FrameSkipParams{static_cast<int>(cfg.integer("skip_repeat")), cfg.real("sticky_p")});
    } else if (w == "stack") {
      env = std::make_unique<FrameStackEnv>(std::move(env), static_cast<int>(cfg.integer("stack_k")));
    }
  }
  return env;
}

inline std::unique_ptr<Environment> make_env(const EnvSources& src, const ExperimentConfig& cfg, Split split) {
  return apply_wrappers(make_base_env(src, split), src.wrappers, src, cfg, split);
}

// Number of goal classes carried in Observation::goal, 0 if none.
inline int goal_classes(const EnvSources& src) { return src.kind == "localize" ? src.localize_classes : 0; }

}  // namespace natrl
