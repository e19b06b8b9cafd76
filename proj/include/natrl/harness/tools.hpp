#pragma once

// Auxiliary subcommands: clip conversion, frame dumps and dataset summaries.

#include <filesystem>
#include <sstream>

#include "natrl/harness/runner.hpp"

namespace natrl {

// Reads a directory of clip subdirectories (or a single directory of frames,
// taken as one clip), resizes every frame to out_h x out_w with resize_area,
// replicates grayscale frames to RGB, and writes the clip library layout.
// Returns the number of clips written.
inline std::size_t convert_clips(const std::filesystem::path& src, int out_h, int out_w,
                                 const std::filesystem::path& out_dir) {
  if (out_h < 1 || out_w < 1) throw ConfigError("convert-clips: target size must be positive");
  if (!std::filesystem::is_directory(src)) throw FormatError("clip source '" + src.string() + "' is not a directory");
  auto dirs = sorted_entries(src, true);
  if (dirs.empty()) dirs.push_back(src);

  ClipLibrary lib;
  for (const auto& d : dirs) {
    Clip clip;
    for (const auto& f : sorted_entries(d, false)) {
      const auto ext = f.extension().string();
      if (ext != ".ppm" && ext != ".pgm" && ext != ".pnm") continue;
      ImageTensor img = read_netpbm(f);
      img = resize_area(img, out_h, out_w);
      if (img.channels == 1) {
        ImageTensor rgb(img.height, img.width, 3);
        for (std::size_t p = 0; p < img.data.size(); ++p) {
          for (std::size_t c = 0; c < 3; ++c) rgb.data[p * 3 + c] = img.data[p];
        }
        img = std::move(rgb);
      }
      clip.push_back(std::move(img));
    }
    if (!clip.empty()) lib.clips.push_back(std::move(clip));
  }
  if (lib.empty()) throw FormatError("no netpbm frames found under '" + src.string() + "'");
  write_clip_library(lib, out_dir);
  return lib.clips.size();
}

namespace detail {

// Splits an observation into its stacked frames and writes each one:
// 3 channels -> .ppm, 1 channel -> .pgm, 4 channels -> .ppm plus the last
// channel as a _mask.pgm.
inline std::size_t write_observation_frames(const ImageTensor& img, std::size_t frames,
                                            const std::filesystem::path& dir, const std::string& stem) {
  const int per = img.channels / static_cast<int>(frames);
  std::size_t written = 0;
  auto channels = [&](int first, int count) {
    ImageTensor out(img.height, img.width, count);
    for (std::size_t p = 0; p < static_cast<std::size_t>(img.height) * img.width; ++p) {
      for (int c = 0; c < count; ++c) {
        out.data[p * count + c] = img.data[p * img.channels + first + c];
      }
    }
    return out;
  };
  for (std::size_t f = 0; f < frames; ++f) {
    const int base = static_cast<int>(f) * per;
    const std::string name = frames > 1 ? stem + "_f" + std::to_string(f) : stem;
    if (per == 3 || per == 4) {
      write_netpbm(channels(base, 3), dir / (name + ".ppm"));
      ++written;
      if (per == 4) {
        write_netpbm(channels(base + 3, 1), dir / (name + "_mask.pgm"));
        ++written;
      }
    } else {
      for (int c = 0; c < per; ++c) {
        write_netpbm(channels(base + c, 1), dir / (name + (per > 1 ? "_c" + std::to_string(c) : "") + ".pgm"));
        ++written;
      }
    }
  }
  return written;
}

}  // namespace detail

// Plays uniformly random actions and writes the first n observations twice:
// raw_<i> as rendered by the base environment and obs_<i> after the wrapper
// chain. Pure-noise observations are mapped to 128 + 32 v for display.
// Returns the number of files written.
inline std::size_t dump_frames(const ExperimentConfig& cfg, std::size_t n, const std::filesystem::path& out_dir) {
  const EnvSources src = load_env_sources(cfg);
  if (n == 0) return 0;
  auto tap_owner = std::make_unique<TapEnv>(make_base_env(src, Split::kTrain));
  TapEnv* tap = tap_owner.get();
  auto env = apply_wrappers(std::move(tap_owner), src.wrappers, src, cfg, Split::kTrain);
  const bool stacked = std::find(src.wrappers.begin(), src.wrappers.end(), "stack") != src.wrappers.end();
  const bool noise = std::find(src.wrappers.begin(), src.wrappers.end(), "pure_noise") != src.wrappers.end();
  const std::size_t k = stacked ? cfg.count("stack_k") : 1;

  std::filesystem::create_directories(out_dir);
  const SeedTree root = SeedTree(cfg.seeds().front()).derive("dump", 0);
  Rng rng = root.derive("actions", 0).stream();
  std::size_t episode = 0, files = 0;
  char stem[32];
  Observation obs = env->reset(root.derive("episode", episode));
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(stem, sizeof stem, "%05zu", i);
    files += detail::write_observation_frames(to_display_image(tap->last()), 1, out_dir, std::string("raw_") + stem);
    const ImageTensor wrapped = noise ? to_display_image(obs, 128.0f, 32.0f) : to_display_image(obs);
    files += detail::write_observation_frames(wrapped, k, out_dir, std::string("obs_") + stem);
    if (i + 1 == n) break;
    if (env->done()) {
      obs = env->reset(root.derive("episode", ++episode));
    } else {
      obs = env->step(rng.uniform_index(env->num_actions())).obs;
    }
  }
  return files;
}

inline std::string describe_images(const LabeledImageSet& set) {
  std::ostringstream o;
  o << set.size() << " images";
  if (set.size() > 0) {
    const auto& f = set.images.front();
    o << " of " << f.height << "x" << f.width << "x" << f.channels;
  }
  std::vector<std::size_t> hist(static_cast<std::size_t>(std::max(set.num_classes, 0)), 0);
  for (int l : set.labels) {
    if (l >= 0 && static_cast<std::size_t>(l) < hist.size()) ++hist[static_cast<std::size_t>(l)];
  }
  o << ", " << set.num_classes << " classes, per-class counts:";
  for (auto h : hist) o << ' ' << h;
  return o.str();
}

// Human-readable summary of the configured environment's data.
inline std::string dataset_info(const ExperimentConfig& cfg) {
  const EnvSources src = load_env_sources(cfg);
  std::ostringstream o;
  o << "env: " << src.kind << "\n";
  if (src.kind == "classify") {
    o << "train: " << describe_images(*src.classify_train) << "\n";
    o << "test: " << describe_images(*src.classify_test) << "\n";
  } else if (src.kind == "localize") {
    auto line = [&](const char* name, const std::vector<SegmentationSample>& v) {
      o << name << ": " << v.size() << " samples";
      if (!v.empty()) o << " of " << v.front().image.height << "x" << v.front().image.width;
      o << ", " << src.localize_classes << " classes\n";
    };
    line("train", *src.localize_train);
    line("test", *src.localize_test);
  } else {
    o << "board: " << src.catcher.size << "x" << src.catcher.size << ", paddle " << src.catcher.paddle_width
      << ", open-loop optimum " << best_open_loop_value(src.catcher) << "\n";
  }
  if (src.clips_train) {
    o << "clips: " << src.clips_train->clips.size() << " train, " << src.clips_test->clips.size() << " test\n";
  }
  auto env = make_env(src, cfg, Split::kTrain);
  o << "observation: " << shape_string(env->observation_shape()) << ", actions: " << env->num_actions() << "\n";
  return o.str();
}

}  // namespace natrl
