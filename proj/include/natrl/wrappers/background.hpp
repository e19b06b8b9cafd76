#pragma once

// Background injection: every exactly-black pixel (0,0,0) of a rendered frame
// is replaced, either by the co-located pixel of a natural video frame or by
// Gaussian noise drawn fresh for each frame.

#include <algorithm>
#include <cmath>
#include <memory>

#include "natrl/core/environment.hpp"
#include "natrl/datasets/clips.hpp"

namespace natrl {

inline bool is_black(const ImageTensor& img, std::size_t pixel) {
  const std::size_t at = pixel * 3;
  return img.data[at] == 0 && img.data[at + 1] == 0 && img.data[at + 2] == 0;
}

inline ImageTensor inject_video_background(const ImageTensor& frame, const ImageTensor& video_frame) {
  if (frame.channels != 3 || !frame.same_shape(video_frame)) {
    throw ContractViolation("inject_video_background: frame and video frame must be equal-sized 3-channel images");
  }
  ImageTensor out = frame;
  for (std::size_t p = 0; p < frame.pixel_count(); ++p) {
    if (!is_black(frame, p)) continue;
    for (std::size_t c = 0; c < 3; ++c) out.data[p * 3 + c] = video_frame.data[p * 3 + c];
  }
  return out;
}

struct GaussianBackground {
  double mean = 128.0;
  double stddev = 32.0;
};

// Each channel of each black pixel gets an independent draw from
// N(mean, stddev^2), rounded and clipped to [0, 255].
inline ImageTensor inject_gaussian_background(const ImageTensor& frame, Rng& rng, GaussianBackground params = {}) {
  if (frame.channels != 3) throw ContractViolation("inject_gaussian_background: expected 3 channels");
  ImageTensor out = frame;
  for (std::size_t p = 0; p < frame.pixel_count(); ++p) {
    if (!is_black(frame, p)) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      const double v = std::clamp(std::round(rng.normal(params.mean, params.stddev)), 0.0, 255.0);
      out.data[p * 3 + c] = static_cast<std::uint8_t>(v);
    }
  }
  return out;
}

inline ImageTensor inject_gaussian_background(const ImageTensor& frame, const SeedTree& seed,
                                              GaussianBackground params = {}) {
  Rng rng = seed.stream();
  return inject_gaussian_background(frame, rng, params);
}

// Consecutive observations use consecutive frames from the clip sampler, so
// the background keeps its optical flow.
class VideoBackgroundEnv : public EnvWrapper {
 public:
  VideoBackgroundEnv(std::unique_ptr<Environment> inner, std::shared_ptr<const ClipLibrary> clips)
      : EnvWrapper(std::move(inner)), clips_(std::move(clips)), sampler_(checked(clips_), Rng(0)) {}

  Observation reset(const SeedTree& seed) override {
    sampler_.reseed(seed.derive("video_background", 0).stream());
    return inject(inner_->reset(seed));
  }

  StepResult step(int action) override {
    StepResult r = inner_->step(action);
    r.obs = inject(r.obs);
    return r;
  }

  std::string name() const override { return "video_bg(" + inner_->name() + ")"; }

  ClipSampler& sampler() { return sampler_; }

 private:
  static const ClipLibrary& checked(const std::shared_ptr<const ClipLibrary>& lib) {
    if (!lib || lib->empty()) throw ConfigError("video background: empty clip library");
    return *lib;
  }

  Observation inject(const Observation& obs) {
    return to_observation(inject_video_background(to_image(obs), sampler_.next()));
  }

  std::shared_ptr<const ClipLibrary> clips_;
  ClipSampler sampler_;
};

class GaussianBackgroundEnv : public EnvWrapper {
 public:
  GaussianBackgroundEnv(std::unique_ptr<Environment> inner, GaussianBackground params = {})
      : EnvWrapper(std::move(inner)), params_(params), rng_(0) {}

  Observation reset(const SeedTree& seed) override {
    rng_ = seed.derive("gaussian_background", 0).stream();
    return inject(inner_->reset(seed));
  }

  StepResult step(int action) override {
    StepResult r = inner_->step(action);
    r.obs = inject(r.obs);
    return r;
  }

  std::string name() const override { return "gauss_bg(" + inner_->name() + ")"; }

 private:
  Observation inject(const Observation& obs) {
    return to_observation(inject_gaussian_background(to_image(obs), rng_, params_));
  }

  GaussianBackground params_;
  Rng rng_;
};

}  // namespace natrl
