#pragma once

// Atari-style frame preprocessing: luma conversion and area resampling.
// Both are computed in exact integer arithmetic so results do not depend on
// floating-point rounding.

#include <cstdint>
#include <memory>

#include "natrl/core/environment.hpp"
#include "natrl/core/image.hpp"

namespace natrl {

// round(0.299 R + 0.587 G + 0.114 B), halves rounded up.
inline ImageTensor grayscale(const ImageTensor& frame) {
  if (frame.channels != 3) throw ContractViolation("grayscale: expected 3 channels");
  ImageTensor out(frame.height, frame.width, 1);
  for (std::size_t p = 0; p < frame.pixel_count(); ++p) {
    const std::uint32_t r = frame.data[p * 3], g = frame.data[p * 3 + 1], b = frame.data[p * 3 + 2];
    out.data[p] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
  return out;
}

// Area-weighted downsampling (or upsampling). Each output pixel is the mean
// of the source region it covers, with partially covered source pixels
// weighted by their covered fraction, rounded half up.
//
// Coordinates are scaled so every boundary is an integer: source row y spans
// [y*out_h, (y+1)*out_h) and output row i spans [i*H, (i+1)*H); likewise for
// columns. An output pixel's total weight is then exactly H*W.
inline ImageTensor resize_area(const ImageTensor& frame, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1) throw ContractViolation("resize_area: output dimensions must be >= 1");
  const std::int64_t H = frame.height, W = frame.width;
  if (H < 1 || W < 1) throw ContractViolation("resize_area: empty source frame");
  const int C = frame.channels;
  ImageTensor out(out_h, out_w, C);
  std::vector<std::int64_t> acc(static_cast<std::size_t>(C));
  const std::int64_t denom = H * W;
  for (std::int64_t i = 0; i < out_h; ++i) {
    const std::int64_t oy0 = i * H, oy1 = (i + 1) * H;
    const std::int64_t ys = oy0 / out_h, ye = (oy1 + out_h - 1) / out_h;
    for (std::int64_t j = 0; j < out_w; ++j) {
      const std::int64_t ox0 = j * W, ox1 = (j + 1) * W;
      const std::int64_t xs = ox0 / out_w, xe = (ox1 + out_w - 1) / out_w;
      std::fill(acc.begin(), acc.end(), 0);
      for (std::int64_t y = ys; y < ye; ++y) {
        const std::int64_t wy = std::min(oy1, (y + 1) * out_h) - std::max(oy0, y * out_h);
        if (wy <= 0) continue;
        for (std::int64_t x = xs; x < xe; ++x) {
          const std::int64_t wx = std::min(ox1, (x + 1) * out_w) - std::max(ox0, x * out_w);
          if (wx <= 0) continue;
          const std::size_t at = (static_cast<std::size_t>(y) * W + x) * C;
          for (int c = 0; c < C; ++c) acc[c] += wy * wx * frame.data[at + c];
        }
      }
      const std::size_t oat = (static_cast<std::size_t>(i) * out_w + j) * C;
      for (int c = 0; c < C; ++c) out.data[oat + c] = static_cast<std::uint8_t>((2 * acc[c] + denom) / (2 * denom));
    }
  }
  return out;
}

class GrayscaleEnv : public EnvWrapper {
 public:
  using EnvWrapper::EnvWrapper;

  Observation reset(const SeedTree& seed) override { return convert(inner_->reset(seed)); }
  StepResult step(int action) override {
    StepResult r = inner_->step(action);
    r.obs = convert(r.obs);
    return r;
  }
  Shape observation_shape() const override {
    Shape s = inner_->observation_shape();
    s.back() = 1;
    return s;
  }
  std::string name() const override { return "grayscale(" + inner_->name() + ")"; }

 private:
  static Observation convert(const Observation& obs) { return to_observation(grayscale(to_image(obs))); }
};

class ResizeEnv : public EnvWrapper {
 public:
  ResizeEnv(std::unique_ptr<Environment> inner, int out_h, int out_w)
      : EnvWrapper(std::move(inner)), out_h_(out_h), out_w_(out_w) {
    if (out_h < 1 || out_w < 1) throw ConfigError("resize: output dimensions must be >= 1");
  }

  Observation reset(const SeedTree& seed) override { return convert(inner_->reset(seed)); }
  StepResult step(int action) override {
    StepResult r = inner_->step(action);
    r.obs = convert(r.obs);
    return r;
  }
  Shape observation_shape() const override {
    Shape s = inner_->observation_shape();
    s[0] = static_cast<std::size_t>(out_h_);
    s[1] = static_cast<std::size_t>(out_w_);
    return s;
  }
  std::string name() const override { return "resize(" + inner_->name() + ")"; }

 private:
  Observation convert(const Observation& obs) const {
    return to_observation(resize_area(to_image(obs), out_h_, out_w_));
  }

  int out_h_;
  int out_w_;
};

}  // namespace natrl
