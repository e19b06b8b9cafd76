#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "natrl/core/errors.hpp"
#include "natrl/core/image.hpp"

namespace natrl {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

inline std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

// What an agent sees. Pixel observations use shape {H, W, C} with the same
// interleaved layout as ImageTensor. `goal` carries the target class of the
// localization task and is empty elsewhere.
struct Observation {
  Shape shape;
  std::vector<float> values;
  std::optional<int> goal;

  bool operator==(const Observation&) const = default;
};

inline Observation to_observation(const ImageTensor& img) {
  Observation obs;
  obs.shape = {static_cast<std::size_t>(img.height), static_cast<std::size_t>(img.width),
               static_cast<std::size_t>(img.channels)};
  obs.values.assign(img.data.begin(), img.data.end());
  return obs;
}

inline bool is_pixel_observation(const Observation& obs) {
  if (obs.shape.size() != 3) return false;
  for (float v : obs.values) {
    if (!(v >= 0.0f && v <= 255.0f) || v != std::floor(v)) return false;
  }
  return true;
}

// Exact inverse of to_observation; rejects anything that is not a rank-3
// tensor of integral values in [0, 255].
inline ImageTensor to_image(const Observation& obs) {
  if (obs.shape.size() != 3) {
    throw ContractViolation("to_image: expected rank-3 observation, got " + shape_string(obs.shape));
  }
  ImageTensor img(static_cast<int>(obs.shape[0]), static_cast<int>(obs.shape[1]),
                  static_cast<int>(obs.shape[2]));
  for (std::size_t i = 0; i < obs.values.size(); ++i) {
    const float v = obs.values[i];
    if (!(v >= 0.0f && v <= 255.0f) || v != std::floor(v)) {
      throw ContractViolation("to_image: value " + std::to_string(v) + " at index " +
                              std::to_string(i) + " is not an 8-bit intensity");
    }
    img.data[i] = static_cast<std::uint8_t>(v);
  }
  return img;
}

// Lossy conversion for display: v -> clamp(round(offset + scale * v)).
inline ImageTensor to_display_image(const Observation& obs, float offset = 0.0f, float scale = 1.0f) {
  if (obs.shape.size() != 3) {
    throw ContractViolation("to_display_image: expected rank-3 observation");
  }
  ImageTensor img(static_cast<int>(obs.shape[0]), static_cast<int>(obs.shape[1]),
                  static_cast<int>(obs.shape[2]));
  for (std::size_t i = 0; i < obs.values.size(); ++i) {
    float v = std::round(offset + scale * obs.values[i]);
    v = v < 0.0f ? 0.0f : (v > 255.0f ? 255.0f : v);
    img.data[i] = static_cast<std::uint8_t>(v);
  }
  return img;
}

}  // namespace natrl
