#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "natrl/core/errors.hpp"

namespace natrl {

// H x W x C grid of 8-bit intensities, row-major with interleaved channels:
// data[(y * width + x) * channels + c].
struct ImageTensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;

  ImageTensor() = default;

  ImageTensor(int h, int w, int c, std::uint8_t fill = 0) : height(h), width(w), channels(c) {
    check_dims(h, w, c);
    data.assign(static_cast<std::size_t>(h) * w * c, fill);
  }

  ImageTensor(int h, int w, int c, std::vector<std::uint8_t> bytes)
      : height(h), width(w), channels(c), data(std::move(bytes)) {
    check_dims(h, w, c);
    if (data.size() != static_cast<std::size_t>(h) * w * c) {
      throw ContractViolation("ImageTensor: data length " + std::to_string(data.size()) +
                              " does not match " + std::to_string(h) + "x" + std::to_string(w) +
                              "x" + std::to_string(c));
    }
  }

  std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
  std::size_t offset(int y, int x) const {
    return (static_cast<std::size_t>(y) * width + x) * channels;
  }

  std::uint8_t& at(int y, int x, int c) { return data[offset(y, x) + c]; }
  std::uint8_t at(int y, int x, int c) const { return data[offset(y, x) + c]; }

  bool same_shape(const ImageTensor& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }

  bool operator==(const ImageTensor&) const = default;

 private:
  static void check_dims(int h, int w, int c) {
    if (h < 0 || w < 0 || c < 1) {
      throw ContractViolation("ImageTensor: invalid dimensions " + std::to_string(h) + "x" +
                              std::to_string(w) + "x" + std::to_string(c));
    }
  }
};

}  // namespace natrl
