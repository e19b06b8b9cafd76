#pragma once

// CIFAR-10/100 binary batches.
//
// A record is the label byte(s) followed by 3072 pixel bytes stored as three
// 32x32 planes (all red, then all green, then all blue). Loaded tensors are
// converted to interleaved RGB: out[(y*32 + x)*3 + c] = plane_c[y*32 + x].
// CIFAR-100 records carry <coarse, fine>; the fine label is kept.

#include <filesystem>

#include "natrl/datasets/io.hpp"
#include "natrl/datasets/labeled.hpp"

namespace natrl {

enum class CifarVariant { kCifar10, kCifar100 };

inline constexpr int kCifarSide = 32;
inline constexpr std::size_t kCifarPixels = 3 * kCifarSide * kCifarSide;

inline std::size_t cifar_record_size(CifarVariant v) {
  return (v == CifarVariant::kCifar10 ? 1 : 2) + kCifarPixels;
}

inline LabeledImageSet load_cifar_binary(const std::filesystem::path& path, CifarVariant variant,
                                         Split split = Split::kTrain) {
  const auto bytes = io::read_file(path);
  const std::size_t record = cifar_record_size(variant);
  if (bytes.size() % record != 0) {
    throw FormatError("file length " + std::to_string(bytes.size()) + " is not a multiple of the " +
                          std::to_string(record) + "-byte record in '" + path.string() + "'",
                      bytes.size() - bytes.size() % record);
  }
  const std::size_t label_bytes = record - kCifarPixels;
  LabeledImageSet set;
  set.num_classes = variant == CifarVariant::kCifar10 ? 10 : 100;
  set.split = split;
  const std::size_t n = bytes.size() / record;
  set.images.reserve(n);
  set.labels.reserve(n);
  constexpr std::size_t plane = kCifarSide * kCifarSide;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t base = i * record;
    const std::size_t label_at = base + label_bytes - 1;  // fine label for CIFAR-100
    const int label = bytes[label_at];
    if (label >= set.num_classes) {
      throw FormatError("label " + std::to_string(label) + " out of range in '" + path.string() + "'", label_at);
    }
    ImageTensor img(kCifarSide, kCifarSide, 3);
    const std::uint8_t* px = bytes.data() + base + label_bytes;
    for (std::size_t p = 0; p < plane; ++p) {
      for (std::size_t c = 0; c < 3; ++c) img.data[p * 3 + c] = px[c * plane + p];
    }
    set.images.push_back(std::move(img));
    set.labels.push_back(label);
  }
  return set;
}

}  // namespace natrl
