#pragma once

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "natrl/core/random.hpp"
#include "natrl/datasets/netpbm.hpp"

namespace natrl {

struct SegmentationSample {
  ImageTensor image;       // 3 channels
  ImageTensor label_mask;  // 1 channel, pixel value = class id (0 = background)
  std::set<int> classes_present;
};

struct Rect {
  int y0 = 0, x0 = 0, height = 0, width = 0;

  bool overlaps(const Rect& o) const {
    return y0 < o.y0 + o.height && o.y0 < y0 + height && x0 < o.x0 + o.width && o.x0 < x0 + width;
  }
};

inline std::set<int> mask_classes(const ImageTensor& mask) {
  std::set<int> present;
  for (auto v : mask.data) present.insert(v);
  return present;
}

inline void validate_segmentation(const SegmentationSample& s, int num_classes) {
  if (s.image.channels != 3 || s.label_mask.channels != 1) {
    throw ContractViolation("segmentation sample: expected 3-channel image and 1-channel mask");
  }
  if (s.image.height != s.label_mask.height || s.image.width != s.label_mask.width) {
    throw ContractViolation("segmentation sample: mask dimensions differ from image");
  }
  for (auto v : s.label_mask.data) {
    if (v >= num_classes) {
      throw ContractViolation("segmentation sample: mask value " + std::to_string(v) + " >= class count " +
                              std::to_string(num_classes));
    }
  }
}

// Attempts per object before giving up on finding a free spot.
inline constexpr int kMaxPlacementAttempts = 1000;

// Desk-scale stand-in for a segmentation dataset: `num_objects` disjoint
// axis-aligned rectangles with distinct non-zero class ids on a class-0
// background. Rectangle sides are drawn from [1, max(1, side / 3)].
inline SegmentationSample synth_segmentation(const SeedTree& seed, int height, int width, int num_classes,
                                             int num_objects, std::vector<Rect>* rects_out = nullptr) {
  if (num_objects < 1) throw GenerationError("synth_segmentation: num_objects must be >= 1");
  if (num_classes < 2 || num_classes > 256) throw GenerationError("synth_segmentation: num_classes must be in [2, 256]");
  if (num_objects > num_classes - 1) {
    throw GenerationError("synth_segmentation: " + std::to_string(num_objects) + " objects need distinct classes, only " +
                          std::to_string(num_classes - 1) + " available");
  }
  if (height < 1 || width < 1) throw GenerationError("synth_segmentation: empty image");

  Rng rng = seed.stream();
  std::vector<int> classes(num_classes - 1);
  for (int c = 1; c < num_classes; ++c) classes[c - 1] = c;
  for (int i = 0; i < num_objects; ++i) {
    const auto j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(num_classes - 1 - i)));
    std::swap(classes[i], classes[j]);
  }

  const int max_h = std::max(1, height / 3);
  const int max_w = std::max(1, width / 3);
  std::vector<Rect> rects;
  for (int i = 0; i < num_objects; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      Rect r;
      r.height = 1 + rng.uniform_index(max_h);
      r.width = 1 + rng.uniform_index(max_w);
      r.y0 = rng.uniform_index(height - r.height + 1);
      r.x0 = rng.uniform_index(width - r.width + 1);
      placed = std::none_of(rects.begin(), rects.end(), [&](const Rect& o) { return o.overlaps(r); });
      if (placed) rects.push_back(r);
    }
    if (!placed) {
      throw GenerationError("synth_segmentation: could not place object " + std::to_string(i) + " after " +
                            std::to_string(kMaxPlacementAttempts) + " attempts");
    }
  }

  SegmentationSample s;
  s.image = ImageTensor(height, width, 3);
  s.label_mask = ImageTensor(height, width, 1);
  for (std::size_t p = 0; p < s.image.pixel_count(); ++p) {
    const auto base = static_cast<std::uint8_t>(40 + rng.uniform_int(41));
    for (int c = 0; c < 3; ++c) s.image.data[p * 3 + c] = base;
  }
  for (int i = 0; i < num_objects; ++i) {
    const Rect& r = rects[i];
    const std::uint64_t color = mix64(static_cast<std::uint64_t>(classes[i]));
    for (int y = r.y0; y < r.y0 + r.height; ++y) {
      for (int x = r.x0; x < r.x0 + r.width; ++x) {
        s.label_mask.at(y, x, 0) = static_cast<std::uint8_t>(classes[i]);
        for (int c = 0; c < 3; ++c) {
          const int tint = static_cast<int>((color >> (8 * c)) & 0x7F) + 128;
          const int jitter = static_cast<int>(rng.uniform_int(17)) - 8;
          s.image.at(y, x, c) = static_cast<std::uint8_t>(std::clamp(tint + jitter, 0, 255));
        }
      }
    }
  }
  s.classes_present = mask_classes(s.label_mask);
  if (rects_out) *rects_out = rects;
  return s;
}

inline SegmentationSample synth_segmentation(std::uint64_t seed, int height, int width, int num_classes,
                                             int num_objects) {
  return synth_segmentation(SeedTree(seed), height, width, num_classes, num_objects);
}

// Directory of pairs image_<k>.ppm / mask_<k>.pgm, read in lexicographic order.
inline std::vector<SegmentationSample> load_segmentation_dir(const std::filesystem::path& dir, int num_classes) {
  if (!std::filesystem::is_directory(dir)) throw FormatError("segmentation directory '" + dir.string() + "' not found");
  std::vector<std::filesystem::path> images;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("image_", 0) == 0 && e.path().extension() == ".ppm") images.push_back(e.path());
  }
  std::sort(images.begin(), images.end());
  std::vector<SegmentationSample> out;
  for (const auto& ip : images) {
    const std::string key = ip.stem().string().substr(6);
    const auto mp = dir / ("mask_" + key + ".pgm");
    SegmentationSample s;
    s.image = read_netpbm(ip);
    s.label_mask = read_netpbm(mp);
    validate_segmentation(s, num_classes);
    s.classes_present = mask_classes(s.label_mask);
    out.push_back(std::move(s));
  }
  return out;
}

inline void write_segmentation_sample(const SegmentationSample& s, const std::filesystem::path& dir,
                                      const std::string& key) {
  write_netpbm(s.image, dir / ("image_" + key + ".ppm"));
  write_netpbm(s.label_mask, dir / ("mask_" + key + ".pgm"));
}

}  // namespace natrl
