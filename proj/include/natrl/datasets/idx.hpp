#pragma once

// MNIST IDX reader/writer. Headers are big-endian:
//   images: 0x00000803, count, rows, cols, then count*rows*cols bytes
//   labels: 0x00000801, count, then count bytes

#include <filesystem>
#include <string>

#include "natrl/datasets/io.hpp"
#include "natrl/datasets/labeled.hpp"

namespace natrl {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
inline constexpr int kMnistClasses = 10;

inline LabeledImageSet load_mnist_idx(const std::filesystem::path& images_path,
                                      const std::filesystem::path& labels_path,
                                      Split split = Split::kTrain) {
  const auto img = io::read_file(images_path);
  const auto lab = io::read_file(labels_path);
  const std::string in_img = " in '" + images_path.string() + "'";
  const std::string in_lab = " in '" + labels_path.string() + "'";

  if (img.size() < 16) throw FormatError("truncated IDX image header" + in_img, img.size());
  if (io::read_be32(img, 0) != kIdxImageMagic) throw FormatError("bad IDX image magic" + in_img, 0);
  if (lab.size() < 8) throw FormatError("truncated IDX label header" + in_lab, lab.size());
  if (io::read_be32(lab, 0) != kIdxLabelMagic) throw FormatError("bad IDX label magic" + in_lab, 0);

  const std::uint32_t count = io::read_be32(img, 4);
  const std::uint32_t rows = io::read_be32(img, 8);
  const std::uint32_t cols = io::read_be32(img, 12);
  const std::uint32_t label_count = io::read_be32(lab, 4);
  if (label_count != count) {
    throw FormatError("label count " + std::to_string(label_count) + " does not match image count " +
                          std::to_string(count) + in_lab,
                      4);
  }
  if (count > 0 && (rows == 0 || cols == 0)) throw FormatError("zero image dimension" + in_img, 8);

  const std::size_t image_bytes = static_cast<std::size_t>(rows) * cols;
  LabeledImageSet set;
  set.num_classes = kMnistClasses;
  set.split = split;
  set.images.reserve(count);
  set.labels.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t begin = 16 + i * image_bytes;
    if (begin + image_bytes > img.size()) {
      throw FormatError("truncated IDX image " + std::to_string(i) + in_img, img.size());
    }
    std::vector<std::uint8_t> px(img.begin() + static_cast<std::ptrdiff_t>(begin),
                                 img.begin() + static_cast<std::ptrdiff_t>(begin + image_bytes));
    set.images.emplace_back(static_cast<int>(rows), static_cast<int>(cols), 1, std::move(px));

    const std::size_t label_at = 8 + i;
    if (label_at >= lab.size()) throw FormatError("truncated IDX label " + std::to_string(i) + in_lab, lab.size());
    if (lab[label_at] >= kMnistClasses) {
      throw FormatError("label " + std::to_string(lab[label_at]) + " out of range" + in_lab, label_at);
    }
    set.labels.push_back(lab[label_at]);
  }
  return set;
}

inline void write_mnist_idx(const LabeledImageSet& set, const std::filesystem::path& images_path,
                            const std::filesystem::path& labels_path) {
  set.validate();
  std::vector<std::uint8_t> img;
  std::vector<std::uint8_t> lab;
  const int rows = set.images.empty() ? 28 : set.images.front().height;
  const int cols = set.images.empty() ? 28 : set.images.front().width;
  io::append_be32(img, kIdxImageMagic);
  io::append_be32(img, static_cast<std::uint32_t>(set.size()));
  io::append_be32(img, static_cast<std::uint32_t>(rows));
  io::append_be32(img, static_cast<std::uint32_t>(cols));
  io::append_be32(lab, kIdxLabelMagic);
  io::append_be32(lab, static_cast<std::uint32_t>(set.size()));
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& im = set.images[i];
    if (im.height != rows || im.width != cols || im.channels != 1) {
      throw ContractViolation("write_mnist_idx: image " + std::to_string(i) + " is not " +
                              std::to_string(rows) + "x" + std::to_string(cols) + "x1");
    }
    img.insert(img.end(), im.data.begin(), im.data.end());
    lab.push_back(static_cast<std::uint8_t>(set.labels[i]));
  }
  io::write_file(images_path, img);
  io::write_file(labels_path, lab);
}

}  // namespace natrl
