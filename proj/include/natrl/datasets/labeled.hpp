#pragma once

#include <string>
#include <vector>

#include "natrl/core/config.hpp"
#include "natrl/core/errors.hpp"
#include "natrl/core/image.hpp"

namespace natrl {

struct LabeledImageSet {
  std::vector<ImageTensor> images;
  std::vector<int> labels;
  int num_classes = 0;
  Split split = Split::kTrain;

  std::size_t size() const { return images.size(); }

  void validate() const {
    if (images.size() != labels.size()) {
      throw ContractViolation("LabeledImageSet: " + std::to_string(images.size()) + " images but " +
                              std::to_string(labels.size()) + " labels");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0 || labels[i] >= num_classes) {
        throw ContractViolation("LabeledImageSet: label " + std::to_string(labels[i]) + " at index " +
                                std::to_string(i) + " outside [0, " + std::to_string(num_classes) + ")");
      }
    }
  }

  // First `n` items (or all, if fewer).
  LabeledImageSet head(std::size_t n) const {
    LabeledImageSet out;
    out.num_classes = num_classes;
    out.split = split;
    n = std::min(n, images.size());
    out.images.assign(images.begin(), images.begin() + static_cast<std::ptrdiff_t>(n));
    out.labels.assign(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
  }
};

}  // namespace natrl
