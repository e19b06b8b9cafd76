#pragma once

#include <cstdint>
#include <vector>

#include "natrl/core/errors.hpp"
#include "natrl/core/random.hpp"

namespace natrl {

// Fixed-capacity ring buffer; the oldest item is overwritten once full.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ContractViolation("ReplayBuffer: capacity must be >= 1");
    items_.reserve(capacity);
  }

  void push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[static_cast<std::size_t>(insertions_ % capacity_)] = std::move(item);
    }
    ++insertions_;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t insertions() const { return insertions_; }
  const T& at(std::size_t i) const { return items_.at(i); }

  std::size_t sample_index(Rng& rng) const {
    if (items_.empty()) throw ContractViolation("ReplayBuffer: sample from empty buffer");
    return rng.uniform_int(items_.size());
  }

  // `n` items drawn uniformly with replacement.
  std::vector<const T*> sample(std::size_t n, Rng& rng) const {
    if (n > items_.size()) {
      throw ContractViolation("ReplayBuffer: batch of " + std::to_string(n) + " exceeds buffer size " +
                              std::to_string(items_.size()));
    }
    std::vector<const T*> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(&items_[sample_index(rng)]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::uint64_t insertions_ = 0;
  std::vector<T> items_;
};

}  // namespace natrl
