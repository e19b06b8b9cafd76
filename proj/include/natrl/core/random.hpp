#pragma once

// Deterministic randomness for the whole library.
//
// Every random draw in natrl comes from SplitMix64 (Steele, Lea & Flood,
// "Fast splittable pseudorandom number generators", OOPSLA 2014). The same
// 64-bit finalizer is used to derive child seeds, so a (root, path) pair
// names one stream on every platform. Platform generators from <random> are
// never used because their distributions are implementation-defined.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace natrl {

// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// 64-bit FNV-1a, used to fold derivation labels into seeds.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Lemire's multiply-shift with rejection, so
  // the result is exactly unbiased.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t x = next_u64();
    auto m = static_cast<unsigned __int128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = next_u64();
        m = static_cast<unsigned __int128>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  int uniform_index(int n) { return static_cast<int>(uniform_int(static_cast<std::uint64_t>(n))); }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller; consumes exactly two 64-bit draws.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// A node in the seed derivation tree. Children are named by (label, index);
// identical paths from the same root always produce the same stream.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t root = 0) : root_(root), key_(mix64(root ^ 0x6A09E667F3BCC909ULL)) {}

  SeedTree derive(std::string_view label, std::uint64_t index) const {
    SeedTree child = *this;
    const std::uint64_t tag = mix64(fnv1a64(label) + mix64(index ^ 0xD1B54A32D192ED03ULL));
    child.key_ = mix64(key_ ^ tag) + 0x9E3779B97F4A7C15ULL;
    child.path_.emplace_back(std::string(label), index);
    return child;
  }

  Rng stream() const { return Rng(key_); }

  std::uint64_t root() const { return root_; }
  std::uint64_t key() const { return key_; }
  const std::vector<std::pair<std::string, std::uint64_t>>& path() const { return path_; }

 private:
  std::uint64_t root_;
  std::uint64_t key_;
  std::vector<std::pair<std::string, std::uint64_t>> path_;
};

inline SeedTree derive_seed(const SeedTree& tree, std::string_view label, std::uint64_t index) {
  return tree.derive(label, index);
}

// Fisher-Yates shuffle driven by Rng.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = rng.uniform_int(i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace natrl
