#pragma once

// Frame clips for background injection.
//
// On disk a library is a directory of clip_<k>/frame_<n>.ppm files with
// five-digit zero padding; clips and frames are taken in lexicographic order.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "natrl/core/config.hpp"
#include "natrl/core/random.hpp"
#include "natrl/datasets/netpbm.hpp"

namespace natrl {

using Clip = std::vector<ImageTensor>;

struct ClipLibrary {
  std::vector<Clip> clips;

  bool empty() const { return clips.empty(); }

  void validate() const {
    for (std::size_t k = 0; k < clips.size(); ++k) {
      if (clips[k].empty()) throw ContractViolation("ClipLibrary: clip " + std::to_string(k) + " is empty");
      for (const auto& f : clips[k]) {
        if (!f.same_shape(clips[k].front())) {
          throw ContractViolation("ClipLibrary: clip " + std::to_string(k) + " mixes frame sizes");
        }
      }
    }
  }
};

inline std::string clip_dir_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "clip_%05zu", k);
  return buf;
}

inline std::string frame_file_name(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu.ppm", n);
  return buf;
}

inline std::vector<std::filesystem::path> sorted_entries(const std::filesystem::path& dir, bool directories) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (directories ? e.is_directory() : e.is_regular_file()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline ClipLibrary load_clip_library(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw FormatError("clip directory '" + dir.string() + "' not found");
  ClipLibrary lib;
  for (const auto& cd : sorted_entries(dir, true)) {
    if (cd.filename().string().rfind("clip_", 0) != 0) continue;
    Clip clip;
    for (const auto& fp : sorted_entries(cd, false)) {
      if (fp.filename().string().rfind("frame_", 0) != 0) continue;
      clip.push_back(read_netpbm(fp));
    }
    lib.clips.push_back(std::move(clip));
  }
  lib.validate();
  return lib;
}

inline void write_clip_library(const ClipLibrary& lib, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t k = 0; k < lib.clips.size(); ++k) {
    const auto cd = dir / clip_dir_name(k);
    std::filesystem::create_directories(cd);
    for (std::size_t n = 0; n < lib.clips[k].size(); ++n) write_netpbm(lib.clips[k][n], cd / frame_file_name(n));
  }
}

enum class ClipSplitMode { kDisjoint, kShared };

// Disjoint: even-indexed clips train, odd-indexed clips test.
inline ClipLibrary split_clips(const ClipLibrary& lib, ClipSplitMode mode, Split split) {
  if (mode == ClipSplitMode::kShared) return lib;
  ClipLibrary out;
  const std::size_t parity = split == Split::kTrain ? 0 : 1;
  for (std::size_t k = 0; k < lib.clips.size(); ++k) {
    if (k % 2 == parity) out.clips.push_back(lib.clips[k]);
  }
  return out;
}

// Yields consecutive frames from randomly chosen clips. When the current clip
// runs out (or nothing has been drawn yet) a clip is chosen uniformly and a
// start index uniformly within it, and reading continues from there.
class ClipSampler {
 public:
  ClipSampler(const ClipLibrary& lib, Rng rng) : lib_(&lib), rng_(rng) {
    if (lib.empty()) throw ContractViolation("ClipSampler: empty clip library");
  }

  void reseed(Rng rng) {
    rng_ = rng;
    active_ = false;
  }

  void start_at(std::size_t clip, std::size_t index) {
    if (clip >= lib_->clips.size() || index >= lib_->clips[clip].size()) {
      throw ContractViolation("ClipSampler::start_at: position out of range");
    }
    clip_ = clip;
    index_ = index;
    active_ = true;
  }

  // (clip, frame) of the next frame, advancing the cursor.
  std::pair<std::size_t, std::size_t> next_position() {
    if (!active_ || index_ >= lib_->clips[clip_].size()) {
      clip_ = rng_.uniform_int(lib_->clips.size());
      index_ = rng_.uniform_int(lib_->clips[clip_].size());
      active_ = true;
    }
    return {clip_, index_++};
  }

  const ImageTensor& next() {
    auto [c, i] = next_position();
    return lib_->clips[c][i];
  }

 private:
  const ClipLibrary* lib_;
  Rng rng_;
  std::size_t clip_ = 0;
  std::size_t index_ = 0;
  bool active_ = false;
};

inline std::vector<ImageTensor> sample_consecutive_frames(const ClipLibrary& lib, const SeedTree& seed, std::size_t n) {
  ClipSampler sampler(lib, seed.stream());
  std::vector<ImageTensor> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.next());
  return out;
}

}  // namespace natrl
