#pragma once

// Checkpoint file format (all integers and floats little-endian):
//
//   file   := "NATRLCK1" u32 version(=1) u32 block_count block*
//   block  := u32 role_len, role bytes,
//             u32 kind (1 = linear, 2 = mlp, 3 = tabular),
//             u32 input_dim, u32 hidden_dim, u32 output_dim,
//             u32 flags (bit 0: linear has bias), u32 reserved(=0),
//             u64 step_count, u64 count, payload
//   payload:  kinds 1, 2 -> count f64 parameters in Approximator layout
//             kind 3     -> count rows of (u64 state id, output_dim f64),
//                           ascending by state id; input_dim = hidden_dim = 0

#include <bit>
#include <cstring>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "natrl/agents/approximator.hpp"
#include "natrl/agents/tabular.hpp"
#include "natrl/datasets/io.hpp"

namespace natrl {

inline constexpr char kCheckpointMagic[8] = {'N', 'A', 'T', 'R', 'L', 'C', 'K', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::uint32_t kTabularKind = 3;

struct CheckpointBlock {
  std::string role;
  std::uint64_t step_count = 0;
  std::variant<Approximator, QTable> model;
};

struct Checkpoint {
  std::vector<CheckpointBlock> blocks;

  const CheckpointBlock& get(const std::string& role) const {
    for (const auto& b : blocks) {
      if (b.role == role) return b;
    }
    throw FormatError("checkpoint has no '" + role + "' block");
  }
};

namespace detail {

class LeWriter {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const std::string& s) { out.insert(out.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> out;

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

class LeReader {
 public:
  explicit LeReader(const std::vector<std::uint8_t>& b) : b_(b) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(b_.begin() + static_cast<std::ptrdiff_t>(pos_), b_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ == b_.size(); }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw FormatError("checkpoint truncated", pos_);
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{b_[pos_ + static_cast<std::size_t>(i)]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  detail::LeWriter w;
  w.bytes(std::string(kCheckpointMagic, 8));
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(ckpt.blocks.size()));
  for (const auto& b : ckpt.blocks) {
    w.u32(static_cast<std::uint32_t>(b.role.size()));
    w.bytes(b.role);
    if (const auto* a = std::get_if<Approximator>(&b.model)) {
      w.u32(static_cast<std::uint32_t>(a->kind()));
      w.u32(static_cast<std::uint32_t>(a->input_dim()));
      w.u32(static_cast<std::uint32_t>(a->hidden_dim()));
      w.u32(static_cast<std::uint32_t>(a->output_dim()));
      w.u32(a->has_bias() ? 1u : 0u);
      w.u32(0);
      w.u64(b.step_count);
      w.u64(a->num_params());
      for (double v : a->params()) w.f64(v);
    } else {
      const auto& t = std::get<QTable>(b.model);
      const auto states = t.states();
      w.u32(kTabularKind);
      w.u32(0);
      w.u32(0);
      w.u32(static_cast<std::uint32_t>(t.num_actions()));
      w.u32(0);
      w.u32(0);
      w.u64(b.step_count);
      w.u64(states.size());
      for (auto s : states) {
        w.u64(s);
        for (double v : t.row(s)) w.f64(v);
      }
    }
  }
  return std::move(w.out);
}

// Tabular blocks come back with alpha = 1 and gamma = 0; the caller sets the
// learning parameters from its own configuration.
inline Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  detail::LeReader r(bytes);
  if (r.bytes(8) != std::string(kCheckpointMagic, 8)) throw FormatError("not a natrl checkpoint (bad magic)", 0);
  const auto version = r.u32();
  if (version != kCheckpointVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version), 8);
  const auto n_blocks = r.u32();
  Checkpoint ckpt;
  for (std::uint32_t i = 0; i < n_blocks; ++i) {
    CheckpointBlock b;
    b.role = r.bytes(r.u32());
    const std::size_t kind_at = r.pos();
    const auto kind = r.u32();
    const auto in = r.u32();
    const auto hidden = r.u32();
    const auto out = r.u32();
    const auto flags = r.u32();
    r.u32();
    b.step_count = r.u64();
    const auto count = r.u64();
    if (kind == static_cast<std::uint32_t>(ApproxKind::kLinear) || kind == static_cast<std::uint32_t>(ApproxKind::kMlp)) {
      Approximator a = kind == static_cast<std::uint32_t>(ApproxKind::kLinear)
                           ? Approximator::linear(static_cast<int>(in), static_cast<int>(out), (flags & 1u) != 0)
                           : Approximator::mlp(static_cast<int>(in), static_cast<int>(hidden), static_cast<int>(out));
      if (count != a.num_params()) throw FormatError("checkpoint parameter count does not match dimensions", r.pos());
      ParamVector p(count);
      for (auto& v : p) v = r.f64();
      a.set_params(std::move(p));
      b.model = std::move(a);
    } else if (kind == kTabularKind) {
      QTable t(static_cast<int>(out), 1.0, 0.0);
      for (std::uint64_t row = 0; row < count; ++row) {
        auto& q = t.mutable_row(r.u64());
        for (auto& v : q) v = r.f64();
      }
      b.model = std::move(t);
    } else {
      throw FormatError("unknown checkpoint block kind " + std::to_string(kind), kind_at);
    }
    ckpt.blocks.push_back(std::move(b));
  }
  if (!r.at_end()) throw FormatError("trailing bytes after checkpoint", r.pos());
  return ckpt;
}

inline void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  io::write_file(path, encode_checkpoint(ckpt));
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(io::read_file(path));
  } catch (const FormatError& e) {
    throw e.annotated("in '" + path.string() + "'");
  }
}

}  // namespace natrl
