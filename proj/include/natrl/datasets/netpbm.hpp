#pragma once

// Binary netpbm: P5 (1 channel) and P6 (3 channels), maxval 255 only.

#include <cctype>
#include <filesystem>
#include <string>

#include "natrl/core/image.hpp"
#include "natrl/datasets/io.hpp"

namespace natrl {

namespace detail {

// Skips whitespace and '#' comments, then reads a decimal header field.
inline long netpbm_field(const std::vector<std::uint8_t>& b, std::size_t& pos, const std::string& what) {
  for (;;) {
    while (pos < b.size() && std::isspace(b[pos])) ++pos;
    if (pos < b.size() && b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  if (pos >= b.size() || !std::isdigit(b[pos])) throw FormatError("netpbm: expected " + what, pos);
  long v = 0;
  while (pos < b.size() && std::isdigit(b[pos])) {
    v = v * 10 + (b[pos] - '0');
    if (v > 1'000'000'000L) throw FormatError("netpbm: " + what + " too large", pos);
    ++pos;
  }
  return v;
}

}  // namespace detail

inline ImageTensor decode_netpbm(const std::vector<std::uint8_t>& b) {
  if (b.size() < 2 || b[0] != 'P' || (b[1] != '5' && b[1] != '6')) {
    throw FormatError("netpbm: unsupported magic (expected P5 or P6)", 0);
  }
  const int channels = b[1] == '5' ? 1 : 3;
  std::size_t pos = 2;
  const long width = detail::netpbm_field(b, pos, "width");
  const long height = detail::netpbm_field(b, pos, "height");
  const std::size_t maxval_at = pos;
  const long maxval = detail::netpbm_field(b, pos, "maxval");
  if (maxval != 255) throw FormatError("netpbm: unsupported maxval " + std::to_string(maxval), maxval_at);
  if (pos >= b.size() || !std::isspace(b[pos])) throw FormatError("netpbm: missing separator after header", pos);
  ++pos;
  const std::size_t body = static_cast<std::size_t>(width) * height * channels;
  if (b.size() - pos < body) throw FormatError("netpbm: truncated pixel data", b.size());
  std::vector<std::uint8_t> px(b.begin() + static_cast<std::ptrdiff_t>(pos),
                               b.begin() + static_cast<std::ptrdiff_t>(pos + body));
  return ImageTensor(static_cast<int>(height), static_cast<int>(width), channels, std::move(px));
}

inline std::vector<std::uint8_t> encode_netpbm(const ImageTensor& img) {
  if (img.channels != 1 && img.channels != 3) {
    throw ContractViolation("netpbm: only 1- or 3-channel tensors can be written, got " +
                            std::to_string(img.channels));
  }
  const std::string header = std::string(img.channels == 1 ? "P5" : "P6") + "\n" + std::to_string(img.width) +
                             " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data.begin(), img.data.end());
  return out;
}

inline ImageTensor read_netpbm(const std::filesystem::path& path) {
  try {
    return decode_netpbm(io::read_file(path));
  } catch (const FormatError& e) {
    throw e.annotated("in '" + path.string() + "'");
  }
}

inline void write_netpbm(const ImageTensor& img, const std::filesystem::path& path) {
  io::write_file(path, encode_netpbm(img));
}

}  // namespace natrl
