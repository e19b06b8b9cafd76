#pragma once

#include <algorithm>
#include <string>

#include "natrl/core/errors.hpp"

namespace natrl {

enum class Move : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr int kNumMoves = 4;

struct Cell {
  int row = 0;
  int col = 0;
  bool operator==(const Cell&) const = default;
};

struct PixelRect {
  int y0 = 0, x0 = 0, y1 = 0, x1 = 0;  // half-open
};

// Coarse grid of w x w cells laid over an H x W image. The agent walks one
// cell per move; windows at the right/bottom edge are clipped to the image.
struct NavGrid {
  int height = 0;
  int width = 0;
  int window = 1;

  NavGrid() = default;
  NavGrid(int h, int w, int win) : height(h), width(w), window(win) {
    if (h < 1 || w < 1) throw ContractViolation("NavGrid: empty image");
    if (win < 1) throw ContractViolation("NavGrid: window must be >= 1");
  }

  int rows() const { return (height + window - 1) / window; }
  int cols() const { return (width + window - 1) / window; }

  bool contains(Cell c) const { return c.row >= 0 && c.row < rows() && c.col >= 0 && c.col < cols(); }

  PixelRect footprint(Cell c) const {
    return {c.row * window, c.col * window, std::min(height, (c.row + 1) * window),
            std::min(width, (c.col + 1) * window)};
  }

  Cell moved(Cell c, Move m) const {
    switch (m) {
      case Move::kUp: c.row = std::max(0, c.row - 1); break;
      case Move::kDown: c.row = std::min(rows() - 1, c.row + 1); break;
      case Move::kLeft: c.col = std::max(0, c.col - 1); break;
      case Move::kRight: c.col = std::min(cols() - 1, c.col + 1); break;
    }
    return c;
  }

  // Cell holding the image's center pixel (H/2, W/2).
  Cell center() const { return {(height / 2) / window, (width / 2) / window}; }
};

}  // namespace natrl
