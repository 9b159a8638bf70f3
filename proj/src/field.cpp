#include "evac/field.hpp"

#include <algorithm>
#include <deque>
#include <ostream>

#include <fmt/format.h>

namespace evac {

FloorField::FloorField(const CabinLayout& layout)
    : FloorField(layout.width(), layout.height(), layout.patches()) {}

bool FloorField::walkable(int col, int row, std::span<const PatchKind> patches) const {
  return col >= 0 && col < width_ && row >= 0 && row < height_ &&
         is_walkable(patches[static_cast<std::size_t>(row * width_ + col)]);
}

FloorField::FloorField(int width, int height, std::span<const PatchKind> patches)
    : width_(width),
      height_(height),
      x_min_(-(width / 2)),
      y_max_(height / 2),
      distance_(patches.size(), kUnwalkable),
      intensity_(patches.size(), kUnwalkable) {
  if (width <= 0 || height <= 0 ||
      patches.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::EmptyInput, "field grid dimensions do not match the patch count");
  }
  // Multi-source BFS from every open exit over the Moore neighbourhood.
  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    if (patches[i] == PatchKind::ExitOpen) {
      distance_[i] = 0;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    const int row = static_cast<int>(i) / width_;
    const int col = static_cast<int>(i) % width_;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if ((dr == 0 && dc == 0) || !walkable(col + dc, row + dr, patches)) continue;
        const auto qi = static_cast<std::size_t>((row + dr) * width_ + col + dc);
        if (distance_[qi] == kUnwalkable) {
          distance_[qi] = distance_[i] + 1;
          frontier.push_back(qi);
        }
      }
    }
  }

  for (std::size_t i = 0; i < patches.size(); ++i) {
    if (!is_walkable(patches[i])) continue;
    if (distance_[i] == kUnwalkable) {
      const int row = static_cast<int>(i) / width_;
      const int col = static_cast<int>(i) % width_;
      throw Error(ErrorKind::UnreachablePatch, fmt::format("patch ({}, {}) cannot reach an open exit",
                                                           x_min_ + col, y_max_ - row));
    }
    max_distance_ = std::max(max_distance_, distance_[i]);
  }
  for (std::size_t i = 0; i < patches.size(); ++i) {
    if (distance_[i] != kUnwalkable) intensity_[i] = max_distance_ + 1 - distance_[i];
  }
}

std::size_t FloorField::index_of(GridPos p) const {
  const int col = p.x - x_min_;
  const int row = y_max_ - p.y;
  if (col < 0 || col >= width_ || row < 0 || row >= height_) {
    throw Error(ErrorKind::OutOfBounds, fmt::format("patch ({}, {}) is outside the field", p.x, p.y));
  }
  return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
}

int FloorField::intensity_at(GridPos p) const { return intensity_[index_of(p)]; }

int FloorField::distance_at(GridPos p) const { return distance_[index_of(p)]; }

FloorField FloorField::with_overrides(std::span<const Override> overrides) const {
  FloorField out = *this;
  for (const auto& o : overrides) {
    const std::size_t i = index_of(o.pos);
    if (out.intensity_[i] == kUnwalkable) {
      throw Error(ErrorKind::InvalidConfig,
                  fmt::format("cannot override unwalkable patch ({}, {})", o.pos.x, o.pos.y));
    }
    out.intensity_[i] = o.intensity;
  }
  return out;
}

void FloorField::write_csv(std::ostream& out) const {
  out << "x,y,dist,intensity\n";
  for (int row = 0; row < height_; ++row) {
    for (int col = 0; col < width_; ++col) {
      const auto i = static_cast<std::size_t>(row * width_ + col);
      if (distance_[i] == kUnwalkable) continue;
      out << fmt::format("{},{},{},{}\n", x_min_ + col, y_max_ - row, distance_[i], intensity_[i]);
    }
  }
}

}  // namespace evac
