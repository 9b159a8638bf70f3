#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "evac/layout.hpp"

namespace evac {

/// Per-patch attraction toward the nearest open exit. Agents climb it.
///
/// dist(p) is the Moore-neighbourhood step count from p to the nearest open
/// exit through walkable patches (0 on the exits themselves) and
/// intensity(p) = max_distance + 1 - dist(p), so the exits are the brightest
/// patches. Unwalkable patches hold kUnwalkable in both arrays.
class FloorField {
 public:
  static constexpr int kUnwalkable = -1;

  struct Override {
    GridPos pos;
    int intensity;
  };

  explicit FloorField(const CabinLayout& layout);
  /// Field over a bare grid (rows top first, same coordinates as CabinLayout)
  /// without the layout's exit-width rules. Throws UnreachablePatch.
  FloorField(int width, int height, std::span<const PatchKind> patches);

  /// Throws OutOfBounds outside the grid.
  int intensity_at(GridPos p) const;
  int intensity_at(int x, int y) const { return intensity_at(GridPos{x, y}); }
  int distance_at(GridPos p) const;
  int max_distance() const { return max_distance_; }

  /// Unchecked lookups by layout index; used on the engine hot path.
  int intensity_at_index(std::size_t i) const { return intensity_[i]; }

  /// Replaces the intensity of individual walkable patches, e.g. to encode
  /// crew directions along a preferred route. Distances are left untouched.
  FloorField with_overrides(std::span<const Override> overrides) const;

  /// Debug dump: `x,y,dist,intensity` for every walkable patch, row-major.
  void write_csv(std::ostream& out) const;

 private:
  std::size_t index_of(GridPos p) const;
  bool walkable(int col, int row, std::span<const PatchKind> patches) const;

  int width_;
  int height_;
  int x_min_;
  int y_max_;
  int max_distance_ = 0;
  std::vector<int> distance_;
  std::vector<int> intensity_;
};

inline FloorField build_field(const CabinLayout& layout) { return FloorField(layout); }

}  // namespace evac
