#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evac/error.hpp"

namespace evac {

enum class PatchKind : std::uint8_t { Wall, Floor, Seat, ExitOpen, ExitBlocked };

char glyph_of(PatchKind kind);
std::optional<PatchKind> kind_of_glyph(char glyph);

/// Seats, floor and open exits can be stood on. A blocked exit is a wall.
constexpr bool is_walkable(PatchKind kind) {
  return kind == PatchKind::Floor || kind == PatchKind::Seat || kind == PatchKind::ExitOpen;
}

/// Patch coordinates in cabin space: x grows toward the nose, y toward port.
struct GridPos {
  int x = 0;
  int y = 0;
  friend bool operator==(const GridPos&, const GridPos&) = default;
  friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

struct Exit {
  std::string name;
  std::vector<GridPos> patches;
  bool blocked = false;
  friend bool operator==(const Exit&, const Exit&) = default;
};

/// Names of exits to close. Every name must exist and at least one exit must stay open.
struct ExitSelection {
  std::set<std::string> blocked;
};

/// Immutable cabin grid. Rows are stored top (most port) first. Cabin
/// coordinates are centred: x runs from -(width/2) and y from height/2
/// downwards, so the 66x11 deck spans x -33..32 and y 5..-5.
///
/// Construction validates the grid and names the exit groups; an invalid
/// grid throws evac::Error.
class CabinLayout {
 public:
  static constexpr double kPatchSizeMeters = 0.5;

  CabinLayout(int width, int height, std::vector<PatchKind> patches, std::string name = {});

  int width() const { return width_; }
  int height() const { return height_; }
  int x_min() const { return -(width_ / 2); }
  int x_max() const { return x_min() + width_ - 1; }
  int y_max() const { return height_ / 2; }
  int y_min() const { return y_max() - height_ + 1; }
  const std::string& name() const { return name_; }

  bool contains(GridPos p) const {
    return p.x >= x_min() && p.x <= x_max() && p.y >= y_min() && p.y <= y_max();
  }
  std::size_t index_of(GridPos p) const;
  GridPos pos_of(std::size_t index) const;
  std::size_t size() const { return patches_.size(); }

  /// Throws OutOfBounds outside the grid.
  PatchKind at(GridPos p) const;
  PatchKind at_index(std::size_t index) const { return patches_[index]; }
  /// False outside the grid.
  bool walkable(GridPos p) const { return contains(p) && is_walkable(patches_[index_of(p)]); }

  const std::vector<PatchKind>& patches() const { return patches_; }
  const std::vector<Exit>& exits() const { return exits_; }
  const Exit* find_exit(std::string_view name) const;
  /// Name of the exit group containing p, or nullptr.
  const Exit* exit_at(GridPos p) const;

  std::size_t count(PatchKind kind) const;
  /// Seat patches in row-major order (top row first, rear to front).
  std::vector<GridPos> seats() const;

  /// Returns a copy with the selected exits closed (and all others open).
  CabinLayout with_blocked(const ExitSelection& selection) const;

  friend bool operator==(const CabinLayout&, const CabinLayout&) = default;

 private:
  void name_exits();
  void validate() const;

  int width_ = 0;
  int height_ = 0;
  std::vector<PatchKind> patches_;
  std::string name_;
  std::vector<Exit> exits_;
};

/// Parses the text layout format: `!` lines are comments (`!name: x` sets the
/// name), every other line is a grid row using `# . S E X`.
CabinLayout parse_layout(std::string_view text);

std::string serialize_layout(const CabinLayout& layout);

/// Exits closed in the certification scenario: front and rear port, centre starboard.
ExitSelection default_certification_blocking();

/// Built-in approximation of the A380 upper deck: 66x11 patches, 199 seats
/// laid out 2-3-2 between two aisles, and three 2-patch exits per side.
CabinLayout generate_a380_upper_deck(const ExitSelection& blocked = default_certification_blocking());

}  // namespace evac
