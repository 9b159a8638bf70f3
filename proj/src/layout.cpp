#include "evac/layout.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace evac {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::RaggedRows: return "RaggedRows";
    case ErrorKind::UnknownGlyph: return "UnknownGlyph";
    case ErrorKind::NoOpenExit: return "NoOpenExit";
    case ErrorKind::UnreachablePatch: return "UnreachablePatch";
    case ErrorKind::BadExitWidth: return "BadExitWidth";
    case ErrorKind::InvalidExitName: return "InvalidExitName";
    case ErrorKind::AllExitsBlocked: return "AllExitsBlocked";
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::BadRange: return "BadRange";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

char glyph_of(PatchKind kind) {
  switch (kind) {
    case PatchKind::Wall: return '#';
    case PatchKind::Floor: return '.';
    case PatchKind::Seat: return 'S';
    case PatchKind::ExitOpen: return 'E';
    case PatchKind::ExitBlocked: return 'X';
  }
  return '?';
}

std::optional<PatchKind> kind_of_glyph(char glyph) {
  switch (glyph) {
    case '#': return PatchKind::Wall;
    case '.': return PatchKind::Floor;
    case 'S': return PatchKind::Seat;
    case 'E': return PatchKind::ExitOpen;
    case 'X': return PatchKind::ExitBlocked;
    default: return std::nullopt;
  }
}

namespace {

bool is_exit(PatchKind kind) {
  return kind == PatchKind::ExitOpen || kind == PatchKind::ExitBlocked;
}

constexpr std::array<GridPos, 8> kMoore = {{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}}};
constexpr std::array<GridPos, 4> kVonNeumann = {{{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};

std::vector<std::string> position_labels(std::size_t n) {
  if (n == 1) return {"front"};
  std::vector<std::string> labels{"front"};
  if (n == 3) {
    labels.emplace_back("mid");
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) labels.push_back(fmt::format("mid{}", i));
  }
  labels.emplace_back("rear");
  return labels;
}

}  // namespace

CabinLayout::CabinLayout(int width, int height, std::vector<PatchKind> patches, std::string name)
    : width_(width), height_(height), patches_(std::move(patches)), name_(std::move(name)) {
  if (width_ <= 0 || height_ <= 0) throw Error(ErrorKind::EmptyInput, "layout has no patches");
  if (patches_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
    throw Error(ErrorKind::RaggedRows,
                fmt::format("expected {}x{} patches, got {}", width_, height_, patches_.size()));
  }
  name_exits();
  validate();
}

std::size_t CabinLayout::index_of(GridPos p) const {
  return static_cast<std::size_t>(y_max() - p.y) * static_cast<std::size_t>(width_) +
         static_cast<std::size_t>(p.x - x_min());
}

GridPos CabinLayout::pos_of(std::size_t index) const {
  const int w = width_;
  const int row = static_cast<int>(index / static_cast<std::size_t>(w));
  const int col = static_cast<int>(index % static_cast<std::size_t>(w));
  return {x_min() + col, y_max() - row};
}

PatchKind CabinLayout::at(GridPos p) const {
  if (!contains(p)) {
    throw Error(ErrorKind::OutOfBounds, fmt::format("patch ({}, {}) is outside the cabin", p.x, p.y));
  }
  return patches_[index_of(p)];
}

const Exit* CabinLayout::find_exit(std::string_view name) const {
  for (const auto& e : exits_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const Exit* CabinLayout::exit_at(GridPos p) const {
  for (const auto& e : exits_) {
    if (std::find(e.patches.begin(), e.patches.end(), p) != e.patches.end()) return &e;
  }
  return nullptr;
}

std::size_t CabinLayout::count(PatchKind kind) const {
  return static_cast<std::size_t>(std::count(patches_.begin(), patches_.end(), kind));
}

std::vector<GridPos> CabinLayout::seats() const {
  std::vector<GridPos> out;
  for (std::size_t i = 0; i < patches_.size(); ++i) {
    if (patches_[i] == PatchKind::Seat) out.push_back(pos_of(i));
  }
  return out;
}

// Exit groups are orthogonally connected runs of the same exit glyph. Names
// come from the side (port when the group sits at y >= 0) and the order along
// the fuselage, front (largest x) first.
void CabinLayout::name_exits() {
  struct Group {
    std::vector<GridPos> patches;
    bool blocked;
    double mean_x;
    double mean_y;
  };
  std::vector<Group> groups;
  std::vector<bool> seen(patches_.size(), false);
  for (std::size_t i = 0; i < patches_.size(); ++i) {
    if (seen[i] || !is_exit(patches_[i])) continue;
    const PatchKind kind = patches_[i];
    Group g{{}, kind == PatchKind::ExitBlocked, 0.0, 0.0};
    std::deque<std::size_t> queue{i};
    seen[i] = true;
    while (!queue.empty()) {
      const GridPos p = pos_of(queue.front());
      queue.pop_front();
      g.patches.push_back(p);
      for (const auto d : kVonNeumann) {
        const GridPos q{p.x + d.x, p.y + d.y};
        if (!contains(q)) continue;
        const std::size_t qi = index_of(q);
        if (!seen[qi] && patches_[qi] == kind) {
          seen[qi] = true;
          queue.push_back(qi);
        }
      }
    }
    std::sort(g.patches.begin(), g.patches.end());
    if (g.patches.size() != 2) {
      throw Error(ErrorKind::BadExitWidth,
                  fmt::format("exit group at ({}, {}) is {} patches wide, expected 2",
                              g.patches.front().x, g.patches.front().y, g.patches.size()));
    }
    for (const auto& p : g.patches) {
      g.mean_x += p.x;
      g.mean_y += p.y;
    }
    g.mean_x /= static_cast<double>(g.patches.size());
    g.mean_y /= static_cast<double>(g.patches.size());
    groups.push_back(std::move(g));
  }

  exits_.clear();
  for (const bool port : {true, false}) {
    std::vector<const Group*> side;
    for (const auto& g : groups) {
      if ((g.mean_y >= 0.0) == port) side.push_back(&g);
    }
    std::sort(side.begin(), side.end(), [](const Group* a, const Group* b) {
      if (a->mean_x != b->mean_x) return a->mean_x > b->mean_x;
      return a->mean_y > b->mean_y;
    });
    const auto labels = position_labels(side.size());
    for (std::size_t i = 0; i < side.size(); ++i) {
      exits_.push_back({fmt::format("{}-{}", port ? "port" : "stbd", labels[i]), side[i]->patches,
                        side[i]->blocked});
    }
  }
}

void CabinLayout::validate() const {
  std::deque<std::size_t> queue;
  std::vector<bool> reached(patches_.size(), false);
  for (std::size_t i = 0; i < patches_.size(); ++i) {
    if (patches_[i] == PatchKind::ExitOpen) {
      reached[i] = true;
      queue.push_back(i);
    }
  }
  if (queue.empty()) throw Error(ErrorKind::NoOpenExit, "layout has no open exit");
  while (!queue.empty()) {
    const GridPos p = pos_of(queue.front());
    queue.pop_front();
    for (const auto d : kMoore) {
      const GridPos q{p.x + d.x, p.y + d.y};
      if (!walkable(q)) continue;
      const std::size_t qi = index_of(q);
      if (!reached[qi]) {
        reached[qi] = true;
        queue.push_back(qi);
      }
    }
  }
  for (std::size_t i = 0; i < patches_.size(); ++i) {
    if (is_walkable(patches_[i]) && !reached[i]) {
      const GridPos p = pos_of(i);
      throw Error(ErrorKind::UnreachablePatch,
                  fmt::format("patch ({}, {}) cannot reach an open exit", p.x, p.y));
    }
  }
}

CabinLayout CabinLayout::with_blocked(const ExitSelection& selection) const {
  for (const auto& name : selection.blocked) {
    if (find_exit(name) == nullptr) {
      throw Error(ErrorKind::InvalidExitName, fmt::format("no exit named '{}'", name));
    }
  }
  if (selection.blocked.size() >= exits_.size()) {
    throw Error(ErrorKind::AllExitsBlocked, "at least one exit must remain open");
  }
  auto patches = patches_;
  for (const auto& e : exits_) {
    const bool block = selection.blocked.count(e.name) > 0;
    for (const auto& p : e.patches) {
      patches[index_of(p)] = block ? PatchKind::ExitBlocked : PatchKind::ExitOpen;
    }
  }
  return CabinLayout(width_, height_, std::move(patches), name_);
}

CabinLayout parse_layout(std::string_view text) {
  std::string name;
  std::vector<std::string_view> rows;
  std::size_t line_no = 0;
  std::vector<std::size_t> row_line;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() == '!') {
      constexpr std::string_view kNameKey = "!name:";
      if (line.substr(0, kNameKey.size()) == kNameKey) {
        auto value = line.substr(kNameKey.size());
        while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
        while (!value.empty() && value.back() == ' ') value.remove_suffix(1);
        name = std::string(value);
      }
      continue;
    }
    rows.push_back(line);
    row_line.push_back(line_no);
  }
  // A trailing newline (or several) does not add rows.
  while (!rows.empty() && rows.back().empty()) {
    rows.pop_back();
    row_line.pop_back();
  }
  if (rows.empty() || rows.front().empty()) throw Error(ErrorKind::EmptyInput, "layout has no rows");

  const std::size_t width = rows.front().size();
  std::vector<PatchKind> patches;
  patches.reserve(width * rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw Error(ErrorKind::RaggedRows, fmt::format("line {} has {} columns, expected {}",
                                                     row_line[r], rows[r].size(), width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      const auto kind = kind_of_glyph(rows[r][c]);
      if (!kind) {
        throw Error(ErrorKind::UnknownGlyph, fmt::format("unknown glyph '{}' at line {}, column {}",
                                                         rows[r][c], row_line[r], c + 1));
      }
      patches.push_back(*kind);
    }
  }
  return CabinLayout(static_cast<int>(width), static_cast<int>(rows.size()), std::move(patches),
                     std::move(name));
}

std::string serialize_layout(const CabinLayout& layout) {
  std::string out;
  if (!layout.name().empty()) out += fmt::format("!name: {}\n", layout.name());
  const auto w = static_cast<std::size_t>(layout.width());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    out += glyph_of(layout.at_index(i));
    if ((i + 1) % w == 0) out += '\n';
  }
  return out;
}

ExitSelection default_certification_blocking() {
  return ExitSelection{{"port-front", "port-rear", "stbd-mid"}};
}

namespace {

// Deck geometry. Columns x = -33 and x = 32 are the end bulkheads and rows
// y = +-5 the fuselage walls that carry the doors. Each door pair sits in a
// 3-column all-floor clearance zone. Between zones, seat columns alternate
// with wall gaps (the space between seat rows), with a seat column on each
// side of every zone. The two aisles run along y = +-2.
constexpr int kDeckWidth = 66;
constexpr int kDeckHeight = 11;
constexpr int kSeatCapacity = 199;
constexpr std::array<int, 3> kZoneStart = {-21, -1, 19};  // rear, mid, front
constexpr int kAisleY = 2;
// Order in which seats of the rearmost columns are removed to hit capacity.
constexpr std::array<int, 7> kTrimOrder = {4, -4, 3, -3, 1, -1, 0};

bool in_zone(int x) {
  return std::any_of(kZoneStart.begin(), kZoneStart.end(),
                     [x](int z) { return x >= z && x < z + 3; });
}

}  // namespace

CabinLayout generate_a380_upper_deck(const ExitSelection& blocked) {
  const int x_min = -(kDeckWidth / 2);
  const int x_max = x_min + kDeckWidth - 1;
  const int y_max = kDeckHeight / 2;
  auto idx = [&](int x, int y) {
    return static_cast<std::size_t>(y_max - y) * kDeckWidth + static_cast<std::size_t>(x - x_min);
  };
  std::vector<PatchKind> patches(static_cast<std::size_t>(kDeckWidth * kDeckHeight), PatchKind::Wall);

  std::vector<int> seat_columns;
  int segment_start = x_min + 1;
  for (int x = x_min + 1; x <= x_max - 1; ++x) {
    if (in_zone(x)) {
      for (int y = -y_max + 1; y <= y_max - 1; ++y) patches[idx(x, y)] = PatchKind::Floor;
      segment_start = x + 1;
      continue;
    }
    patches[idx(x, kAisleY)] = PatchKind::Floor;
    patches[idx(x, -kAisleY)] = PatchKind::Floor;
    // The segment behind the first zone is aligned on that zone, the others
    // on the zone before them.
    const bool seat = segment_start == x_min + 1 ? (kZoneStart.front() - 1 - x) % 2 == 0
                                                 : (x - segment_start) % 2 == 0;
    if (seat) {
      seat_columns.push_back(x);
      for (int y = -y_max + 1; y <= y_max - 1; ++y) {
        if (y != kAisleY && y != -kAisleY) patches[idx(x, y)] = PatchKind::Seat;
      }
    }
  }

  const int seats_per_column = static_cast<int>(kTrimOrder.size());
  int excess = static_cast<int>(seat_columns.size()) * seats_per_column - kSeatCapacity;
  for (auto col = seat_columns.begin(); excess > 0 && col != seat_columns.end(); ++col) {
    for (int y : kTrimOrder) {
      if (excess == 0) break;
      patches[idx(*col, y)] = PatchKind::Floor;
      --excess;
    }
  }

  for (const int z : kZoneStart) {
    for (int x = z; x < z + 2; ++x) {
      patches[idx(x, y_max)] = PatchKind::ExitOpen;
      patches[idx(x, -y_max)] = PatchKind::ExitOpen;
    }
  }

  const CabinLayout open(kDeckWidth, kDeckHeight, std::move(patches), "a380-upper");
  return open.with_blocked(blocked);
}

}  // namespace evac
