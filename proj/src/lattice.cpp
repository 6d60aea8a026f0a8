#include "swarmform/lattice.hpp"

#include <algorithm>
#include <bit>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace swarmform {

namespace {

constexpr std::array<const char*, 8> kDirectionNames{"N",  "NE", "E",  "SE",
                                                     "S",  "SW", "W",  "NW"};

std::uint64_t cell_key(Cell c) {
  return (std::uint64_t(std::uint32_t(c.x)) << 32) | std::uint32_t(c.y);
}

}  // namespace

const char* direction_name(Direction d) { return kDirectionNames[index_of(d)]; }

std::optional<Direction> direction_from_name(std::string_view name) {
  for (int i = 0; i < kDirectionCount; ++i) {
    if (name == kDirectionNames[i]) return direction_from_index(i);
  }
  return std::nullopt;
}

std::optional<Direction> direction_between(Cell from, Cell to) {
  if (!moore_adjacent(from, to)) return std::nullopt;
  const Cell d = to - from;
  for (int i = 0; i < kDirectionCount; ++i) {
    if (offset_of(direction_from_index(i)) == d) return direction_from_index(i);
  }
  return std::nullopt;
}

int DirectionSet::count() const { return std::popcount(mask); }

std::vector<Direction> DirectionSet::list() const {
  std::vector<Direction> out;
  for (int i = 0; i < kDirectionCount; ++i) {
    if ((mask >> i) & 1) out.push_back(direction_from_index(i));
  }
  return out;
}

std::string DirectionSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (Direction d : list()) {
    if (!first) out += ",";
    out += direction_name(d);
    first = false;
  }
  out += "}";
  return out;
}

int LocalState::neighbor_count() const { return std::popcount(bits); }

std::vector<Cell> LocalState::neighbor_cells() const {
  std::vector<Cell> out;
  for (int i = 0; i < kDirectionCount; ++i) {
    if ((bits >> i) & 1) out.push_back(offset_of(direction_from_index(i)));
  }
  return out;
}

std::string LocalState::to_string() const { return DirectionSet(bits).to_string(); }

std::string LocalState::bit_vector() const {
  std::string out = "[";
  for (int i = 0; i < kDirectionCount; ++i) {
    if (i) out += ' ';
    out += ((bits >> i) & 1) ? '1' : '0';
  }
  out += "]";
  return out;
}

DirectionSet ring_adjacent(Direction d) {
  static const std::array<std::uint8_t, 8> table = [] {
    std::array<std::uint8_t, 8> t{};
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        if (i == j) continue;
        if (moore_adjacent(offset_of(direction_from_index(i)),
                           offset_of(direction_from_index(j)))) {
          t[i] |= std::uint8_t(1u << j);
        }
      }
    }
    return t;
  }();
  return DirectionSet(table[index_of(d)]);
}

bool views_consistent(LocalState a, LocalState b, Cell delta) {
  if (delta == Cell{0, 0}) return a == b;
  if (chebyshev(delta, {0, 0}) > 2) return true;
  // Occupancy claim of a frame about a relative cell: the agent's own cell is
  // occupied, ring cells follow the state bits, everything else is unseen.
  auto claim = [](LocalState s, Cell rel) -> std::optional<bool> {
    if (rel == Cell{0, 0}) return true;
    if (auto d = direction_between({0, 0}, rel)) return s.test(*d);
    return std::nullopt;
  };
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      const Cell w{dx, dy};  // cell in frame a
      const auto ca = claim(a, w);
      const auto cb = claim(b, w - delta);
      if (ca && cb && *ca != *cb) return false;
    }
  }
  return true;
}

bool states_match(LocalState si, LocalState sj, Direction u) {
  if (!si.test(u) || !sj.test(opposite(u))) return false;
  return views_consistent(si, sj, offset_of(u));
}

Pattern Pattern::from_cells(std::vector<Cell> cells) {
  if (cells.empty()) throw std::invalid_argument("pattern needs at least one cell");
  std::sort(cells.begin(), cells.end());
  if (std::adjacent_find(cells.begin(), cells.end()) != cells.end()) {
    throw std::invalid_argument("pattern has duplicate cells");
  }
  Pattern p;
  p.cells_ = std::move(cells);
  return p;
}

bool Pattern::contains(Cell c) const {
  return std::binary_search(cells_.begin(), cells_.end(), c);
}

Pattern Pattern::canonical() const {
  if (cells_.empty()) return *this;
  int min_x = cells_.front().x, min_y = cells_.front().y;
  for (const Cell& c : cells_) {
    min_x = std::min(min_x, c.x);
    min_y = std::min(min_y, c.y);
  }
  return translated({-min_x, -min_y});
}

Pattern Pattern::translated(Cell by) const {
  Pattern p;
  p.name = name;
  p.cells_.reserve(cells_.size());
  for (const Cell& c : cells_) p.cells_.push_back(c + by);
  std::sort(p.cells_.begin(), p.cells_.end());
  return p;
}

bool is_connected(std::span<const Cell> cells) {
  if (cells.empty()) return false;
  if (cells.size() == 1) return true;
  std::unordered_set<std::uint64_t> todo;
  for (const Cell& c : cells) todo.insert(cell_key(c));
  std::vector<Cell> stack{cells.front()};
  todo.erase(cell_key(cells.front()));
  while (!stack.empty()) {
    const Cell c = stack.back();
    stack.pop_back();
    for (int i = 0; i < kDirectionCount; ++i) {
      const Cell n = c + offset_of(direction_from_index(i));
      auto it = todo.find(cell_key(n));
      if (it != todo.end()) {
        todo.erase(it);
        stack.push_back(n);
      }
    }
  }
  return todo.empty();
}

LocalState state_of(const Pattern& p, Cell c) {
  if (!p.contains(c)) throw std::invalid_argument("cell is not part of the pattern");
  LocalState s;
  for (int i = 0; i < kDirectionCount; ++i) {
    const Direction d = direction_from_index(i);
    if (p.contains(c + offset_of(d))) s = s.with(d);
  }
  return s;
}

SensorLayout SensorLayout::moore8() {
  SensorLayout l;
  for (int i = 0; i < kDirectionCount; ++i) {
    l.offsets.push_back(offset_of(direction_from_index(i)));
  }
  return l;
}

bool SensorLayout::omnidirectional() const {
  for (const Cell& c : offsets) {
    if (std::find(offsets.begin(), offsets.end(), Cell{-c.x, -c.y}) == offsets.end()) {
      return false;
    }
  }
  return true;
}

void validate_action_space(const ActionSpace& a, const SensorLayout& layout) {
  for (Direction d : a.moves.list()) {
    const Cell target = offset_of(d);
    if (std::find(layout.offsets.begin(), layout.offsets.end(), target) ==
        layout.offsets.end()) {
      throw std::invalid_argument("action target outside the sensor footprint");
    }
  }
}

}  // namespace swarmform
