#pragma once

// Core lattice geometry: the Moore-8 neighborhood, local occupancy states,
// state matching between neighboring agents, and finite cell patterns.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swarmform {

// Fixed direction indexing, clockwise from North. All bit masks, state
// encodings and file formats use this order.
enum class Direction : std::uint8_t { N = 0, NE, E, SE, S, SW, W, NW };

inline constexpr int kDirectionCount = 8;

constexpr Direction direction_from_index(int i) {
  return static_cast<Direction>(i & 7);
}

constexpr int index_of(Direction d) { return static_cast<int>(d); }

// The diametrically opposed direction: opposite(N) == S, opposite(NE) == SW.
constexpr Direction opposite(Direction d) {
  return direction_from_index((index_of(d) + 4) & 7);
}

const char* direction_name(Direction d);
std::optional<Direction> direction_from_name(std::string_view name);

// Integer lattice cell. x grows East, y grows North.
struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr Cell operator+(Cell a, Cell b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Cell operator-(Cell a, Cell b) { return {a.x - b.x, a.y - b.y}; }
  auto operator<=>(const Cell&) const = default;
};

// Unit offset of each direction, matching the Direction order above.
constexpr Cell offset_of(Direction d) {
  constexpr std::array<Cell, 8> k{{{0, 1},
                                   {1, 1},
                                   {1, 0},
                                   {1, -1},
                                   {0, -1},
                                   {-1, -1},
                                   {-1, 0},
                                   {-1, 1}}};
  return k[index_of(d)];
}

constexpr int chebyshev(Cell a, Cell b) {
  const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
  const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
  return dx > dy ? dx : dy;
}

// Two distinct cells that touch orthogonally or diagonally.
constexpr bool moore_adjacent(Cell a, Cell b) { return chebyshev(a, b) == 1; }

// Direction from `from` to `to` when the cells are Moore-adjacent.
std::optional<Direction> direction_between(Cell from, Cell to);

// Small set of directions, stored as a bit mask in Direction order.
struct DirectionSet {
  std::uint8_t mask = 0;

  constexpr DirectionSet() = default;
  constexpr explicit DirectionSet(std::uint8_t m) : mask(m) {}

  constexpr bool test(Direction d) const { return (mask >> index_of(d)) & 1; }
  constexpr void add(Direction d) { mask |= std::uint8_t(1u << index_of(d)); }
  constexpr void remove(Direction d) { mask &= std::uint8_t(~(1u << index_of(d))); }
  constexpr bool empty() const { return mask == 0; }
  int count() const;

  static constexpr DirectionSet all() { return DirectionSet(0xFF); }

  std::vector<Direction> list() const;
  std::string to_string() const;

  friend constexpr bool operator==(DirectionSet a, DirectionSet b) = default;
};

// Occupancy of the eight surrounding cells as seen by one agent. Bit i set
// means the cell at offset_of(Direction(i)) holds another agent. The all-empty
// word is not a valid state: a connected swarm of two or more agents always
// senses at least one neighbor.
struct LocalState {
  std::uint8_t bits = 0;

  constexpr LocalState() = default;
  constexpr explicit LocalState(std::uint8_t b) : bits(b) {}

  constexpr bool valid() const { return bits != 0; }
  constexpr bool test(Direction d) const { return (bits >> index_of(d)) & 1; }
  int neighbor_count() const;

  constexpr LocalState with(Direction d) const {
    return LocalState(std::uint8_t(bits | (1u << index_of(d))));
  }
  constexpr LocalState without(Direction d) const {
    return LocalState(std::uint8_t(bits & ~(1u << index_of(d))));
  }

  DirectionSet directions() const { return DirectionSet(bits); }
  std::vector<Cell> neighbor_cells() const;

  // Compact text such as "{N,E,NW}".
  std::string to_string() const;
  // "[1 0 1 0 0 0 0 1]" with the legend N NE E SE S SW W NW.
  std::string bit_vector() const;

  friend constexpr bool operator==(LocalState a, LocalState b) = default;
  friend constexpr auto operator<=>(LocalState a, LocalState b) {
    return a.bits <=> b.bits;
  }
};

// Number of valid local states (every 8-bit word except the empty one).
inline constexpr int kLocalStateCount = 255;

// Directions whose ring cells are Moore-adjacent to the ring cell of `d`
// (the agent's own cell does not act as a bridge).
DirectionSet ring_adjacent(Direction d);

// True when the occupancy claims of two agents are mutually consistent given
// that the second sits at `delta` relative to the first. Every cell visible to
// both frames must agree, with each agent's own cell counted occupied. Frames
// farther apart than two cells share nothing and are trivially consistent.
bool views_consistent(LocalState a, LocalState b, Cell delta);

// Mutual-sensing test for two agents one step apart: agent i in state `si`
// must sense a neighbor toward `u`, agent j in state `sj` must sense one back
// toward opposite(u), and their overlapping visible cells must agree.
bool states_match(LocalState si, LocalState sj, Direction u);

// Finite set of distinct lattice cells.
class Pattern {
 public:
  Pattern() = default;

  // Sorts cells; rejects empty input and duplicate cells.
  static Pattern from_cells(std::vector<Cell> cells);

  const std::vector<Cell>& cells() const { return cells_; }
  int size() const { return static_cast<int>(cells_.size()); }
  bool contains(Cell c) const;

  // Translation with min x == 0 and min y == 0. Two patterns are considered
  // the same shape exactly when their canonical cell sets are equal.
  Pattern canonical() const;
  Pattern translated(Cell by) const;

  std::string name;

  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.cells_ == b.cells_;
  }
  friend auto operator<=>(const Pattern& a, const Pattern& b) {
    return a.cells_ <=> b.cells_;
  }

 private:
  std::vector<Cell> cells_;  // sorted, unique
};

// Moore-8 connectivity of a cell set.
bool is_connected(std::span<const Cell> cells);

// Local state of the agent at `c`, which must be a cell of `p`.
LocalState state_of(const Pattern& p, Cell c);

// Relative cells an agent senses. Only the omnidirectional Moore-8 layout is
// exercised by the pipelines, but narrower layouts are representable.
struct SensorLayout {
  std::vector<Cell> offsets;

  static SensorLayout moore8();
  bool omnidirectional() const;
};

// Directions an agent may step toward. Every move target must be sensed.
struct ActionSpace {
  DirectionSet moves;

  static constexpr ActionSpace omni() { return ActionSpace{DirectionSet::all()}; }
};

// Throws std::invalid_argument when some move target is outside the layout.
void validate_action_space(const ActionSpace& a, const SensorLayout& layout);

}  // namespace swarmform
