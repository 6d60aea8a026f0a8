#include "swarmform/behavior.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <stdexcept>

namespace swarmform {

namespace {

// Connectivity of a direction-mask of ring cells, ignoring the agent's cell.
bool ring_mask_connected(std::uint8_t mask) {
  if (mask == 0) return true;
  const int first = std::countr_zero(mask);
  std::uint8_t seen = std::uint8_t(1u << first);
  for (;;) {
    std::uint8_t grow = seen;
    for (int i = 0; i < kDirectionCount; ++i) {
      if ((seen >> i) & 1) grow |= ring_adjacent(direction_from_index(i)).mask;
    }
    grow &= mask;
    if (grow == seen) break;
    seen = grow;
  }
  return seen == mask;
}

// Local post-move occupancy: prior neighbors plus the mover at offset(d),
// origin vacated. Yields the mover's deterministic new state and, for every
// prior neighbor, its state as assumed from the mover's knowledge (cells
// beyond the old footprint count as empty).
LocalState assumed_state_at(Cell where, const std::vector<Cell>& occupied) {
  LocalState s;
  for (int i = 0; i < kDirectionCount; ++i) {
    const Direction d = direction_from_index(i);
    const Cell n = where + offset_of(d);
    if (std::find(occupied.begin(), occupied.end(), n) != occupied.end()) {
      s = s.with(d);
    }
  }
  return s;
}

bool has_orthogonal_neighbor(Cell where, const std::vector<Cell>& occupied) {
  static constexpr std::array<Cell, 4> orth{{{0, 1}, {1, 0}, {0, -1}, {-1, 0}}};
  for (const Cell& o : orth) {
    const Cell n = where + o;
    if (std::find(occupied.begin(), occupied.end(), n) != occupied.end()) return true;
  }
  return false;
}

}  // namespace

std::vector<LocalState> StateSet::list() const {
  std::vector<LocalState> out;
  for (int b = 1; b < 256; ++b) {
    if (bits.test(b)) out.push_back(LocalState(std::uint8_t(b)));
  }
  return out;
}

StateSet StateSets::active() const {
  StateSet out;
  for (int b = 1; b < 256; ++b) {
    const LocalState s{std::uint8_t(b)};
    if (!is_static(s)) out.insert(s);
  }
  return out;
}

std::uint64_t SafeActionMap::total_actions() const {
  std::uint64_t n = 0;
  for (const DirectionSet& d : entries) n += std::uint64_t(d.count());
  return n;
}

std::vector<DirectionSet> cliques(LocalState s) {
  std::vector<DirectionSet> out;
  std::uint8_t remaining = s.bits;
  while (remaining != 0) {
    std::uint8_t comp = std::uint8_t(1u << std::countr_zero(remaining));
    for (;;) {
      std::uint8_t grow = comp;
      for (int i = 0; i < kDirectionCount; ++i) {
        if ((comp >> i) & 1) grow |= ring_adjacent(direction_from_index(i)).mask;
      }
      grow &= s.bits;
      if (grow == comp) break;
      comp = grow;
    }
    out.push_back(DirectionSet(comp));
    remaining &= std::uint8_t(~comp);
  }
  return out;
}

bool is_simplicial(LocalState s) {
  if (!s.valid() || s.neighbor_count() == kDirectionCount) return false;
  return ring_mask_connected(s.bits);
}

DirectionSet safe_actions(LocalState s, const ActionSpace& a) {
  DirectionSet out;
  for (int i = 0; i < kDirectionCount; ++i) {
    const Direction d = direction_from_index(i);
    if (!a.moves.test(d)) continue;
    if (s.test(d)) continue;  // target occupied
    // Prior neighbors plus the target cell must stay Moore-connected.
    const std::uint8_t mask = std::uint8_t(s.bits | (1u << i));
    if (ring_mask_connected(mask)) out.add(d);
  }
  return out;
}

std::vector<LocalState> derive_desired_states(const Pattern& p) {
  std::vector<LocalState> out;
  for (const Cell& c : p.cells()) out.push_back(state_of(p, c));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DirectionSet cross_rule_filter(LocalState s, DirectionSet actions,
                               std::optional<LocalState> exception) {
  DirectionSet out;
  const std::vector<Cell> neighbors = s.neighbor_cells();
  for (Direction d : actions.list()) {
    std::vector<Cell> occupied = neighbors;
    occupied.push_back(offset_of(d));
    bool ok = true;
    for (const Cell& agent : occupied) {
      if (has_orthogonal_neighbor(agent, occupied)) continue;
      const LocalState assumed = assumed_state_at(agent, occupied);
      if (!(exception && assumed == *exception)) {
        ok = false;
        break;
      }
    }
    if (ok) out.add(d);
  }
  return out;
}

BehaviorConfig BehaviorConfig::baseline() {
  BehaviorConfig c;
  c.name = "baseline";
  return c;
}

BehaviorConfig BehaviorConfig::alt1() {
  BehaviorConfig c;
  c.name = "alt1";
  c.no_repeat = true;
  return c;
}

BehaviorConfig BehaviorConfig::alt2() {
  BehaviorConfig c = alt1();
  c.name = "alt2";
  c.blocked_neighbor_threshold = 5;
  return c;
}

BehaviorConfig BehaviorConfig::alt3() {
  BehaviorConfig c = alt2();
  c.name = "alt3";
  c.cross_rule = true;
  // Re-derived by exhaustive search (see tests): without an exemption the
  // cross rule freezes the bar-interior states {E,W}, {N,E,W}, {NE,E,W} and
  // {E,W,NW}, which glue together into a second all-static 9-agent pattern (a
  // bar with two bumps). Excusing a post-move state of {NE} restores an action
  // to {N,E,W} and {NE,E,W} and provably removes that pattern; {NW} is the
  // mirror-equivalent alternative.
  c.cross_rule_exception = LocalState(0b00000010);  // {NE}
  return c;
}

BehaviorConfig BehaviorConfig::alt4() {
  BehaviorConfig c = alt3();
  c.name = "alt4";
  c.blocked_neighbor_threshold = 4;
  return c;
}

std::optional<BehaviorConfig> BehaviorConfig::by_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "baseline") return baseline();
  if (lower == "alt1") return alt1();
  if (lower == "alt2") return alt2();
  if (lower == "alt3") return alt3();
  if (lower == "alt4") return alt4();
  return std::nullopt;
}

StateSets classify(const std::vector<LocalState>& des, const BehaviorConfig& cfg,
                   const ActionSpace& a) {
  StateSets sets;
  for (const LocalState& s : des) sets.des.insert(s);
  for (int b = 1; b < 256; ++b) {
    const LocalState s{std::uint8_t(b)};
    if (sets.des.contains(s)) continue;
    DirectionSet acts = safe_actions(s, a);
    if (cfg.cross_rule) acts = cross_rule_filter(s, acts, cfg.cross_rule_exception);
    const bool injected = cfg.blocked_neighbor_threshold &&
                          s.neighbor_count() > *cfg.blocked_neighbor_threshold;
    if (acts.empty() || injected) sets.blocked.insert(s);
  }
  for (int b = 1; b < 256; ++b) {
    const LocalState s{std::uint8_t(b)};
    if (is_simplicial(s) && !sets.blocked.contains(s)) sets.simplicial.insert(s);
  }
  return sets;
}

BehaviorBundle derive_behavior(const Pattern& p_des, const BehaviorConfig& cfg,
                               const ActionSpace& a) {
  BehaviorBundle bundle;
  bundle.p_des = p_des.canonical();
  if (bundle.p_des.size() < 2) {
    throw std::invalid_argument("target pattern needs at least two cells");
  }
  if (!is_connected(bundle.p_des.cells())) {
    throw std::invalid_argument("target pattern must be connected");
  }
  bundle.config = cfg;
  bundle.sets = classify(derive_desired_states(bundle.p_des), cfg, a);
  for (int b = 1; b < 256; ++b) {
    const LocalState s{std::uint8_t(b)};
    if (!bundle.sets.is_active(s)) continue;
    DirectionSet acts = safe_actions(s, a);
    if (cfg.cross_rule) acts = cross_rule_filter(s, acts, cfg.cross_rule_exception);
    bundle.q.entries[b] = acts;
  }
  return bundle;
}

}  // namespace swarmform
