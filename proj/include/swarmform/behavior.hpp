#pragma once

// Derivation of local behaviors: which local states must hold still, which
// may move, and which single-step actions are provably safe for each state.

#include <bitset>
#include <optional>
#include <string>
#include <vector>

#include "swarmform/lattice.hpp"

namespace swarmform {

// Set of local states, indexed by the 8-bit occupancy word.
struct StateSet {
  std::bitset<256> bits;

  bool contains(LocalState s) const { return bits.test(s.bits); }
  void insert(LocalState s) { bits.set(s.bits); }
  void erase(LocalState s) { bits.reset(s.bits); }
  int count() const { return static_cast<int>(bits.count()); }
  bool empty() const { return bits.none(); }

  std::vector<LocalState> list() const;

  friend StateSet operator|(const StateSet& a, const StateSet& b) {
    return StateSet{a.bits | b.bits};
  }
  friend StateSet operator&(const StateSet& a, const StateSet& b) {
    return StateSet{a.bits & b.bits};
  }
  friend bool operator==(const StateSet& a, const StateSet& b) = default;
};

// Partition of the 255 local states for one behavior and target pattern.
//  - des:        states an agent wants to end in (it then never moves)
//  - blocked:    non-desired states with no permitted safe action
//  - simplicial: states whose neighbors stay connected if the agent leaves;
//                blocked states are excluded so the two sets never overlap
// static = des | blocked; active = everything else.
struct StateSets {
  StateSet des;
  StateSet blocked;
  StateSet simplicial;

  StateSet statics() const { return des | blocked; }
  StateSet active() const;
  bool is_static(LocalState s) const { return des.contains(s) || blocked.contains(s); }
  bool is_active(LocalState s) const { return s.valid() && !is_static(s); }
};

// Permitted safe actions per local state. States outside the map (desired,
// blocked, or the invalid null word) have no entry.
struct SafeActionMap {
  std::array<DirectionSet, 256> entries{};

  DirectionSet actions(LocalState s) const { return entries[s.bits]; }
  bool has(LocalState s) const { return !entries[s.bits].empty(); }
  std::uint64_t total_actions() const;
};

// Connected components of a state's occupied ring cells (the agent's own
// cell never bridges them).
std::vector<DirectionSet> cliques(LocalState s);

// One clique and at least one empty ring cell: if such an agent left, its
// neighbors would stay connected among themselves.
bool is_simplicial(LocalState s);

// Geometrically safe single steps for an agent in state s: the target ring
// cell is sensed and empty, and the prior neighbors together with the target
// cell stay Moore-connected (the vacated origin does not bridge).
DirectionSet safe_actions(LocalState s, const ActionSpace& a = ActionSpace::omni());

// Sorted distinct local states occurring in a pattern.
std::vector<LocalState> derive_desired_states(const Pattern& p);

// Named rule set layered on top of the geometric safe actions.
struct BehaviorConfig {
  std::string name = "custom";
  // The most recent mover is not drawn again while another agent is active.
  bool no_repeat = false;
  // States with more than this many neighbors are forced static.
  std::optional<int> blocked_neighbor_threshold;
  // Discard actions that leave any agent in the mover's view without an
  // orthogonal (N/S/E/W) neighbor.
  bool cross_rule = false;
  // Sole state excused from the cross rule's orthogonal-neighbor demand.
  std::optional<LocalState> cross_rule_exception;

  static BehaviorConfig baseline();
  static BehaviorConfig alt1();
  static BehaviorConfig alt2();
  static BehaviorConfig alt3();
  static BehaviorConfig alt4();
  // baseline/alt1/alt2/alt3/alt4, case-insensitive.
  static std::optional<BehaviorConfig> by_name(std::string_view name);
};

// Cross-rule filter as evaluated from the mover's own view: simulate the step
// within the footprint (unseen cells assumed empty) and keep the action only
// if every agent left without an orthogonal neighbor is in the excused state.
DirectionSet cross_rule_filter(LocalState s, DirectionSet actions,
                               std::optional<LocalState> exception);

// Everything the checkers and simulators need for one (pattern, behavior).
struct BehaviorBundle {
  Pattern p_des;  // canonical
  BehaviorConfig config;
  StateSets sets;
  SafeActionMap q;  // entries only for active states
};

// Classify all 255 states for the given desired-state set and behavior.
StateSets classify(const std::vector<LocalState>& des, const BehaviorConfig& cfg,
                   const ActionSpace& a = ActionSpace::omni());

BehaviorBundle derive_behavior(const Pattern& p_des, const BehaviorConfig& cfg,
                               const ActionSpace& a = ActionSpace::omni());

}  // namespace swarmform
