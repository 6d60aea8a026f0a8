#pragma once

// State transition graphs over the 255 local states, and the machine checks
// for reachability of the desired states, deadlock freedom, and convergence
// of the emergent pattern.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarmform/behavior.hpp"

namespace swarmform {

// T1:  the agent itself takes a safe action (labelled with that action);
//      cells newly entering the shifted footprint are enumerated both ways.
// T2:  one visible neighbor takes a single Moore step, judged only from the
//      observer's partial view (a deliberate over-approximation).
// T2r: the subset of T2 where the neighbor stays inside the footprint.
// T3:  a new agent arrives on any empty sensed cell.
enum class GraphVariant { T1, T2, T2r, T3 };

struct Transition {
  LocalState to;
  std::optional<Direction> action;  // set for T1 edges only
};

struct TransitionGraph {
  GraphVariant variant;
  std::array<std::vector<Transition>, 256> adj;

  std::uint64_t edge_count() const;
  const std::vector<Transition>& successors(LocalState s) const {
    return adj[s.bits];
  }
};

TransitionGraph build_t1(const BehaviorBundle& bundle);
TransitionGraph build_t2(const BehaviorBundle& bundle);
TransitionGraph build_t2r(const BehaviorBundle& bundle);
TransitionGraph build_t3();

struct CheckOptions {
  // Arrival check: demand only some activating arrival instead of all.
  bool lenient_arrival = false;
  // Exploration walk: allow continuing through desired (but not blocked)
  // intermediate states.
  bool lenient_explore = false;
};

// Witness of a clique of a blocked state that desired simplicial agents can
// form around it without any contradiction in their mutual views.
struct CliqueWitness {
  LocalState blocked_state;
  std::vector<Cell> clique_cells;
  std::vector<LocalState> assigned;  // one state per clique cell
};

struct ConditionReport {
  // Every state can reach every desired state through T1 and T2 moves.
  bool achievable = false;
  // No clique of a blocked state can be held together purely by desired
  // simplicial agents.
  bool lemma3_clique_ok = false;
  // Every static two-neighbor state has an in-view neighbor move (T2r) that
  // reactivates it.
  bool lemma3_loop_ok = false;
  // Every active simplicial agent can walk around its (held fixed) neighbor
  // clique and visit every empty cell Moore-adjacent to it.
  bool thm_explore_ok = false;
  // Every arrival on a static agent reactivates it; agents that are or
  // become fully surrounded are exempt.
  bool thm_arrival_ok = false;

  std::vector<LocalState> unreachable_witnesses;     // achievable = false
  std::vector<CliqueWitness> clique_witnesses;       // lemma3_clique_ok = false
  std::vector<LocalState> loop_witnesses;            // lemma3_loop_ok = false
  std::vector<LocalState> explore_witnesses;         // thm_explore_ok = false
  std::vector<std::pair<LocalState, Direction>> arrival_witnesses;

  bool all_ok() const {
    return achievable && lemma3_clique_ok && lemma3_loop_ok && thm_explore_ok &&
           thm_arrival_ok;
  }
};

// Reachability of all desired states from everywhere, under own moves (T1)
// plus observed neighbor moves (T2). Returns ok + states missing some target.
std::pair<bool, std::vector<LocalState>> check_achievable(
    const TransitionGraph& t1, const TransitionGraph& t2, const StateSets& sets);

// Deadlock-freedom conditions; fills the clique and loop fields of `report`.
void check_lemma3(const StateSets& sets, const TransitionGraph& t2r,
                  ConditionReport& report);

// Exploration and arrival conditions; fills the theorem fields of `report`.
void check_theorem(const BehaviorBundle& bundle, const TransitionGraph& t3,
                   const CheckOptions& opts, ConditionReport& report);

// Runs all checks for a bundle.
ConditionReport run_condition_checks(const BehaviorBundle& bundle,
                                     const CheckOptions& opts = {});

// Positions visited by an active simplicial agent walking around its fixed
// neighbor set via permitted actions (exposed for tests).
std::vector<Cell> explore_walk(const BehaviorBundle& bundle, LocalState s,
                               bool lenient);

}  // namespace swarmform
