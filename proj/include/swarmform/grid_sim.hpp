#pragma once

// Discrete world simulator: agents live on lattice cells, and per time step
// one uniformly drawn movable agent performs one permitted action. Collisions
// and disconnections are impossible by construction and double-checked by
// explicit monitors.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "swarmform/behavior.hpp"
#include "swarmform/rng.hpp"

namespace swarmform {

// A collision or disconnection observed by a monitor. Indicates a defect in
// the derived behavior (or the simulator), never a legal run outcome.
class SafetyViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridWorld {
 public:
  static GridWorld from_pattern(const Pattern& p);
  // Seeded growth: repeatedly occupy a uniformly drawn empty cell adjacent to
  // the current cluster until n agents are placed.
  static GridWorld random_connected(int n, Rng& rng);

  int agent_count() const { return static_cast<int>(positions_.size()); }
  Cell position(int agent) const { return positions_[agent]; }
  bool occupied(Cell c) const;
  std::optional<int> agent_at(Cell c) const;

  // Occupancy of the eight cells around the given agent.
  LocalState state_of_agent(int agent) const;
  LocalState state_at(Cell c) const;  // c need not be occupied

  Pattern to_pattern() const;
  bool matches(const Pattern& canonical_target) const;
  bool connected() const;

  // Moves one agent by one cell. Throws SafetyViolation when the target cell
  // is occupied. Does not touch step_count or last_mover.
  void move(int agent, Cell to);

  std::uint64_t step_count = 0;
  std::optional<int> last_mover;

 private:
  std::vector<Cell> positions_;
  std::unordered_map<std::uint64_t, int> occupied_;  // cell key -> agent id
};

enum class StepStatus {
  Moved,      // one agent stepped; step_count advanced
  Converged,  // no movable agent and the pattern is the target
  Stalled,    // movable candidates exist by state class, all filtered empty
};

struct StepOutcome {
  StepStatus status = StepStatus::Moved;
  int agent = -1;
  Cell from{};
  Cell to{};
};

// Permitted actions of one agent under the full world knowledge: the bundle's
// per-state actions, plus (for cross-rule behaviors) a global filter that
// simulates the move and demands an orthogonal neighbor for every agent
// around the vacated and the entered cell, excused states excepted.
DirectionSet permitted_actions(const GridWorld& world, int agent,
                               const BehaviorBundle& bundle);

// One simulation tick. Draws uniformly among agents that are active and have
// a non-empty permitted action set; under no-repeat behaviors the previous
// mover is excluded while any other agent can move. With no active agent the
// swarm has settled: Converged on the target pattern, and anything else is a
// hard error (a verified bundle admits no other all-static pattern).
StepOutcome step(GridWorld& world, const BehaviorBundle& bundle, Rng& rng);

struct RunReport {
  std::string pattern;
  std::string behavior;
  std::uint64_t seed = 0;
  bool converged = false;
  bool stalled = false;
  std::uint64_t steps = 0;
};

struct RunOptions {
  std::uint64_t step_cap = 1'000'000;
  // Connectivity is re-checked after every k-th realized move (1 = each one).
  // Collisions are always checked on every move.
  std::uint64_t connectivity_check_every = 1;
  // Optional replay sink called once per realized move.
  std::function<void(std::uint64_t step, int agent, Cell from, Cell to)>* trace =
      nullptr;
};

// Seeded run from a random connected start until convergence, stall, or cap.
// Deterministic in (bundle, seed, options).
RunReport run(const BehaviorBundle& bundle, std::uint64_t seed,
              const RunOptions& opts = {});

// Independent seeded runs; seeds are derived from base_seed and the run
// index, so any subset of runs reproduces identically.
std::vector<RunReport> batch(const BehaviorBundle& bundle, int n_runs,
                             std::uint64_t base_seed, const RunOptions& opts = {});

}  // namespace swarmform
