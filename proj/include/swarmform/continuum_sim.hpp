#pragma once

// Continuous-space, continuous-time simulator: agents accelerate toward
// velocity commands, align distance and bearing to their neighbors, and
// execute grid actions as straight-line maneuvers, asynchronously and without
// any global knowledge. A simulator-side monitor detects success, collisions
// and disconnections.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarmform/behavior.hpp"
#include "swarmform/rng.hpp"

namespace swarmform {

struct Vec2 {
  double x = 0.0;  // East, meters
  double y = 0.0;  // North, meters

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const;
};

enum class AgentMode { Idle, Adjusting1, Acting, Adjusting2 };
const char* mode_name(AgentMode mode);

struct ContinuumConfig {
  double rho_sensor = 1.6;  // sensing range
  double rho_des = 1.0;     // equilibrium spacing along lattice axes
  double rho_safe = 0.3;    // proximity override / action inhibition radius
  // Repulsion gain. With the attraction sigmoid capped at one, an equilibrium
  // at rho_des only exists for k_r < rho_des * 1; the shipped value leaves
  // the sigmoid at its half point there.
  double k_r = 0.5;
  double k_a = 5.0;    // attraction gain (sigmoid steepness)
  double v_b = 10.0;   // bearing alignment gain
  double v_action = 1.0;
  double t_adj1 = 2.0;  // settle time before an action may start
  double t_adj2 = 9.0;  // cooldown after an action (the no-repeat window)
  double tau = 0.2;     // velocity tracking time constant
  double dt = 0.01;
  double controller_period = 0.1;
  double action_speed_threshold = 0.3;  // neighbor speed that counts as acting
  double collision_radius = 0.1;
  double sim_time_cap = 300.0;
  // Alignment maneuvers must stay below the action-detection threshold, or
  // adjusting agents would read as actors and interrupt every real action.
  // The summed alignment command is therefore clipped to this speed (the
  // raw sum reaches ~2 v_b per misaligned neighbor). First-order velocity
  // tracking never overshoots its command, so the bound holds for speeds
  // too. The close-range override is exempt: emergency evasion may and
  // should be seen as an action.
  double v_align_max = 0.8 * 0.3 * 1.0;
  // Speed cap for close-range evasion (the rho_safe override). Faster than
  // ordinary alignment, but still under the detection threshold: evasion
  // reading as an action would freeze the crowd mid-untangle (see
  // commanded_velocity).
  double v_evade_max = 0.95 * 0.3 * 1.0;
  // Sensing margin for the pre-action link check (see action_keeps_links):
  // a link only counts as kept while shorter than
  // (1 - link_slack) * rho_sensor. The margin absorbs what the check cannot
  // see: the drift of a neighbor that began its own action inside the
  // detection lag (~0.1 m with braking), frozen neighbors' reaction lag, and
  // the actor's transverse settling drift. It still admits true diagonal
  // links at sqrt(2) * rho_des.
  double link_slack = 0.08;
  // Below this fraction of rho_des the spacing field is not trustworthy: the
  // ring rounding misreads the neighbor's cell, and for misaligned bearings
  // the mirrored bearing term turns net-attractive, which is exactly how
  // such crowds form. Inside the band the command switches to pure
  // separation until the crowd has opened back up (see commanded_velocity).
  double crowd_band = 0.75;
  // Outer counterpart of rho_safe, as a fraction of rho_sensor: alignment
  // never commands a receding component along a link already longer than
  // link_guard * rho_sensor (see guard_links). The summed field weighs all
  // neighbors alike, so a compressed cluster's repulsion can otherwise push
  // an agent straight off the one link bridging it to the rest of the swarm.
  // 0.9 * 1.6 = 1.44 sits above the diagonal equilibrium sqrt(2) * rho_des,
  // leaving settled lattice links unaffected.
  double link_guard = 0.9;

  // Equilibrium shifts of the attraction term, one per spacing. Zero means
  // "not solved yet"; simulate() solves them on entry.
  double rho_s_orth = 0.0;
  double rho_s_diag = 0.0;

  // Copy with both shifts solved for the configured gains.
  ContinuumConfig solved() const;
};

// Radial velocity command toward a neighbor at distance rho:
// -k_r/rho + 1/(1 + exp(-k_a (rho - rho_s))). Positive approaches.
double attraction_repulsion(double rho, double rho_s, const ContinuumConfig& cfg);

// The shift making attraction_repulsion vanish at distance rho_eq, found by
// bisection on the monotone residual. Throws std::invalid_argument when the
// gains admit no root (k_r <= 0 or k_r >= rho_eq).
double solve_rho_s(const ContinuumConfig& cfg, double rho_eq);

// Summed alignment command over the given relative neighbor positions, in
// East/North components. Bearings are measured clockwise from North; each
// neighbor is steered toward the nearest of the eight lattice bearings, with
// sqrt(2) spacing on the diagonals. When the nearest neighbor is closer than
// rho_safe only that neighbor contributes. Empty input commands a stop.
Vec2 commanded_velocity(const std::vector<Vec2>& rel_neighbors,
                        const ContinuumConfig& cfg);

// Occupancy state from relative neighbor positions: positions are rounded to
// the unit grid (in rho_des multiples) and clamped to the surrounding ring;
// anything rounding onto the agent itself counts toward the nearest ring cell
// center instead. Throws std::domain_error when no neighbor is given.
LocalState discretize_state(const std::vector<Vec2>& rel_neighbors,
                            const ContinuumConfig& cfg);

// Connectivity guard applied to an alignment command: strips any component
// that recedes along a link longer than link_guard * rho_sensor, unless a
// neighbor is inside rho_safe (evasion outranks link keeping). Tangential
// motion along a guarded link stays free. Returns the adjusted command; its
// norm never grows.
Vec2 guard_links(Vec2 cmd, const std::vector<Vec2>& rel_neighbors,
                 const ContinuumConfig& cfg);

// Pre-action geometry check. The occupancy word licenses a move on the
// lattice, but real neighbors sit off their cell centers, so the same step is
// re-checked against the sensed positions: while the actor moves, neighbors
// hold still, which makes the outcome computable in advance. True when, after
// stepping one cell along u, every current neighbor is still reachable from
// the mover through links shorter than (1 - link_slack) * rho_sensor, and
// none ends up inside rho_safe of the landing point. Without this check a
// grid-legal step away from an overstretched link (a neighbor rounding to an
// adjacent cell from well past its nominal range) can carry it beyond
// rho_sensor and split the swarm.
bool action_keeps_links(const std::vector<Vec2>& rel_neighbors, Direction u,
                        const ContinuumConfig& cfg);

struct ContinuumAgent {
  Vec2 position;
  Vec2 velocity;
  Vec2 command;
  AgentMode mode = AgentMode::Idle;
  double mode_deadline = 0.0;      // when Adjusting1/Adjusting2 ends
  // Set when an action is interrupted: the agent then commands against its
  // own velocity until nearly stopped, instead of coasting out a quarter
  // cell. Two agents that began actions inside each other's detection lag
  // abort on sight of each other; the shorter their joint drift, the less a
  // mutually stretched link can snap.
  bool braking = false;
  std::optional<Direction> current_action;
  Vec2 action_start;               // where the current maneuver began
  double action_length = 0.0;      // displacement that completes it
  // Each agent runs its controller on its own clock: a random phase plus a
  // small per-agent period skew, like independent oscillators. The drift
  // matters: with perfectly locked clocks, two agents whose adjustment timers
  // expire together restart them together after every mutual interruption and
  // repeat the collision indefinitely.
  double next_tick = 0.0;          // seconds; controller fires when t reaches this
  double period = 0.0;             // seconds between this agent's ticks
};

struct SensedNeighbor {
  Vec2 rel;           // relative position
  double speed = 0.0;  // observed speed, for action detection
};

// One controller invocation at time t: updates mode, command and any action
// bookkeeping in place. Agents act only when their occupancy state permits a
// move, no sensed neighbor moves faster than the action threshold, and nobody
// is inside rho_safe; a settling delay precedes the move and a cooldown
// follows it. Draws from rng only when an action starts.
void controller_tick(ContinuumAgent& agent,
                     const std::vector<SensedNeighbor>& sensed,
                     const BehaviorBundle& bundle, const ContinuumConfig& cfg,
                     double t, Rng& rng);

struct TrajectorySample {
  double t = 0.0;
  int agent = 0;
  Vec2 position;
  Vec2 velocity;
  AgentMode mode = AgentMode::Idle;
};

struct ContinuumReport {
  std::string pattern;
  std::string behavior;
  std::uint64_t seed = 0;
  bool success = false;
  bool disconnected = false;
  double t_complete = -1.0;    // simulated seconds, -1 when never completed
  double t_end = 0.0;          // simulated seconds when the run stopped
  double disconnect_time = -1.0;
  double min_distance = 0.0;   // smallest pairwise distance ever observed
};

struct ContinuumOptions {
  // Fixed initial positions instead of the seeded random formation.
  std::optional<std::vector<Vec2>> initial_positions;
  // Trajectory capture: every k-th integration step per agent (0 = off).
  int sample_every = 0;
  std::vector<TrajectorySample>* trajectory = nullptr;
};

// Seeded run until the discretized swarm equals the target pattern, the
// sensing graph disconnects, or the time cap. Deterministic in its inputs.
ContinuumReport simulate(const BehaviorBundle& bundle, const ContinuumConfig& cfg,
                         std::uint64_t seed, const ContinuumOptions& opts = {});

}  // namespace swarmform
