#include "swarmform/grid_sim.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace swarmform {

namespace {

std::uint64_t cell_key(Cell c) {
  return (std::uint64_t(std::uint32_t(c.x)) << 32) | std::uint32_t(c.y);
}

constexpr std::array<Cell, 4> kOrthOffsets{{{0, 1}, {1, 0}, {0, -1}, {-1, 0}}};

}  // namespace

GridWorld GridWorld::from_pattern(const Pattern& p) {
  GridWorld w;
  for (const Cell& c : p.cells()) {
    w.occupied_.emplace(cell_key(c), static_cast<int>(w.positions_.size()));
    w.positions_.push_back(c);
  }
  return w;
}

GridWorld GridWorld::random_connected(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("need at least one agent");
  GridWorld w;
  w.occupied_.emplace(cell_key({0, 0}), 0);
  w.positions_.push_back({0, 0});
  // Random-walk growth: wander from the origin and drop an agent on every
  // first visit. Consecutive walk cells are adjacent, so the result is
  // connected; the walk makes stringy formations rather than round blobs.
  Cell walker{0, 0};
  while (w.agent_count() < n) {
    walker = walker + offset_of(direction_from_index(int(rng.bounded(kDirectionCount))));
    if (!w.occupied(walker)) {
      w.occupied_.emplace(cell_key(walker), static_cast<int>(w.positions_.size()));
      w.positions_.push_back(walker);
    }
  }
  return w;
}

bool GridWorld::occupied(Cell c) const { return occupied_.count(cell_key(c)) > 0; }

std::optional<int> GridWorld::agent_at(Cell c) const {
  const auto it = occupied_.find(cell_key(c));
  if (it == occupied_.end()) return std::nullopt;
  return it->second;
}

LocalState GridWorld::state_of_agent(int agent) const {
  return state_at(positions_[agent]);
}

LocalState GridWorld::state_at(Cell c) const {
  LocalState s;
  for (int i = 0; i < kDirectionCount; ++i) {
    const Direction d = direction_from_index(i);
    if (occupied(c + offset_of(d))) s = s.with(d);
  }
  return s;
}

Pattern GridWorld::to_pattern() const { return Pattern::from_cells(positions_); }

bool GridWorld::matches(const Pattern& canonical_target) const {
  return to_pattern().canonical() == canonical_target;
}

bool GridWorld::connected() const { return is_connected(positions_); }

void GridWorld::move(int agent, Cell to) {
  if (occupied(to)) throw SafetyViolation("two agents on one cell");
  occupied_.erase(cell_key(positions_[agent]));
  occupied_.emplace(cell_key(to), agent);
  positions_[agent] = to;
}

DirectionSet permitted_actions(const GridWorld& world, int agent,
                               const BehaviorBundle& bundle) {
  const Cell from = world.position(agent);
  DirectionSet acts = bundle.q.actions(world.state_at(from));
  if (!bundle.config.cross_rule || acts.empty()) return acts;

  DirectionSet out;
  for (Direction d : acts.list()) {
    const Cell to = from + offset_of(d);
    const auto occupied_after = [&](Cell c) {
      if (c == from) return false;
      return c == to || world.occupied(c);
    };
    // Everyone around the vacated or the entered cell (the mover included,
    // since the entered cell borders the vacated one) must keep an orthogonal
    // neighbor, unless its whole post-move state is the excused one.
    std::array<Cell, 16> affected;
    int n_affected = 0;
    for (int i = 0; i < kDirectionCount; ++i) {
      const Cell off = offset_of(direction_from_index(i));
      for (const Cell& base : {from, to}) {
        const Cell a = base + off;
        if (!occupied_after(a)) continue;
        bool dup = false;
        for (int k = 0; k < n_affected && !dup; ++k) dup = affected[k] == a;
        if (!dup) affected[n_affected++] = a;
      }
    }
    bool ok = true;
    for (int i = 0; i < n_affected && ok; ++i) {
      const Cell a = affected[i];
      bool supported = false;
      for (const Cell& o : kOrthOffsets) {
        if (occupied_after(a + o)) {
          supported = true;
          break;
        }
      }
      if (supported) continue;
      LocalState post;
      for (int k = 0; k < kDirectionCount; ++k) {
        const Direction dk = direction_from_index(k);
        if (occupied_after(a + offset_of(dk))) post = post.with(dk);
      }
      ok = bundle.config.cross_rule_exception &&
           post == *bundle.config.cross_rule_exception;
    }
    if (ok) out.add(d);
  }
  return out;
}

StepOutcome step(GridWorld& world, const BehaviorBundle& bundle, Rng& rng) {
  struct Candidate {
    int agent;
    DirectionSet acts;
  };
  std::vector<Candidate> movable;
  bool any_active = false;
  for (int a = 0; a < world.agent_count(); ++a) {
    const LocalState s = world.state_of_agent(a);
    if (!bundle.sets.is_active(s)) continue;
    any_active = true;
    const DirectionSet acts = permitted_actions(world, a, bundle);
    if (!acts.empty()) movable.push_back({a, acts});
  }

  if (!any_active) {
    if (world.matches(bundle.p_des)) return {StepStatus::Converged, -1, {}, {}};
    // Every agent static yet the pattern is wrong: the state sets admit a
    // second stable pattern, which a verified bundle rules out. Loud failure
    // beats silently reporting a non-convergence.
    throw std::logic_error("all agents static in a pattern other than the target");
  }
  if (movable.empty()) return {StepStatus::Stalled, -1, {}, {}};

  if (bundle.config.no_repeat && world.last_mover && movable.size() > 1) {
    const auto it = std::find_if(movable.begin(), movable.end(), [&](const Candidate& c) {
      return c.agent == *world.last_mover;
    });
    if (it != movable.end()) movable.erase(it);
  }

  const Candidate& pick = movable[rng.bounded(movable.size())];
  const std::vector<Direction> dirs = pick.acts.list();
  const Direction d = dirs[rng.bounded(dirs.size())];
  const Cell from = world.position(pick.agent);
  const Cell to = from + offset_of(d);
  world.move(pick.agent, to);
  world.last_mover = pick.agent;
  ++world.step_count;
  return {StepStatus::Moved, pick.agent, from, to};
}

RunReport run(const BehaviorBundle& bundle, std::uint64_t seed, const RunOptions& opts) {
  RunReport report;
  report.pattern = bundle.p_des.name;
  report.behavior = bundle.config.name;
  report.seed = seed;

  Rng rng(seed);
  GridWorld world = GridWorld::random_connected(bundle.p_des.size(), rng);
  if (!world.connected()) throw SafetyViolation("disconnected initial formation");

  while (world.step_count < opts.step_cap) {
    const StepOutcome out = step(world, bundle, rng);
    if (out.status == StepStatus::Converged) {
      report.converged = true;
      break;
    }
    if (out.status == StepStatus::Stalled) {
      // Nothing may move and nothing will change; the run is over.
      report.stalled = true;
      break;
    }
    if (opts.trace != nullptr && *opts.trace) {
      (*opts.trace)(world.step_count, out.agent, out.from, out.to);
    }
    if (opts.connectivity_check_every > 0 &&
        world.step_count % opts.connectivity_check_every == 0 && !world.connected()) {
      throw SafetyViolation("swarm disconnected after a move");
    }
  }
  if (!report.converged && world.matches(bundle.p_des)) report.converged = true;
  report.steps = world.step_count;
  return report;
}

std::vector<RunReport> batch(const BehaviorBundle& bundle, int n_runs,
                             std::uint64_t base_seed, const RunOptions& opts) {
  std::vector<RunReport> reports;
  reports.reserve(static_cast<std::size_t>(n_runs));
  for (int i = 0; i < n_runs; ++i) {
    reports.push_back(run(bundle, derive_seed(base_seed, std::uint64_t(i)), opts));
  }
  return reports;
}

}  // namespace swarmform
