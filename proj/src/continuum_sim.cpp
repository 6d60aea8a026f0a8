#include "swarmform/continuum_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

namespace swarmform {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec2 unit_toward(Direction d) {
  Cell o = offset_of(d);
  double len = std::hypot(static_cast<double>(o.x), static_cast<double>(o.y));
  return {o.x / len, o.y / len};
}

bool is_diagonal(Direction d) { return (index_of(d) & 1) != 0; }

}  // namespace

double Vec2::norm() const { return std::hypot(x, y); }

const char* mode_name(AgentMode mode) {
  switch (mode) {
    case AgentMode::Idle: return "idle";
    case AgentMode::Adjusting1: return "adjusting1";
    case AgentMode::Acting: return "acting";
    case AgentMode::Adjusting2: return "adjusting2";
  }
  return "?";
}

double attraction_repulsion(double rho, double rho_s, const ContinuumConfig& cfg) {
  if (!(rho > 0.0)) {
    throw std::domain_error("attraction_repulsion: distance must be positive");
  }
  return -cfg.k_r / rho + 1.0 / (1.0 + std::exp(-cfg.k_a * (rho - rho_s)));
}

double solve_rho_s(const ContinuumConfig& cfg, double rho_eq) {
  if (!(cfg.k_r > 0.0) || !(cfg.k_a > 0.0) || !(rho_eq > 0.0)) {
    throw std::invalid_argument("solve_rho_s: gains and distance must be positive");
  }
  // The residual rho_s -> attraction_repulsion(rho_eq, rho_s) is strictly
  // decreasing with limits 1 - k_r/rho_eq and -k_r/rho_eq, so a root exists
  // exactly when k_r < rho_eq. 60/k_a puts the sigmoid within 1e-26 of its
  // limits at the bracket ends.
  double lo = rho_eq - 60.0 / cfg.k_a;
  double hi = rho_eq + 60.0 / cfg.k_a;
  if (!(attraction_repulsion(rho_eq, lo, cfg) > 0.0) ||
      !(attraction_repulsion(rho_eq, hi, cfg) < 0.0)) {
    throw std::invalid_argument(
        "solve_rho_s: no equilibrium shift exists for these gains "
        "(repulsion must satisfy k_r < equilibrium distance)");
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (attraction_repulsion(rho_eq, mid, cfg) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ContinuumConfig ContinuumConfig::solved() const {
  ContinuumConfig out = *this;
  out.rho_s_orth = solve_rho_s(out, out.rho_des);
  out.rho_s_diag = solve_rho_s(out, std::sqrt(2.0) * out.rho_des);
  return out;
}

Vec2 commanded_velocity(const std::vector<Vec2>& rel_neighbors,
                        const ContinuumConfig& cfg) {
  if (rel_neighbors.empty()) return {};

  // Proximity override: a neighbor inside rho_safe monopolizes the command.
  std::size_t first = 0, last = rel_neighbors.size();
  std::size_t nearest = 0;
  double nearest_d = rel_neighbors[0].norm();
  for (std::size_t i = 1; i < rel_neighbors.size(); ++i) {
    double d = rel_neighbors[i].norm();
    if (d < nearest_d) {
      nearest_d = d;
      nearest = i;
    }
  }
  if (nearest_d < cfg.rho_safe) {
    first = nearest;
    last = nearest + 1;
  } else if (double band = cfg.crowd_band * cfg.rho_des; nearest_d < band) {
    // Crowd recovery. Interrupted movers strand between lattice sites, and
    // once spacings drop below the band the field stops helping: its bearing
    // terms (one per neighbor, magnitude up to 2 v_b) dominate the capped
    // command direction, so the short-range repulsion is never expressed and
    // the crowd persists or contracts further. Pure separation, weighted so
    // the nearest neighbor dominates, is guaranteed to reopen the spacing;
    // the field takes over again at the band edge.
    Vec2 away;
    for (const Vec2& n : rel_neighbors) {
      double d = n.norm();
      if (d >= band) continue;
      away = away - ((band / d - 1.0) / d) * n;
    }
    double mag = away.norm();
    if (mag > cfg.v_align_max) away = (cfg.v_align_max / mag) * away;
    return away;
  }

  Vec2 cmd;
  for (std::size_t i = first; i < last; ++i) {
    const Vec2& n = rel_neighbors[i];
    double rho = n.norm();
    double beta = std::atan2(n.x, n.y);  // clockwise from North
    double k = std::round(beta / (kPi / 4.0));
    double beta_des = k * (kPi / 4.0);
    bool diag = (static_cast<long long>(k) & 1LL) != 0;
    double rho_s = diag ? cfg.rho_s_diag : cfg.rho_s_orth;
    double vr = attraction_repulsion(rho, rho_s, cfg);
    double mirrored = 2.0 * beta_des - beta;
    cmd.y += (vr + cfg.v_b) * std::cos(beta) - cfg.v_b * std::cos(mirrored);
    cmd.x += (vr + cfg.v_b) * std::sin(beta) - cfg.v_b * std::sin(mirrored);
  }
  // Keep every adjustment below the action-detection threshold, evasion
  // included. The raw close-range repulsion grows unboundedly at small range:
  // unsaturated it hurls the agent through the crowd, and saturated anywhere
  // above the threshold it reads as an action, freezing every neighbor's
  // alignment and vetoing their moves — a crowded cluster then never gets
  // quiet enough for anyone to step out of it.
  double cap = (nearest_d < cfg.rho_safe) ? cfg.v_evade_max : cfg.v_align_max;
  double mag = cmd.norm();
  if (mag > cap) cmd = (cap / mag) * cmd;
  return cmd;
}

Vec2 guard_links(Vec2 cmd, const std::vector<Vec2>& rel_neighbors,
                 const ContinuumConfig& cfg) {
  double nearest = std::numeric_limits<double>::infinity();
  for (const Vec2& n : rel_neighbors) nearest = std::min(nearest, n.norm());
  // Evasion from an imminent collision outranks link keeping.
  if (nearest < cfg.rho_safe) return cmd;
  // Two passes: stripping the receding component along one guarded link can
  // reintroduce one along another; the second pass settles the common case
  // of a pair of guarded links.
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vec2& n : rel_neighbors) {
      double d = n.norm();
      if (d < cfg.link_guard * cfg.rho_sensor) continue;
      Vec2 u = (1.0 / d) * n;
      double toward = cmd.dot(u);
      if (toward < 0.0) cmd = cmd - toward * u;
    }
  }
  return cmd;
}

int ring_index_of(const Vec2& rel, const ContinuumConfig& cfg) {
  double gx = rel.x / cfg.rho_des;
  double gy = rel.y / cfg.rho_des;
  long cx = std::clamp(std::lround(gx), -1L, 1L);
  long cy = std::clamp(std::lround(gy), -1L, 1L);
  if (cx == 0 && cy == 0) {
    // Reading rounds onto the agent itself: take the nearest ring cell.
    double best = std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i < 8; ++i) {
      Cell c = offset_of(direction_from_index(i));
      double dx = gx - c.x;
      double dy = gy - c.y;
      double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        best_i = i;
      }
    }
    return best_i;
  }
  auto dir = direction_between(Cell{0, 0},
                               Cell{static_cast<int>(cx), static_cast<int>(cy)});
  return index_of(*dir);
}

LocalState discretize_state(const std::vector<Vec2>& rel_neighbors,
                            const ContinuumConfig& cfg) {
  if (rel_neighbors.empty()) {
    throw std::domain_error("discretize_state: no neighbors in range");
  }
  std::uint8_t bits = 0;
  for (const Vec2& n : rel_neighbors) {
    bits = static_cast<std::uint8_t>(bits | (1u << ring_index_of(n, cfg)));
  }
  return LocalState{bits};
}

bool action_keeps_links(const std::vector<Vec2>& rel_neighbors, Direction u,
                        const ContinuumConfig& cfg) {
  const double len = (is_diagonal(u) ? std::sqrt(2.0) : 1.0) * cfg.rho_des;
  const Vec2 m = len * unit_toward(u);
  const double thr = (1.0 - cfg.link_slack) * cfg.rho_sensor;
  const int k = static_cast<int>(rel_neighbors.size());
  // Nobody may end up inside the evasion radius of the landing point.
  for (const Vec2& n : rel_neighbors) {
    if ((n - m).norm() < cfg.rho_safe) return false;
  }
  // Local graph during and after the step: neighbors hold still while the
  // action runs, and the mover travels the segment from the origin to m.
  // Distance to a point is convex along a segment, so a mover link that
  // meets the threshold at both ends of the segment holds throughout the
  // transit. All neighbors must stay reachable from the mover through such
  // links plus the (unchanged) neighbor-to-neighbor links.
  std::vector<int> stack{-1};
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  int reached = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w = 0; w < k; ++w) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      const Vec2& nw = rel_neighbors[static_cast<std::size_t>(w)];
      bool linked;
      if (v < 0) {
        linked = (nw - m).norm() <= thr && nw.norm() <= thr;
      } else {
        linked = (nw - rel_neighbors[static_cast<std::size_t>(v)]).norm() <= thr;
      }
      if (linked) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == k;
}

void controller_tick(ContinuumAgent& agent,
                     const std::vector<SensedNeighbor>& sensed,
                     const BehaviorBundle& bundle, const ContinuumConfig& cfg,
                     double t, Rng& rng) {
  bool neighbor_acting = false;
  bool breach = false;
  std::vector<Vec2> rel;
  rel.reserve(sensed.size());
  for (const SensedNeighbor& s : sensed) {
    rel.push_back(s.rel);
    if (s.speed > cfg.action_speed_threshold * cfg.v_action) neighbor_acting = true;
    if (s.rel.norm() < cfg.rho_safe) breach = true;
  }

  if (agent.mode == AgentMode::Acting) {
    if (!neighbor_acting && !breach) {
      // Carry on along the committed direction; completion is detected by the
      // integrator, which watches the displacement.
      agent.command = cfg.v_action * unit_toward(*agent.current_action);
      return;
    }
    agent.mode = AgentMode::Adjusting2;
    agent.mode_deadline = t + cfg.t_adj2;
    agent.current_action.reset();
    agent.braking = true;
  }

  if (agent.braking && agent.velocity.norm() <= 0.05 * cfg.v_action) {
    agent.braking = false;
  }
  // Alignment runs only while the neighborhood is quiet: an agent that sees a
  // neighbor acting holds still (zero command) so its own adjustment is never
  // mistaken for an action, and the actor proceeds undisturbed. A braking
  // agent overrides both with a counter-command (see ContinuumAgent::braking).
  if (agent.braking) {
    agent.command = -2.0 * agent.velocity;
  } else {
    agent.command =
        neighbor_acting ? Vec2{} : guard_links(commanded_velocity(rel, cfg), rel, cfg);
  }

  LocalState state{0};
  bool eligible = false;
  if (!rel.empty() && !neighbor_acting && !breach) {
    state = discretize_state(rel, cfg);
    eligible = bundle.sets.is_active(state) && bundle.q.has(state);
  }

  switch (agent.mode) {
    case AgentMode::Idle:
      if (eligible) {
        agent.mode = AgentMode::Adjusting1;
        agent.mode_deadline = t + cfg.t_adj1;
      }
      break;
    case AgentMode::Adjusting1:
      if (neighbor_acting) {
        // The settling clock pauses while someone nearby acts — the agent is
        // holding still anyway, and restarting the full delay after every
        // action would serialize the swarm. The occupancy word and the link
        // check are recomputed fresh at the firing tick regardless.
        agent.mode_deadline += agent.period;
      } else if (!eligible) {
        agent.mode = AgentMode::Idle;
      } else if (t >= agent.mode_deadline) {
        // The occupancy word licenses these moves on the lattice; keep only
        // those that also preserve the sensed geometry (see
        // action_keeps_links). When none survives, wait for the neighborhood
        // to relax and try again after another settling delay.
        std::vector<Direction> actions;
        for (Direction u : bundle.q.actions(state).list()) {
          if (action_keeps_links(rel, u, cfg)) actions.push_back(u);
        }
        if (actions.empty()) {
          agent.mode = AgentMode::Idle;
          break;
        }
        Direction u = actions[rng.bounded(actions.size())];
        agent.mode = AgentMode::Acting;
        agent.current_action = u;
        agent.action_start = agent.position;
        agent.action_length = (is_diagonal(u) ? std::sqrt(2.0) : 1.0) * cfg.rho_des;
        agent.command = cfg.v_action * unit_toward(u);
      }
      break;
    case AgentMode::Adjusting2:
      if (t >= agent.mode_deadline) agent.mode = AgentMode::Idle;
      break;
    case AgentMode::Acting:
      break;  // handled above
  }
}

ContinuumReport simulate(const BehaviorBundle& bundle, const ContinuumConfig& cfg0,
                         std::uint64_t seed, const ContinuumOptions& opts) {
  ContinuumConfig cfg = cfg0.solved();
  const int n = static_cast<int>(bundle.p_des.size());
  if (n < 2) {
    throw std::invalid_argument("simulate: need at least two agents");
  }
  const Pattern target = bundle.p_des.canonical();

  Rng rng(seed);
  std::vector<ContinuumAgent> agents(static_cast<std::size_t>(n));

  if (opts.initial_positions) {
    if (static_cast<int>(opts.initial_positions->size()) != n) {
      throw std::invalid_argument("simulate: initial positions do not match pattern size");
    }
    for (int i = 0; i < n; ++i) {
      agents[static_cast<std::size_t>(i)].position = (*opts.initial_positions)[static_cast<std::size_t>(i)];
    }
  } else {
    // Random connected cloud, sampled as a jittered lattice shape: a random
    // walk over the grid picks n distinct connected cells, and each agent
    // starts near its cell's center. Starting near lattice bearings matters:
    // the adjustment law turns bearing misalignment into net attraction
    // (about 2 v_b sin^2 of the bearing error, radially inward), and with
    // adjustment speeds capped below the action-detection threshold a large
    // cloud of unaligned agents contracts into a jam faster than it can
    // align its bearings.
    std::vector<Cell> cells{Cell{0, 0}};
    Cell at{0, 0};
    while (static_cast<int>(cells.size()) < n) {
      auto dir = direction_from_index(static_cast<int>(rng.bounded(8)));
      Cell step = offset_of(dir);
      at = Cell{at.x + step.x, at.y + step.y};
      if (std::find(cells.begin(), cells.end(), at) == cells.end()) {
        cells.push_back(at);
      }
    }
    for (int i = 0; i < n; ++i) {
      Vec2 jitter{rng.range_real(-0.08, 0.08), rng.range_real(-0.08, 0.08)};
      agents[static_cast<std::size_t>(i)].position =
          Vec2{cells[static_cast<std::size_t>(i)].x * cfg.rho_des,
               cells[static_cast<std::size_t>(i)].y * cfg.rho_des} +
          jitter;
    }
  }
  for (ContinuumAgent& a : agents) {
    a.period = cfg.controller_period * rng.range_real(0.95, 1.05);
    a.next_tick = rng.range_real(0.0, cfg.controller_period);
  }

  ContinuumReport report;
  report.pattern = bundle.p_des.name;
  report.behavior = bundle.config.name;
  report.seed = seed;
  report.min_distance = std::numeric_limits<double>::infinity();

  const long total_steps = std::lround(cfg.sim_time_cap / cfg.dt);
  std::vector<std::vector<double>> dist(static_cast<std::size_t>(n),
                                        std::vector<double>(static_cast<std::size_t>(n), 0.0));
  std::vector<int> stack;
  std::vector<char> seen(static_cast<std::size_t>(n));
  std::vector<Vec2> rel;
  std::vector<SensedNeighbor> sensed;

  for (long step = 0;; ++step) {
    const double t = static_cast<double>(step) * cfg.dt;

    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        Vec2 d = agents[static_cast<std::size_t>(j)].position -
                 agents[static_cast<std::size_t>(i)].position;
        double dn = std::sqrt(d.x * d.x + d.y * d.y);
        dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = dn;
        dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = dn;
        if (dn < report.min_distance) report.min_distance = dn;
      }
    }

    if (opts.trajectory && opts.sample_every > 0 && step % opts.sample_every == 0) {
      for (int i = 0; i < n; ++i) {
        const ContinuumAgent& a = agents[static_cast<std::size_t>(i)];
        opts.trajectory->push_back({t, i, a.position, a.velocity, a.mode});
      }
    }

    // Connectivity of the sensing graph, breadth-first from agent 0.
    std::fill(seen.begin(), seen.end(), 0);
    stack.assign(1, 0);
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w) {
        if (!seen[static_cast<std::size_t>(w)] &&
            dist[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] <= cfg.rho_sensor &&
            w != v) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++reached;
          stack.push_back(w);
        }
      }
    }
    if (reached < n) {
      report.disconnected = true;
      report.disconnect_time = t;
      report.t_end = t;
      break;
    }

    // Success monitor: every discretized state desired, and the occupancy
    // grid anchored at agent 0 realizes the target pattern.
    bool all_desired = true;
    for (int i = 0; i < n && all_desired; ++i) {
      rel.clear();
      for (int j = 0; j < n; ++j) {
        if (j != i && dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] <= cfg.rho_sensor) {
          rel.push_back(agents[static_cast<std::size_t>(j)].position -
                        agents[static_cast<std::size_t>(i)].position);
        }
      }
      if (rel.empty() || !bundle.sets.des.contains(discretize_state(rel, cfg))) {
        all_desired = false;
      }
    }
    if (all_desired) {
      std::vector<Cell> cells;
      cells.reserve(static_cast<std::size_t>(n));
      bool distinct = true;
      for (int i = 0; i < n && distinct; ++i) {
        Vec2 d = agents[static_cast<std::size_t>(i)].position - agents[0].position;
        Cell c{static_cast<int>(std::lround(d.x / cfg.rho_des)),
               static_cast<int>(std::lround(d.y / cfg.rho_des))};
        for (const Cell& prev : cells) {
          if (prev == c) {
            distinct = false;
            break;
          }
        }
        cells.push_back(c);
      }
      if (distinct && Pattern::from_cells(cells).canonical() == target) {
        report.success = true;
        report.t_complete = t;
        report.t_end = t;
        break;
      }
    }

    if (step == total_steps) {
      report.t_end = t;
      break;
    }

    for (int i = 0; i < n; ++i) {
      ContinuumAgent& a = agents[static_cast<std::size_t>(i)];
      if (t + 0.5 * cfg.dt < a.next_tick) continue;
      a.next_tick += a.period;
      sensed.clear();
      for (int j = 0; j < n; ++j) {
        if (j != i && dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] <= cfg.rho_sensor) {
          sensed.push_back({agents[static_cast<std::size_t>(j)].position -
                                a.position,
                            agents[static_cast<std::size_t>(j)].velocity.norm()});
        }
      }
      controller_tick(a, sensed, bundle, cfg, t, rng);
    }

    // The alignment law is a continuous feedback; refresh it every step.
    // Holding it over a whole controller period adds enough phase lag to
    // destabilize the bearing loop (gain ~4 v_b at pair range). Decisions
    // (mode changes, action choice) stay on the slower asynchronous ticks.
    for (int i = 0; i < n; ++i) {
      ContinuumAgent& a = agents[static_cast<std::size_t>(i)];
      if (a.mode == AgentMode::Acting) {
        a.command = cfg.v_action * unit_toward(*a.current_action);
        continue;
      }
      if (a.braking && a.velocity.norm() <= 0.05 * cfg.v_action) a.braking = false;
      if (a.braking) {
        a.command = -2.0 * a.velocity;
        continue;
      }
      rel.clear();
      bool neighbor_acting = false;
      for (int j = 0; j < n; ++j) {
        if (j != i && dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] <= cfg.rho_sensor) {
          rel.push_back(agents[static_cast<std::size_t>(j)].position - a.position);
          if (agents[static_cast<std::size_t>(j)].velocity.norm() >
              cfg.action_speed_threshold * cfg.v_action) {
            neighbor_acting = true;
          }
        }
      }
      a.command = (rel.empty() || neighbor_acting)
                      ? Vec2{}
                      : guard_links(commanded_velocity(rel, cfg), rel, cfg);
    }

    const double blend = cfg.dt / cfg.tau;
    for (ContinuumAgent& a : agents) {
      a.velocity = a.velocity + blend * (a.command - a.velocity);
      a.position = a.position + cfg.dt * a.velocity;
      if (a.mode == AgentMode::Acting) {
        // Stop early by the distance the decaying velocity will still cover
        // (~v * tau), so the maneuver lands on the intended cell instead of
        // coasting past it — overshoot both distorts the geometry the next
        // reading rounds from and voids the pre-action link check's margin.
        Vec2 along = unit_toward(*a.current_action);
        double coast = cfg.tau * std::max(0.0, a.velocity.dot(along));
        if ((a.position - a.action_start).norm() + coast >= a.action_length) {
          a.mode = AgentMode::Adjusting2;
          a.mode_deadline = t + cfg.dt + cfg.t_adj2;
          a.current_action.reset();
          a.command = {};
        }
      }
    }
  }

  return report;
}

}  // namespace swarmform
