#include "swarmform/transition_graphs.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace swarmform {

namespace {

constexpr std::uint8_t kOrthogonalMask = 0b01010101;  // N, E, S, W

bool cross_rule_allows(const BehaviorBundle& bundle, LocalState observer_after) {
  if (!bundle.config.cross_rule) return true;
  if (!observer_after.valid()) return true;
  if (observer_after.bits & kOrthogonalMask) return true;
  return bundle.config.cross_rule_exception &&
         observer_after == *bundle.config.cross_rule_exception;
}

TransitionGraph build_t2_impl(const BehaviorBundle& bundle, bool in_view_only) {
  TransitionGraph g;
  g.variant = in_view_only ? GraphVariant::T2r : GraphVariant::T2;
  for (int b = 1; b < 256; ++b) {
    const LocalState s{std::uint8_t(b)};
    std::set<std::uint8_t> targets;
    for (int i = 0; i < kDirectionCount; ++i) {
      const Direction di = direction_from_index(i);
      if (!s.test(di)) continue;
      const Cell p = offset_of(di);
      for (int j = 0; j < kDirectionCount; ++j) {
        const Cell dest = p + offset_of(direction_from_index(j));
        if (dest == Cell{0, 0}) continue;  // cannot step onto the observer
        LocalState to = s.without(di);
        if (const auto dir = direction_between({0, 0}, dest)) {
          // Destination visible: it must be empty in the observer's view.
          if (s.test(*dir)) continue;
          to = to.with(*dir);
        } else if (!in_view_only) {
          // Neighbor leaves the footprint; a lone neighbor cannot vanish
          // without disconnecting, so the null result is discarded.
          if (!to.valid()) continue;
        } else {
          continue;
        }
        // The observer's own post-move state is fully known, so a cross-rule
        // violation on the observer itself is provable from its view.
        if (!cross_rule_allows(bundle, to)) continue;
        targets.insert(to.bits);
      }
    }
    for (std::uint8_t t : targets) g.adj[b].push_back({LocalState(t), std::nullopt});
  }
  return g;
}

// Reverse-BFS set of states that can reach `target` in the union of t1 and t2.
std::bitset<256> reaches_target(const TransitionGraph& t1, const TransitionGraph& t2,
                                LocalState target) {
  std::array<std::vector<std::uint8_t>, 256> reverse;
  for (const TransitionGraph* g : {&t1, &t2}) {
    for (int b = 1; b < 256; ++b) {
      for (const Transition& e : g->adj[b]) {
        reverse[e.to.bits].push_back(std::uint8_t(b));
      }
    }
  }
  std::bitset<256> seen;
  std::deque<std::uint8_t> queue{target.bits};
  seen.set(target.bits);
  while (!queue.empty()) {
    const std::uint8_t cur = queue.front();
    queue.pop_front();
    for (std::uint8_t from : reverse[cur]) {
      if (!seen.test(from)) {
        seen.set(from);
        queue.push_back(from);
      }
    }
  }
  return seen;
}

// DFS assignment of desired simplicial states to the cells of one clique,
// consistent with the blocked state at the origin and with each other.
bool assign_clique(const std::vector<Cell>& cells, std::size_t at, LocalState blocked,
                   const std::vector<LocalState>& candidates,
                   std::vector<LocalState>& chosen) {
  if (at == cells.size()) return true;
  const Cell c = cells[at];
  for (const LocalState& t : candidates) {
    if (!views_consistent(blocked, t, c)) continue;
    bool ok = true;
    for (std::size_t k = 0; k < at && ok; ++k) {
      ok = views_consistent(chosen[k], t, c - cells[k]);
    }
    if (!ok) continue;
    chosen[at] = t;
    if (assign_clique(cells, at + 1, blocked, candidates, chosen)) return true;
  }
  return false;
}

}  // namespace

std::uint64_t TransitionGraph::edge_count() const {
  std::uint64_t n = 0;
  for (const auto& v : adj) n += v.size();
  return n;
}

TransitionGraph build_t1(const BehaviorBundle& bundle) {
  TransitionGraph g;
  g.variant = GraphVariant::T1;
  for (int b = 1; b < 256; ++b) {
    const LocalState s{std::uint8_t(b)};
    const DirectionSet acts = bundle.q.actions(s);
    for (Direction d : acts.list()) {
      const Cell m = offset_of(d);
      LocalState det;
      std::vector<int> unknown;  // new-frame direction indices out of old view
      for (int k = 0; k < kDirectionCount; ++k) {
        const Direction dk = direction_from_index(k);
        const Cell w = m + offset_of(dk);
        if (w == Cell{0, 0}) continue;  // vacated origin, now empty
        if (const auto old_dir = direction_between({0, 0}, w)) {
          if (s.test(*old_dir)) det = det.with(dk);
        } else {
          unknown.push_back(k);
        }
      }
      const int n = static_cast<int>(unknown.size());
      for (int sub = 0; sub < (1 << n); ++sub) {
        LocalState to = det;
        for (int t = 0; t < n; ++t) {
          if ((sub >> t) & 1) to = to.with(direction_from_index(unknown[t]));
        }
        if (!to.valid()) continue;
        g.adj[b].push_back({to, d});
      }
    }
  }
  return g;
}

TransitionGraph build_t2(const BehaviorBundle& bundle) {
  return build_t2_impl(bundle, false);
}

TransitionGraph build_t2r(const BehaviorBundle& bundle) {
  return build_t2_impl(bundle, true);
}

TransitionGraph build_t3() {
  TransitionGraph g;
  g.variant = GraphVariant::T3;
  for (int b = 1; b < 256; ++b) {
    const LocalState s{std::uint8_t(b)};
    for (int i = 0; i < kDirectionCount; ++i) {
      const Direction d = direction_from_index(i);
      if (!s.test(d)) g.adj[b].push_back({s.with(d), std::nullopt});
    }
  }
  return g;
}

std::pair<bool, std::vector<LocalState>> check_achievable(
    const TransitionGraph& t1, const TransitionGraph& t2, const StateSets& sets) {
  std::bitset<256> ok_all;
  ok_all.set();
  for (const LocalState& target : sets.des.list()) {
    ok_all &= reaches_target(t1, t2, target);
  }
  std::vector<LocalState> missing;
  for (int b = 1; b < 256; ++b) {
    if (!ok_all.test(b)) missing.push_back(LocalState(std::uint8_t(b)));
  }
  return {missing.empty(), missing};
}

void check_lemma3(const StateSets& sets, const TransitionGraph& t2r,
                  ConditionReport& report) {
  const std::vector<LocalState> candidates = (sets.des & sets.simplicial).list();
  report.clique_witnesses.clear();
  for (const LocalState& s : sets.blocked.list()) {
    for (const DirectionSet& clique : cliques(s)) {
      std::vector<Cell> cells;
      for (Direction d : clique.list()) cells.push_back(offset_of(d));
      std::vector<LocalState> chosen(cells.size());
      if (assign_clique(cells, 0, s, candidates, chosen)) {
        report.clique_witnesses.push_back({s, cells, chosen});
      }
    }
  }
  report.lemma3_clique_ok = report.clique_witnesses.empty();

  report.loop_witnesses.clear();
  for (const LocalState& s : sets.statics().list()) {
    if (s.neighbor_count() != 2) continue;
    bool reactivates = false;
    for (const Transition& e : t2r.successors(s)) {
      if (sets.is_active(e.to)) {
        reactivates = true;
        break;
      }
    }
    if (!reactivates) report.loop_witnesses.push_back(s);
  }
  report.lemma3_loop_ok = report.loop_witnesses.empty();
}

std::vector<Cell> explore_walk(const BehaviorBundle& bundle, LocalState s,
                               bool lenient) {
  const std::vector<Cell> nb = s.neighbor_cells();
  auto in_nb = [&nb](Cell c) {
    return std::find(nb.begin(), nb.end(), c) != nb.end();
  };
  auto state_at = [&](Cell p) {
    LocalState st;
    for (int i = 0; i < kDirectionCount; ++i) {
      const Direction d = direction_from_index(i);
      if (in_nb(p + offset_of(d))) st = st.with(d);
    }
    return st;
  };
  auto traversable = [&](LocalState st) {
    if (bundle.sets.is_active(st)) return true;
    return lenient && bundle.sets.des.contains(st);
  };
  auto actions_of = [&](LocalState st) {
    DirectionSet acts = safe_actions(st);
    if (bundle.config.cross_rule) {
      acts = cross_rule_filter(st, acts, bundle.config.cross_rule_exception);
    }
    return acts;
  };

  std::set<Cell> visited{{0, 0}};
  std::deque<Cell> queue{{0, 0}};
  while (!queue.empty()) {
    const Cell p = queue.front();
    queue.pop_front();
    const LocalState st = state_at(p);
    if (!traversable(st)) continue;  // terminal position, still counted visited
    for (Direction d : actions_of(st).list()) {
      const Cell t = p + offset_of(d);
      if (visited.insert(t).second) queue.push_back(t);
    }
  }
  return {visited.begin(), visited.end()};
}

void check_theorem(const BehaviorBundle& bundle, const TransitionGraph& t3,
                   const CheckOptions& opts, ConditionReport& report) {
  const StateSets& sets = bundle.sets;

  report.explore_witnesses.clear();
  for (const LocalState& s : (sets.active() & sets.simplicial).list()) {
    const std::vector<Cell> nb = s.neighbor_cells();
    std::set<Cell> goals;
    for (const Cell& q : nb) {
      for (int i = 0; i < kDirectionCount; ++i) {
        const Cell w = q + offset_of(direction_from_index(i));
        if (std::find(nb.begin(), nb.end(), w) == nb.end()) goals.insert(w);
      }
    }
    const std::vector<Cell> visited = explore_walk(bundle, s, opts.lenient_explore);
    const bool all = std::all_of(goals.begin(), goals.end(), [&](const Cell& g) {
      return std::binary_search(visited.begin(), visited.end(), g);
    });
    if (!all) report.explore_witnesses.push_back(s);
  }
  report.thm_explore_ok = report.explore_witnesses.empty();

  report.arrival_witnesses.clear();
  for (const LocalState& s : sets.statics().list()) {
    bool any_active = false;
    bool all_ok = true;
    std::vector<std::pair<LocalState, Direction>> bad;
    for (const Transition& e : t3.successors(s)) {
      if (e.to.neighbor_count() == kDirectionCount) continue;  // surrounded
      if (sets.is_active(e.to)) {
        any_active = true;
      } else {
        all_ok = false;
        const auto d = direction_between(
            {0, 0}, LocalState(std::uint8_t(e.to.bits & ~s.bits)).neighbor_cells().front());
        bad.emplace_back(s, d.value_or(Direction::N));
      }
    }
    const bool has_checkable = !t3.successors(s).empty() &&
                               s.neighbor_count() < kDirectionCount - 1;
    const bool pass = opts.lenient_arrival ? (!has_checkable || any_active) : all_ok;
    if (!pass) {
      report.arrival_witnesses.insert(report.arrival_witnesses.end(), bad.begin(),
                                      bad.end());
      if (bad.empty()) report.arrival_witnesses.emplace_back(s, Direction::N);
    }
  }
  report.thm_arrival_ok = report.arrival_witnesses.empty();
}

ConditionReport run_condition_checks(const BehaviorBundle& bundle,
                                     const CheckOptions& opts) {
  const TransitionGraph t1 = build_t1(bundle);
  const TransitionGraph t2 = build_t2(bundle);
  const TransitionGraph t2r = build_t2r(bundle);
  const TransitionGraph t3 = build_t3();

  ConditionReport report;
  auto [ok, missing] = check_achievable(t1, t2, bundle.sets);
  report.achievable = ok;
  report.unreachable_witnesses = std::move(missing);
  check_lemma3(bundle.sets, t2r, report);
  check_theorem(bundle, t3, opts, report);
  return report;
}

}  // namespace swarmform
