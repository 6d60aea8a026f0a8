#include "swarmform/uniqueness.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

namespace swarmform {

namespace {

// Bits of the diametrically opposed directions: rotate the mask half way.
constexpr std::uint8_t rotate4(std::uint8_t bits) {
  return std::uint8_t((bits << 4) | (bits >> 4));
}

std::uint64_t cell_key(Cell c) {
  return (std::uint64_t(std::uint32_t(c.x)) << 32) | std::uint32_t(c.y);
}

// One agent placed during the spatial search.
struct Placement {
  Cell cell;
  int type;
};

class PlacementSearch {
 public:
  PlacementSearch(const MatchMatrices& mm, std::vector<int> counts_left, int n,
                  std::uint64_t* budget, SearchStats& stats)
      : mm_(mm), counts_left_(std::move(counts_left)), n_(n), budget_(budget),
        stats_(stats) {}

  std::set<Pattern> run(int root_type) {
    place({0, 0}, root_type);
    dfs();
    unplace();
    return std::move(found_);
  }

 private:
  void dfs() {
    if (pending_.empty()) {
      if (static_cast<int>(placed_.size()) == n_) record();
      return;  // claims closed but instances remain: unreachable remainder
    }
    if (static_cast<int>(placed_.size()) == n_) return;  // loose ends
    const Cell w = *pending_.begin();
    // Copy: place() grows placed_ and would invalidate a reference.
    const Placement claimer = placed_[claimed_.at(w)];
    const Direction u = *direction_between(claimer.cell, w);
    for (int t = 0; t < static_cast<int>(mm_.states.size()); ++t) {
      if (counts_left_[t] == 0) continue;
      if (!mm_.d[claimer.type][t].test(u)) {
        ++stats_.edge_rejected;
        continue;
      }
      if (place(w, t)) {
        dfs();
        unplace();
      }
    }
  }

  bool place(Cell cell, int t) {
    if (budget_ != nullptr) {
      if (*budget_ == 0) throw BudgetExceeded("placement budget exhausted");
      --*budget_;
    }
    ++stats_.nodes_expanded;
    for (const Placement& p : placed_) {
      if (chebyshev(cell, p.cell) > 2) continue;
      if (!views_consistent(mm_.states[p.type], mm_.states[t], cell - p.cell)) {
        ++stats_.spatial_conflicts;
        return false;
      }
    }
    const int idx = static_cast<int>(placed_.size());
    placed_.push_back({cell, t});
    --counts_left_[t];
    occupied_.insert(cell_key(cell));
    pending_.erase(cell);
    for (Direction d : mm_.states[t].directions().list()) {
      const Cell w = cell + offset_of(d);
      if (occupied_.count(cell_key(w)) || claimed_.count(w)) continue;
      claimed_[w] = idx;
      pending_.insert(w);
    }
    return true;
  }

  void unplace() {
    const Placement p = placed_.back();
    placed_.pop_back();
    const int idx = static_cast<int>(placed_.size());
    ++counts_left_[p.type];
    occupied_.erase(cell_key(p.cell));
    for (Direction d : mm_.states[p.type].directions().list()) {
      const Cell w = p.cell + offset_of(d);
      auto it = claimed_.find(w);
      if (it != claimed_.end() && it->second == idx) {
        claimed_.erase(it);
        pending_.erase(w);
      }
    }
    // The vacated cell stays demanded by whichever earlier agent claimed it.
    if (claimed_.count(p.cell)) pending_.insert(p.cell);
  }

  void record() {
    std::vector<Cell> cells;
    cells.reserve(placed_.size());
    for (const Placement& p : placed_) cells.push_back(p.cell);
    Pattern pat = Pattern::from_cells(std::move(cells)).canonical();
    if (!found_.insert(std::move(pat)).second) ++stats_.compression_duplicates;
  }

  const MatchMatrices& mm_;
  std::vector<int> counts_left_;
  const int n_;
  std::uint64_t* budget_;
  SearchStats& stats_;

  std::vector<Placement> placed_;
  std::unordered_set<std::uint64_t> occupied_;
  std::map<Cell, int> claimed_;  // demanded-occupied cell -> first claimant
  std::set<Cell> pending_;       // demanded cells not yet holding an agent
  std::set<Pattern> found_;
};

}  // namespace

SearchStats& SearchStats::operator+=(const SearchStats& other) {
  combinations_total += other.combinations_total;
  completeness_rejected += other.completeness_rejected;
  matching_rejected += other.matching_rejected;
  degree_rejected += other.degree_rejected;
  connectivity_rejected += other.connectivity_rejected;
  searched += other.searched;
  nodes_expanded += other.nodes_expanded;
  edge_rejected += other.edge_rejected;
  spatial_conflicts += other.spatial_conflicts;
  compression_duplicates += other.compression_duplicates;
  return *this;
}

int MatchMatrices::index_of(LocalState s) const {
  const auto it = std::lower_bound(states.begin(), states.end(), s);
  if (it == states.end() || *it != s) return -1;
  return static_cast<int>(it - states.begin());
}

bool MatchMatrices::zero_row(int i) const {
  for (int v : m[i]) {
    if (v != 0) return false;
  }
  return true;
}

MatchMatrices build_matrices(const std::vector<LocalState>& s_static) {
  MatchMatrices mm;
  mm.states = s_static;
  std::sort(mm.states.begin(), mm.states.end());
  mm.states.erase(std::unique(mm.states.begin(), mm.states.end()), mm.states.end());
  const int k = static_cast<int>(mm.states.size());
  mm.m.assign(k, std::vector<int>(k, 0));
  mm.d.assign(k, std::vector<DirectionSet>(k));
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      for (int u = 0; u < kDirectionCount; ++u) {
        const Direction du = direction_from_index(u);
        if (states_match(mm.states[i], mm.states[j], du)) {
          mm.d[i][j].add(du);
          ++mm.m[i][j];
        }
      }
    }
  }
  return mm;
}

std::uint64_t count_combinations(int n_s, int n) {
  if (n_s < 1 || n < 1) throw std::invalid_argument("need n_s >= 1 and n >= 1");
  // C(n_s + n - 1, n), multiplied incrementally so every prefix stays exact.
  unsigned __int128 r = 1;
  for (int k = 1; k <= n; ++k) {
    r = r * static_cast<unsigned>(n_s - 1 + k) / static_cast<unsigned>(k);
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      throw std::overflow_error("combination count exceeds 64 bits");
    }
  }
  return static_cast<std::uint64_t>(r);
}

bool completeness_test(const Combination& c) {
  std::array<int, 8> counts{};
  std::uint8_t lacks = 0;      // directions some state does not demand
  std::uint8_t one_sided = 0;  // directions some state demands without the opposite
  for (const LocalState& s : c) {
    for (int u = 0; u < kDirectionCount; ++u) {
      if ((s.bits >> u) & 1) ++counts[u];
    }
    lacks |= std::uint8_t(~s.bits);
    one_sided |= std::uint8_t(s.bits & ~rotate4(s.bits));
  }
  for (int u = 0; u < 4; ++u) {
    if (counts[u] != counts[u + 4]) return false;  // links cannot pair up
  }
  if (lacks != 0xFF) return false;  // some direction demanded by every state
  for (int u = 0; u < kDirectionCount; ++u) {
    if (counts[u] > 0 && !((one_sided >> u) & 1)) return false;
  }
  return true;
}

bool matching_test(const Combination& c, const MatchMatrices& mm) {
  const int n = static_cast<int>(c.size());
  std::vector<int> type(n);
  for (int i = 0; i < n; ++i) {
    type[i] = mm.index_of(c[i]);
    if (type[i] < 0) throw std::invalid_argument("state missing from the matrices");
  }
  for (int u = 0; u < 4; ++u) {
    const Direction du = direction_from_index(u);
    std::vector<int> left, right;
    for (int i = 0; i < n; ++i) {
      if (c[i].test(du)) left.push_back(i);
      if (c[i].test(opposite(du))) right.push_back(i);
    }
    if (left.size() != right.size()) return false;
    if (left.empty()) continue;
    // Kuhn's augmenting paths; instance counts never exceed the swarm size.
    std::vector<int> match_right(right.size(), -1);
    auto edge = [&](int l, int r) {
      return left[l] != right[r] && mm.d[type[left[l]]][type[right[r]]].test(du);
    };
    std::function<bool(int, std::vector<char>&)> augment =
        [&](int l, std::vector<char>& seen) {
          for (int r = 0; r < static_cast<int>(right.size()); ++r) {
            if (!edge(l, r) || seen[r]) continue;
            seen[r] = 1;
            if (match_right[r] < 0 || augment(match_right[r], seen)) {
              match_right[r] = l;
              return true;
            }
          }
          return false;
        };
    for (int l = 0; l < static_cast<int>(left.size()); ++l) {
      std::vector<char> seen(right.size(), 0);
      if (!augment(l, seen)) return false;
    }
  }
  return true;
}

std::vector<Pattern> search_patterns(const Combination& c, const MatchMatrices& mm,
                                     std::uint64_t* node_budget, SearchStats* stats) {
  SearchStats local;
  SearchStats& st = stats != nullptr ? *stats : local;
  const int n = static_cast<int>(c.size());
  if (n == 0) throw std::invalid_argument("empty combination");

  std::vector<int> counts(mm.states.size(), 0);
  for (const LocalState& s : c) {
    const int t = mm.index_of(s);
    if (t < 0) throw std::invalid_argument("state missing from the matrices");
    ++counts[t];
  }

  std::vector<int> present;
  for (int t = 0; t < static_cast<int>(counts.size()); ++t) {
    if (counts[t] > 0) present.push_back(t);
  }
  for (int t : present) {
    if (mm.states[t].neighbor_count() > n - 1) {
      ++st.degree_rejected;
      return {};
    }
  }
  // The pattern's adjacency collapses onto the type compatibility graph, so a
  // disconnected graph (or a lone type that cannot neighbor itself) is fatal.
  {
    std::set<int> seen{present.front()};
    std::vector<int> stack{present.front()};
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      for (int o : present) {
        if (!seen.count(o) && mm.m[t][o] > 0) {
          seen.insert(o);
          stack.push_back(o);
        }
      }
    }
    const bool lone_unpairable =
        present.size() == 1 && n > 1 && mm.m[present.front()][present.front()] == 0;
    if (seen.size() != present.size() || lone_unpairable) {
      ++st.connectivity_rejected;
      return {};
    }
  }

  PlacementSearch search(mm, counts, n, node_budget, st);
  std::set<Pattern> found = search.run(present.front());
  return {found.begin(), found.end()};
}

const char* outcome_name(OutcomeTag tag) {
  switch (tag) {
    case OutcomeTag::NoPattern: return "no-pattern";
    case OutcomeTag::OnlyUndesired: return "only-undesired";
    case OutcomeTag::DesiredPossibleNotUnique: return "desired-not-unique";
    case OutcomeTag::DesiredUnique: return "desired-unique";
  }
  return "?";
}

Outcome check_uniqueness(const StateSets& sets, int n, const Pattern& p_des,
                         const UniquenessOptions& opts) {
  if (p_des.size() != n) {
    throw std::invalid_argument("desired pattern size differs from swarm size");
  }
  const Pattern target = p_des.canonical();

  Outcome out;
  // States that can never have a consistent neighbor cannot occur in any
  // pattern, so they are dropped from the alphabet up front.
  std::vector<LocalState> alphabet;
  {
    const MatchMatrices full = build_matrices(sets.statics().list());
    for (int i = 0; i < static_cast<int>(full.states.size()); ++i) {
      if (!full.zero_row(i)) alphabet.push_back(full.states[i]);
    }
  }
  if (alphabet.empty()) {
    out.tag = OutcomeTag::NoPattern;
    return out;
  }
  const MatchMatrices mm = build_matrices(alphabet);
  const int n_s = static_cast<int>(alphabet.size());

  SearchStats& stats = out.stats;
  stats.combinations_total = count_combinations(n_s, n);
  if (stats.combinations_total > opts.combination_limit) {
    throw BudgetExceeded("combination count above the configured limit");
  }

  std::uint64_t budget = opts.node_limit;
  std::set<Pattern> results;
  std::vector<LocalState> chosen;
  chosen.reserve(n);
  bool stop = false;

  // Enumerates multisets by deciding, type by type, how many instances to
  // take. Per-direction link sums, the lacks mask and the one-sided mask are
  // carried incrementally; a pair of directions whose sums differ by more
  // than the remaining slots can never rebalance, and the whole remaining
  // subtree is charged to the completeness filter by closed-form count.
  std::function<void(int, int, std::array<int, 8>, std::uint8_t, std::uint8_t)> rec =
      [&](int idx, int slots, std::array<int, 8> counts, std::uint8_t lacks,
          std::uint8_t one_sided) {
        if (stop) return;
        if (slots == 0) {
          bool ok = lacks == 0xFF;
          for (int u = 0; ok && u < 4; ++u) ok = counts[u] == counts[u + 4];
          for (int u = 0; ok && u < kDirectionCount; ++u) {
            if (counts[u] > 0 && !((one_sided >> u) & 1)) ok = false;
          }
          if (!ok) {
            ++stats.completeness_rejected;
            return;
          }
          if (!matching_test(chosen, mm)) {
            ++stats.matching_rejected;
            return;
          }
          ++stats.searched;
          for (Pattern& p : search_patterns(chosen, mm, &budget, &stats)) {
            if (opts.early_exit && !(p == target)) stop = true;
            results.insert(std::move(p));
          }
          return;
        }
        if (idx == n_s) return;
        for (int u = 0; u < 4; ++u) {
          if (std::abs(counts[u] - counts[u + 4]) > slots) {
            stats.completeness_rejected += count_combinations(n_s - idx, slots);
            return;
          }
        }
        for (int i = idx; i < n_s && !stop; ++i) {
          const LocalState s = alphabet[i];
          std::array<int, 8> cnt = counts;
          std::uint8_t lk = lacks;
          std::uint8_t os = one_sided;
          int pushed = 0;
          for (int k = 1; k <= slots && !stop; ++k) {
            chosen.push_back(s);
            ++pushed;
            for (int u = 0; u < kDirectionCount; ++u) {
              if ((s.bits >> u) & 1) ++cnt[u];
            }
            lk |= std::uint8_t(~s.bits);
            os |= std::uint8_t(s.bits & ~rotate4(s.bits));
            rec(i + 1, slots - k, cnt, lk, os);
          }
          chosen.resize(chosen.size() - pushed);
        }
      };

  rec(0, n, {}, 0, 0);

  out.patterns_found.assign(results.begin(), results.end());
  const bool desired_found = results.count(target) > 0;
  if (stop) {
    bool desired_realizable = true;
    for (const Cell& c : target.cells()) {
      if (!sets.statics().contains(state_of(target, c))) desired_realizable = false;
    }
    out.tag = desired_realizable ? OutcomeTag::DesiredPossibleNotUnique
                                 : OutcomeTag::OnlyUndesired;
  } else if (out.patterns_found.empty()) {
    out.tag = OutcomeTag::NoPattern;
  } else if (!desired_found) {
    out.tag = OutcomeTag::OnlyUndesired;
  } else if (out.patterns_found.size() == 1) {
    out.tag = OutcomeTag::DesiredUnique;
  } else {
    out.tag = OutcomeTag::DesiredPossibleNotUnique;
  }
  return out;
}

std::vector<Pattern> enumerate_connected_patterns(int n) {
  if (n < 1 || n > 8) {
    throw std::invalid_argument("pattern enumeration is bounded to 8 cells");
  }
  // Growth enumeration over the half-plane universe: the scan-order minimum
  // of every produced shape is the origin, so each shape appears exactly once
  // up to translation. Cells already offered for extension stay barred for
  // the rest of the branch, which is what prevents duplicates.
  const auto in_universe = [](Cell c) { return c.y > 0 || (c.y == 0 && c.x >= 0); };
  std::vector<Pattern> out;
  std::vector<Cell> animal;
  std::unordered_set<std::uint64_t> reached{cell_key({0, 0})};

  std::function<void(std::vector<Cell>)> extend = [&](std::vector<Cell> untried) {
    while (!untried.empty()) {
      const Cell c = untried.back();
      untried.pop_back();
      animal.push_back(c);
      if (static_cast<int>(animal.size()) == n) {
        out.push_back(Pattern::from_cells(animal).canonical());
      } else {
        std::vector<Cell> added;
        for (int i = 0; i < kDirectionCount; ++i) {
          const Cell nb = c + offset_of(direction_from_index(i));
          if (!in_universe(nb)) continue;
          if (reached.insert(cell_key(nb)).second) added.push_back(nb);
        }
        std::vector<Cell> next = untried;
        next.insert(next.end(), added.begin(), added.end());
        extend(std::move(next));
        for (const Cell& nb : added) reached.erase(cell_key(nb));
      }
      animal.pop_back();
    }
  };
  extend({{0, 0}});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Pattern> oracle_all_static_patterns(const StateSets& sets, int n) {
  std::vector<Pattern> out;
  for (const Pattern& p : enumerate_connected_patterns(n)) {
    bool all_static = true;
    for (const Cell& c : p.cells()) {
      if (!sets.statics().contains(state_of(p, c))) {
        all_static = false;
        break;
      }
    }
    if (all_static) out.push_back(p);
  }
  return out;
}

}  // namespace swarmform
