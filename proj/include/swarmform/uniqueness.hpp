#pragma once

// Decides whether a set of static local states can only assemble into the
// desired pattern: pairwise match matrices, multiset-combination filters, a
// backtracking placement search, and an independent brute-force oracle.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "swarmform/behavior.hpp"
#include "swarmform/lattice.hpp"

namespace swarmform {

// Pairwise compatibility of static states. m[i][j] counts the directions
// along which states[i] and states[j] can sit next to each other with fully
// consistent views; d[i][j] lists those directions. Both are symmetric in the
// sense that u in d[i][j] iff opposite(u) in d[j][i]. A state whose whole row
// is zero can never have any neighbor and thus never occurs in a pattern.
struct MatchMatrices {
  std::vector<LocalState> states;            // the alphabet, sorted
  std::vector<std::vector<int>> m;           // match counts
  std::vector<std::vector<DirectionSet>> d;  // match directions

  int index_of(LocalState s) const;  // -1 when s is not in the alphabet
  bool zero_row(int i) const;
};

MatchMatrices build_matrices(const std::vector<LocalState>& s_static);

// Number of size-n multisets over an alphabet of n_s states. Throws
// std::overflow_error instead of wrapping.
std::uint64_t count_combinations(int n_s, int n);

// A multiset of static states, one entry per agent.
using Combination = std::vector<LocalState>;

// Necessary conditions on the per-direction link counts of a combination:
// links must pair up (count at u equals count at opposite(u)), every
// direction must be absent from at least one state (else columns of agents
// would extend forever), and every used direction needs a state featuring it
// without its opposite (else rows could not terminate).
bool completeness_test(const Combination& c);

// Necessary condition on link supply: for every direction, the instances
// demanding a link must be perfectly matchable to distinct instances
// supplying the opposite link, honoring pairwise compatibility. Subsumes the
// instance-counting argument; never rejects a realizable combination.
bool matching_test(const Combination& c, const MatchMatrices& mm);

// Counters for the pruning rules of the pipeline.
struct SearchStats {
  std::uint64_t combinations_total = 0;
  std::uint64_t completeness_rejected = 0;
  std::uint64_t matching_rejected = 0;
  std::uint64_t degree_rejected = 0;        // state needs more neighbors than exist
  std::uint64_t connectivity_rejected = 0;  // compatibility graph disconnected
  std::uint64_t searched = 0;               // combinations reaching placement
  std::uint64_t nodes_expanded = 0;         // placement attempts
  std::uint64_t edge_rejected = 0;          // no match along the required link
  std::uint64_t spatial_conflicts = 0;      // contradictory overlapping views
  std::uint64_t compression_duplicates = 0; // canonical duplicates dropped

  SearchStats& operator+=(const SearchStats& other);
};

// Raised when a configured work limit is hit; callers report the analysis as
// inconclusive rather than trusting a truncated search.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every canonical pattern in which the combination's instances can be placed
// so that each agent's full local state equals its assigned state. Consumes
// from *node_budget per placement attempt and throws BudgetExceeded at zero.
std::vector<Pattern> search_patterns(const Combination& c, const MatchMatrices& mm,
                                     std::uint64_t* node_budget,
                                     SearchStats* stats = nullptr);

enum class OutcomeTag {
  NoPattern,                 // the states cannot form any pattern at all
  OnlyUndesired,             // patterns exist, the desired one is not among them
  DesiredPossibleNotUnique,  // desired pattern plus at least one other
  DesiredUnique,             // the desired pattern is the only possibility
};

const char* outcome_name(OutcomeTag tag);

struct Outcome {
  OutcomeTag tag = OutcomeTag::NoPattern;
  std::vector<Pattern> patterns_found;  // canonical, sorted
  SearchStats stats;
};

struct UniquenessOptions {
  std::uint64_t node_limit = 100'000'000;         // placement attempts
  std::uint64_t combination_limit = 200'000'000;  // enumerated multisets
  // Stop at the first pattern other than p_des; patterns_found is then
  // partial but the tag is still correct (p_des itself is realizable exactly
  // when its own states are all static).
  bool early_exit = false;
};

// Enumerates all size-n multisets over the static states (desired plus
// blocked), filters them, and searches the survivors for placements. Throws
// BudgetExceeded when a limit is hit and std::invalid_argument when
// |p_des| != n.
Outcome check_uniqueness(const StateSets& sets, int n, const Pattern& p_des,
                         const UniquenessOptions& opts = {});

// All connected n-cell patterns up to translation, enumerated exhaustively.
// Guarded to n <= 8 (the count grows near eightfold per added cell).
std::vector<Pattern> enumerate_connected_patterns(int n);

// Ground truth for check_uniqueness at small n: every connected n-cell
// pattern in which each agent's state is static.
std::vector<Pattern> oracle_all_static_patterns(const StateSets& sets, int n);

}  // namespace swarmform
