#pragma once

// Small sample-statistics helpers for run summaries and result comparisons.

#include <vector>

namespace swarmform {

// Median of a sample (average of the middle two for even sizes).
// Throws std::invalid_argument on empty input.
double median(std::vector<double> values);

// p-th sample quantile (0 <= p <= 1) with linear interpolation.
double quantile(std::vector<double> values, double p);

// One-sided Mann-Whitney U test p-value for the alternative "a tends to be
// smaller than b", using the normal approximation with tie correction and
// continuity correction. Suitable for sample sizes of a few dozen and up.
double mann_whitney_less(const std::vector<double>& a,
                         const std::vector<double>& b);

}  // namespace swarmform
