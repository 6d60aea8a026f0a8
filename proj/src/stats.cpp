#include "swarmform/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarmform {

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p out of range");
  std::sort(values.begin(), values.end());
  double idx = p * static_cast<double>(values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(idx);
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = idx - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double mann_whitney_less(const std::vector<double>& a,
                         const std::vector<double>& b) {
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  if (n1 == 0 || n2 == 0) {
    throw std::invalid_argument("mann_whitney_less: empty sample");
  }

  struct Obs {
    double value;
    bool from_a;
  };
  std::vector<Obs> all;
  all.reserve(n1 + n2);
  for (double v : a) all.push_back({v, true});
  for (double v : b) all.push_back({v, false});
  std::sort(all.begin(), all.end(),
            [](const Obs& x, const Obs& y) { return x.value < y.value; });

  // Average ranks within tie groups; accumulate the tie correction term.
  const double total = static_cast<double>(n1 + n2);
  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].value == all[i].value) ++j;
    double t = static_cast<double>(j - i);
    double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      if (all[k].from_a) rank_sum_a += avg_rank;
    }
    tie_term += t * t * t - t;
    i = j;
  }

  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  double u = rank_sum_a - dn1 * (dn1 + 1.0) / 2.0;
  double mu = dn1 * dn2 / 2.0;
  double var = dn1 * dn2 / 12.0 *
               ((total + 1.0) - tie_term / (total * (total - 1.0)));
  if (var <= 0.0) {
    // Every observation tied: no evidence either way.
    return 0.5;
  }
  double z = (u - mu + 0.5) / std::sqrt(var);
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

}  // namespace swarmform
