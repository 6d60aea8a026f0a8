#pragma once

// Minimal self-contained SVG emitters for run summaries: a grouped histogram
// for step-count distributions and a trajectory plot for continuum runs.

#include <string>
#include <utility>
#include <vector>

#include "swarmform/continuum_sim.hpp"

namespace swarmform {

// Grouped histogram: one colored series per (label, sample) pair, shared bins.
std::string svg_histogram(
    const std::vector<std::pair<std::string, std::vector<double>>>& series,
    const std::string& title, const std::string& x_label);

// One polyline per agent plus a dot at the final position.
std::string svg_trajectories(const std::vector<TrajectorySample>& samples,
                             const std::string& title);

}  // namespace swarmform
