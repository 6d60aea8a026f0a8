#pragma once

// File formats: JSON for structured artifacts, CSV for tabular results.
// All emitters produce byte-stable output for identical inputs.

#include <string>
#include <vector>

#include "swarmform/behavior.hpp"
#include "swarmform/continuum_sim.hpp"
#include "swarmform/grid_sim.hpp"
#include "swarmform/transition_graphs.hpp"
#include "swarmform/uniqueness.hpp"

namespace swarmform {

// Pattern files: {"name": ..., "cells": [[x, y], ...]}.
std::string pattern_to_json(const Pattern& pattern);
Pattern pattern_from_json_text(const std::string& text);
Pattern load_pattern_file(const std::string& path);

// Derived-behavior bundle: the desired/blocked/static/active tables plus the
// per-state safe actions of every active state.
std::string bundle_to_json(const BehaviorBundle& bundle);

// Convergence-condition checks, with witness summaries.
std::string condition_report_to_json(const ConditionReport& report);

// Uniqueness verdict with search statistics.
std::string uniqueness_to_json(const Outcome& outcome);

std::string grid_reports_csv(const std::vector<RunReport>& reports);
std::string continuum_reports_csv(const std::vector<ContinuumReport>& reports);
std::string trajectory_csv(const std::vector<TrajectorySample>& samples);

// Creates parent directories as needed; throws std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace swarmform
