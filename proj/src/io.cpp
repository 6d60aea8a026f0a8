#include "swarmform/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace swarmform {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

ordered_json pattern_json(const Pattern& pattern) {
  ordered_json j;
  j["name"] = pattern.name;
  ordered_json cells = ordered_json::array();
  for (const Cell& c : pattern.cells()) {
    cells.push_back(ordered_json::array({c.x, c.y}));
  }
  j["cells"] = cells;
  return j;
}

ordered_json state_list_json(const StateSet& set) {
  ordered_json arr = ordered_json::array();
  for (LocalState s : set.list()) arr.push_back(static_cast<int>(s.bits));
  return arr;
}

}  // namespace

std::string pattern_to_json(const Pattern& pattern) {
  return pattern_json(pattern).dump(2) + "\n";
}

Pattern pattern_from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("pattern file is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("cells") || !j["cells"].is_array()) {
    throw std::runtime_error("pattern file must be an object with a \"cells\" array");
  }
  std::vector<Cell> cells;
  for (const auto& entry : j["cells"]) {
    if (!entry.is_array() || entry.size() != 2 ||
        !entry[0].is_number_integer() || !entry[1].is_number_integer()) {
      throw std::runtime_error("pattern cells must be [x, y] integer pairs");
    }
    cells.push_back(Cell{entry[0].get<int>(), entry[1].get<int>()});
  }
  Pattern p = Pattern::from_cells(cells);
  if (j.contains("name") && j["name"].is_string()) {
    p.name = j["name"].get<std::string>();
  }
  return p;
}

Pattern load_pattern_file(const std::string& path) {
  return pattern_from_json_text(read_text_file(path));
}

std::string bundle_to_json(const BehaviorBundle& bundle) {
  ordered_json j;
  j["pattern"] = pattern_json(bundle.p_des);

  ordered_json b;
  b["name"] = bundle.config.name;
  b["no_repeat"] = bundle.config.no_repeat;
  if (bundle.config.blocked_neighbor_threshold) {
    b["blocked_neighbor_threshold"] = *bundle.config.blocked_neighbor_threshold;
  } else {
    b["blocked_neighbor_threshold"] = nullptr;
  }
  b["cross_rule"] = bundle.config.cross_rule;
  if (bundle.config.cross_rule_exception) {
    b["cross_rule_exception"] = static_cast<int>(bundle.config.cross_rule_exception->bits);
  } else {
    b["cross_rule_exception"] = nullptr;
  }
  j["behavior"] = b;

  StateSet statics = bundle.sets.statics();
  StateSet active = bundle.sets.active();
  ordered_json counts;
  counts["desired"] = bundle.sets.des.count();
  counts["blocked"] = bundle.sets.blocked.count();
  counts["static"] = statics.count();
  counts["active"] = active.count();
  counts["simplicial"] = bundle.sets.simplicial.count();
  j["counts"] = counts;

  j["desired_states"] = state_list_json(bundle.sets.des);
  j["blocked_states"] = state_list_json(bundle.sets.blocked);
  j["simplicial_states"] = state_list_json(bundle.sets.simplicial);

  ordered_json q = ordered_json::object();
  for (LocalState s : active.list()) {
    ordered_json dirs = ordered_json::array();
    for (Direction d : bundle.q.actions(s).list()) dirs.push_back(direction_name(d));
    q[std::to_string(static_cast<int>(s.bits))] = dirs;
  }
  j["safe_actions"] = q;
  return j.dump(2) + "\n";
}

std::string condition_report_to_json(const ConditionReport& report) {
  ordered_json j;
  j["achievable"] = report.achievable;
  j["clique_ok"] = report.lemma3_clique_ok;
  j["loop_ok"] = report.lemma3_loop_ok;
  j["explore_ok"] = report.thm_explore_ok;
  j["arrival_ok"] = report.thm_arrival_ok;
  j["all_ok"] = report.all_ok();

  ordered_json w;
  ordered_json unreachable = ordered_json::array();
  for (LocalState s : report.unreachable_witnesses) {
    unreachable.push_back(static_cast<int>(s.bits));
  }
  w["unreachable_states"] = unreachable;

  ordered_json cliques = ordered_json::array();
  for (const CliqueWitness& cw : report.clique_witnesses) {
    ordered_json entry;
    entry["blocked_state"] = static_cast<int>(cw.blocked_state.bits);
    ordered_json cells = ordered_json::array();
    for (const Cell& c : cw.clique_cells) cells.push_back(ordered_json::array({c.x, c.y}));
    entry["clique_cells"] = cells;
    ordered_json assigned = ordered_json::array();
    for (LocalState s : cw.assigned) assigned.push_back(static_cast<int>(s.bits));
    entry["assigned_states"] = assigned;
    cliques.push_back(entry);
  }
  w["cliques"] = cliques;

  ordered_json loops = ordered_json::array();
  for (LocalState s : report.loop_witnesses) loops.push_back(static_cast<int>(s.bits));
  w["loop_states"] = loops;

  ordered_json explore = ordered_json::array();
  for (LocalState s : report.explore_witnesses) explore.push_back(static_cast<int>(s.bits));
  w["explore_states"] = explore;

  ordered_json arrivals = ordered_json::array();
  for (const auto& [state, dir] : report.arrival_witnesses) {
    ordered_json entry;
    entry["state"] = static_cast<int>(state.bits);
    entry["arrival"] = direction_name(dir);
    arrivals.push_back(entry);
  }
  w["arrivals"] = arrivals;
  j["witnesses"] = w;
  return j.dump(2) + "\n";
}

std::string uniqueness_to_json(const Outcome& outcome) {
  ordered_json j;
  j["outcome"] = outcome_name(outcome.tag);
  j["patterns_found"] = outcome.patterns_found.size();
  ordered_json patterns = ordered_json::array();
  std::size_t limit = std::min<std::size_t>(outcome.patterns_found.size(), 32);
  for (std::size_t i = 0; i < limit; ++i) {
    patterns.push_back(pattern_json(outcome.patterns_found[i])["cells"]);
  }
  j["patterns"] = patterns;

  const SearchStats& st = outcome.stats;
  ordered_json s;
  s["combinations_total"] = st.combinations_total;
  s["completeness_rejected"] = st.completeness_rejected;
  s["matching_rejected"] = st.matching_rejected;
  s["searched"] = st.searched;
  s["nodes_expanded"] = st.nodes_expanded;
  s["degree_rejected"] = st.degree_rejected;
  s["connectivity_rejected"] = st.connectivity_rejected;
  s["edge_rejected"] = st.edge_rejected;
  s["spatial_conflicts"] = st.spatial_conflicts;
  s["compression_duplicates"] = st.compression_duplicates;
  j["stats"] = s;
  return j.dump(2) + "\n";
}

std::string grid_reports_csv(const std::vector<RunReport>& reports) {
  std::ostringstream out;
  out << "pattern,behavior,seed,converged,steps\n";
  for (const RunReport& r : reports) {
    out << r.pattern << ',' << r.behavior << ',' << r.seed << ','
        << (r.converged ? 1 : 0) << ',' << r.steps << '\n';
  }
  return out.str();
}

std::string continuum_reports_csv(const std::vector<ContinuumReport>& reports) {
  std::ostringstream out;
  out << "pattern,behavior,seed,success,t_complete,t_end,min_distance,disconnect_time\n";
  for (const ContinuumReport& r : reports) {
    out << r.pattern << ',' << r.behavior << ',' << r.seed << ','
        << (r.success ? 1 : 0) << ',' << fixed6(r.t_complete) << ','
        << fixed6(r.t_end) << ',' << fixed6(r.min_distance) << ','
        << fixed6(r.disconnect_time) << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const std::vector<TrajectorySample>& samples) {
  std::ostringstream out;
  out << "t,agent,x,y,vx,vy,mode\n";
  for (const TrajectorySample& s : samples) {
    out << fixed6(s.t) << ',' << s.agent << ',' << fixed6(s.position.x) << ','
        << fixed6(s.position.y) << ',' << fixed6(s.velocity.x) << ','
        << fixed6(s.velocity.y) << ',' << mode_name(s.mode) << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) {
      throw std::runtime_error("cannot create directory for: " + path);
    }
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace swarmform
