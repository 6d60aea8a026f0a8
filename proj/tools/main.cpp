#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "swarmform/behavior.hpp"
#include "swarmform/continuum_sim.hpp"
#include "swarmform/grid_sim.hpp"
#include "swarmform/io.hpp"
#include "swarmform/stats.hpp"
#include "swarmform/svg.hpp"
#include "swarmform/transition_graphs.hpp"
#include "swarmform/uniqueness.hpp"

namespace {

using namespace swarmform;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInputError = 2;
constexpr int kInconclusive = 3;
constexpr int kSafety = 4;

struct Options {
  std::string pattern_path;
  std::string behavior = "baseline";
  std::string out = "out";
  int runs = 100;
  std::uint64_t seed = 1;
  std::uint64_t step_cap = 1'000'000;
  double time_cap = 300.0;
  bool force = false;
  bool lenient_arrival = false;
  bool trajectory = false;
  std::uint64_t node_limit = UniquenessOptions{}.node_limit;
  std::uint64_t combination_limit = UniquenessOptions{}.combination_limit;
};

BehaviorBundle make_bundle(const Options& opt) {
  auto cfg = BehaviorConfig::by_name(opt.behavior);
  if (!cfg) {
    throw std::invalid_argument("unknown behavior \"" + opt.behavior +
                                "\" (expected baseline, alt1, alt2, alt3 or alt4)");
  }
  Pattern p = load_pattern_file(opt.pattern_path);
  if (p.name.empty()) {
    p.name = std::filesystem::path(opt.pattern_path).stem().string();
  }
  return derive_behavior(p, *cfg);
}

std::string stem(const BehaviorBundle& bundle) {
  return bundle.p_des.name + "_" + bundle.config.name;
}

int cmd_derive(const Options& opt) {
  BehaviorBundle bundle = make_bundle(opt);
  const StateSet statics = bundle.sets.statics();
  const StateSet active = bundle.sets.active();
  std::printf("pattern %s (%d cells), behavior %s\n", bundle.p_des.name.c_str(),
              bundle.p_des.size(), bundle.config.name.c_str());
  std::printf("desired=%d blocked=%d static=%d active=%d simplicial=%d\n",
              bundle.sets.des.count(), bundle.sets.blocked.count(), statics.count(),
              active.count(), bundle.sets.simplicial.count());
  std::size_t total = 0;
  for (LocalState s : active.list()) total += bundle.q.actions(s).count();
  std::printf("safe actions: %zu across %d active states\n", total, active.count());

  std::string path = opt.out + "/" + stem(bundle) + "_bundle.json";
  write_text_file(path, bundle_to_json(bundle));
  std::printf("wrote %s\n", path.c_str());
  return kOk;
}

int cmd_verify(const Options& opt) {
  BehaviorBundle bundle = make_bundle(opt);
  CheckOptions copts;
  copts.lenient_arrival = opt.lenient_arrival;
  ConditionReport report = run_condition_checks(bundle, copts);

  std::printf("achievable=%s clique_ok=%s loop_ok=%s explore_ok=%s arrival_ok=%s\n",
              report.achievable ? "true" : "false",
              report.lemma3_clique_ok ? "true" : "false",
              report.lemma3_loop_ok ? "true" : "false",
              report.thm_explore_ok ? "true" : "false",
              report.thm_arrival_ok ? "true" : "false");

  std::string conditions_path = opt.out + "/" + stem(bundle) + "_conditions.json";
  write_text_file(conditions_path, condition_report_to_json(report));

  Outcome outcome;
  bool inconclusive = false;
  std::string why;
  try {
    UniquenessOptions uopts;
    uopts.node_limit = opt.node_limit;
    uopts.combination_limit = opt.combination_limit;
    outcome = check_uniqueness(bundle.sets, static_cast<int>(bundle.p_des.size()),
                               bundle.p_des, uopts);
  } catch (const BudgetExceeded& e) {
    inconclusive = true;
    why = e.what();
  }

  if (inconclusive) {
    std::printf("uniqueness: inconclusive (%s)\n", why.c_str());
    return kInconclusive;
  }

  std::printf("uniqueness: %s (%zu stable pattern%s)\n", outcome_name(outcome.tag),
              outcome.patterns_found.size(),
              outcome.patterns_found.size() == 1 ? "" : "s");
  write_text_file(opt.out + "/" + stem(bundle) + "_uniqueness.json",
                  uniqueness_to_json(outcome));

  bool ok = outcome.tag == OutcomeTag::DesiredUnique && report.all_ok();
  std::printf("verdict: %s\n", ok ? "pass" : "fail");
  return ok ? kOk : kFailed;
}

int cmd_sim_grid(const Options& opt) {
  BehaviorBundle bundle = make_bundle(opt);

  if (!opt.force) {
    UniquenessOptions gate;
    gate.node_limit = 20'000'000;
    gate.combination_limit = 5'000'000;
    gate.early_exit = true;
    try {
      Outcome o = check_uniqueness(bundle.sets, static_cast<int>(bundle.p_des.size()),
                                   bundle.p_des, gate);
      if (o.tag != OutcomeTag::DesiredUnique) {
        std::fprintf(stderr,
                     "refusing to simulate: emergent pattern is %s "
                     "(rerun with --force to override)\n",
                     outcome_name(o.tag));
        return kFailed;
      }
    } catch (const BudgetExceeded&) {
      std::fprintf(stderr,
                   "note: uniqueness gate inconclusive within its budget; "
                   "simulating anyway\n");
    }
  }

  RunOptions ropts;
  ropts.step_cap = opt.step_cap;
  std::vector<RunReport> reports = batch(bundle, opt.runs, opt.seed, ropts);

  int converged = 0, stalled = 0;
  std::vector<double> steps;
  for (const RunReport& r : reports) {
    if (r.converged) {
      ++converged;
      steps.push_back(static_cast<double>(r.steps));
    }
    if (r.stalled) ++stalled;
  }
  std::printf("pattern %s behavior %s: %d/%d converged", bundle.p_des.name.c_str(),
              bundle.config.name.c_str(), converged, opt.runs);
  if (stalled > 0) std::printf(", %d stalled", stalled);
  if (!steps.empty()) std::printf(", median steps %.0f", median(steps));
  std::printf("\n");

  std::string csv_path = opt.out + "/grid_" + stem(bundle) + ".csv";
  write_text_file(csv_path, grid_reports_csv(reports));
  std::printf("wrote %s\n", csv_path.c_str());
  if (!steps.empty()) {
    std::string svg_path = opt.out + "/grid_" + stem(bundle) + "_steps.svg";
    write_text_file(svg_path,
                    svg_histogram({{bundle.config.name, steps}},
                                  "steps to convergence: " + bundle.p_des.name,
                                  "steps"));
    std::printf("wrote %s\n", svg_path.c_str());
  }
  return kOk;
}

int cmd_sim_continuum(const Options& opt) {
  BehaviorBundle bundle = make_bundle(opt);
  ContinuumConfig cfg;
  cfg.sim_time_cap = opt.time_cap;
  cfg = cfg.solved();

  std::vector<ContinuumReport> reports;
  std::vector<TrajectorySample> trajectory;
  reports.reserve(static_cast<std::size_t>(opt.runs));
  for (int i = 0; i < opt.runs; ++i) {
    ContinuumOptions copts;
    if (opt.trajectory && i == 0) {
      copts.sample_every = 10;
      copts.trajectory = &trajectory;
    }
    reports.push_back(simulate(bundle, cfg, derive_seed(opt.seed, i), copts));
  }

  int successes = 0, disconnects = 0;
  bool collision = false;
  std::vector<double> completion;
  for (const ContinuumReport& r : reports) {
    if (r.success) {
      ++successes;
      completion.push_back(r.t_complete);
    }
    if (r.disconnected) ++disconnects;
    if (r.min_distance < cfg.collision_radius) collision = true;
  }
  std::printf("pattern %s behavior %s: %d/%d succeeded", bundle.p_des.name.c_str(),
              bundle.config.name.c_str(), successes, opt.runs);
  if (!completion.empty()) std::printf(", median completion %.1f s", median(completion));
  if (disconnects > 0) std::printf(", %d disconnected", disconnects);
  std::printf("\n");

  std::string csv_path = opt.out + "/continuum_" + stem(bundle) + ".csv";
  write_text_file(csv_path, continuum_reports_csv(reports));
  std::printf("wrote %s\n", csv_path.c_str());
  if (!trajectory.empty()) {
    std::string traj_csv = opt.out + "/continuum_" + stem(bundle) + "_trajectory.csv";
    write_text_file(traj_csv, trajectory_csv(trajectory));
    std::string traj_svg = opt.out + "/continuum_" + stem(bundle) + "_trajectory.svg";
    write_text_file(traj_svg,
                    svg_trajectories(trajectory, "trajectories: " + bundle.p_des.name));
    std::printf("wrote %s and %s\n", traj_csv.c_str(), traj_svg.c_str());
  }

  if (collision) {
    std::fprintf(stderr, "safety violation: agents came closer than %.2f m\n",
                 cfg.collision_radius);
    return kSafety;
  }
  return kOk;
}

int cmd_oracle(const Options& opt) {
  BehaviorBundle bundle = make_bundle(opt);
  const int n = static_cast<int>(bundle.p_des.size());
  std::vector<Pattern> patterns = oracle_all_static_patterns(bundle.sets, n);

  std::printf("all-static %d-agent patterns under %s/%s: %zu\n", n,
              bundle.p_des.name.c_str(), bundle.config.name.c_str(), patterns.size());
  const Pattern target = bundle.p_des.canonical();
  std::size_t shown = 0;
  for (const Pattern& p : patterns) {
    if (shown == 20) {
      std::printf("  ... (%zu more)\n", patterns.size() - shown);
      break;
    }
    std::string line = "  ";
    for (const Cell& c : p.cells()) {
      line += "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ") ";
    }
    if (p == target) line += "<- target";
    std::printf("%s\n", line.c_str());
    ++shown;
  }

  nlohmann::ordered_json j;
  j["count"] = patterns.size();
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Pattern& p : patterns) {
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const Cell& c : p.cells()) cells.push_back(nlohmann::ordered_json::array({c.x, c.y}));
    arr.push_back(cells);
  }
  j["patterns"] = arr;
  std::string path = opt.out + "/oracle_" + stem(bundle) + ".json";
  write_text_file(path, j.dump(2) + "\n");
  std::printf("wrote %s\n", path.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derive, verify and simulate safe local behaviors that make a "
               "swarm of anonymous lattice agents form a target pattern"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--pattern", opt.pattern_path, "pattern JSON file")
        ->required();
    sub->add_option("--behavior", opt.behavior,
                    "behavior variant: baseline, alt1, alt2, alt3, alt4");
    sub->add_option("--out", opt.out, "output directory (default: out)");
  };

  CLI::App* derive =
      app.add_subcommand("derive", "derive the safe behavior tables for a pattern");
  add_common(derive);

  CLI::App* verify = app.add_subcommand(
      "verify", "check pattern uniqueness and the local convergence conditions");
  add_common(verify);
  verify->add_flag("--lenient-arrival", opt.lenient_arrival,
                   "accept arrivals with at least one activating placement");
  verify->add_option("--node-limit", opt.node_limit,
                     "placement search budget before giving up");
  verify->add_option("--combination-limit", opt.combination_limit,
                     "state multiset budget before giving up");

  CLI::App* sim_grid =
      app.add_subcommand("sim-grid", "run seeded lattice simulations");
  add_common(sim_grid);
  sim_grid->add_option("--runs", opt.runs, "number of runs (default: 100)");
  sim_grid->add_option("--seed", opt.seed, "base seed (default: 1)");
  sim_grid->add_option("--cap", opt.step_cap, "step cap per run (default: 1000000)");
  sim_grid->add_flag("--force", opt.force,
                     "simulate even when the uniqueness gate fails");

  CLI::App* sim_cont = app.add_subcommand(
      "sim-continuum", "run seeded continuous-space simulations");
  add_common(sim_cont);
  sim_cont->add_option("--runs", opt.runs, "number of runs (default: 50)");
  sim_cont->add_option("--seed", opt.seed, "base seed (default: 1)");
  sim_cont->add_option("--cap", opt.time_cap,
                       "simulated seconds per run (default: 300)");
  sim_cont->add_flag("--trajectory", opt.trajectory,
                     "record the first run's trajectories (CSV + SVG)");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "exhaustively enumerate every all-static pattern of the swarm size");
  add_common(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  // Continuous-space defaults differ: runs and the behavior variant.
  if (app.got_subcommand(sim_cont)) {
    if (sim_cont->get_option("--behavior")->count() == 0) opt.behavior = "alt4";
    if (sim_cont->get_option("--runs")->count() == 0) opt.runs = 50;
  }

  try {
    if (app.got_subcommand(derive)) return cmd_derive(opt);
    if (app.got_subcommand(verify)) return cmd_verify(opt);
    if (app.got_subcommand(sim_grid)) return cmd_sim_grid(opt);
    if (app.got_subcommand(sim_cont)) return cmd_sim_continuum(opt);
    if (app.got_subcommand(oracle)) return cmd_oracle(opt);
  } catch (const SafetyViolation& e) {
    std::fprintf(stderr, "safety violation: %s\n", e.what());
    return kSafety;
  } catch (const BudgetExceeded& e) {
    std::fprintf(stderr, "inconclusive: %s\n", e.what());
    return kInconclusive;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kFailed;
  }
  return kInputError;
}
