#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "predrep/mdp.hpp"

namespace predrep {

// Batch experiment drivers.  Each runner takes a validated config struct and
// returns a deterministic JSON report: config echo, per-seed records sorted
// by seed, aggregates recomputable from the records, and a "checks" object
// with the report's pass/fail assertions.  Reports carry no timestamps, so
// identical (config, seeds) give identical bytes; the CLI writes wall-clock
// metadata to a sidecar file instead.

// ======================== revaluation ========================

struct RevaluationConfig {
  std::vector<std::uint64_t> seeds;  // default 1..100
  int learn_episodes = 300;          // phase 1, split across the two starts
  int reval_episodes = 60;           // phase 2 forced-exposure episodes
  double epsilon = 0.1;
  double eta = 0.2;
  double gamma = 0.9;

  static RevaluationConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  void validate() const;
};

/// Two-step chains learned by model-free, model-based, and occupancy-map
/// agents, then perturbed by reward, transition, or policy revaluation.  The
/// report records each agent's test-phase start choice per condition.
nlohmann::ordered_json run_revaluation(const RevaluationConfig& config);

// ======================== multitask transfer ========================

struct MultitaskConfig {
  double gamma = 0.9;
  int n_random_worlds = 20;  // dominance spot-checks on random instances
  std::uint64_t seed = 7;
  std::vector<std::vector<double>> test_tasks = {{1, 1, 1}, {1, 0, 0}, {0, 1, 0}};

  static MultitaskConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  void validate() const;
};

/// Two-step feature world with specialized training policies; policy-reuse
/// transfer to new task vectors, including the case where reusing the best
/// trained policy is provably suboptimal (flagged in the report).
nlohmann::ordered_json run_multitask_gpi(const MultitaskConfig& config);

// ======================== navigation ========================

struct NavigationConfig {
  std::vector<std::uint64_t> seeds;  // default 1..20
  int n_configs = 10;                // barrier layouts
  int n_trials = 10;
  int max_steps = 1000;              // per trial
  int pretrain_episodes = 250;
  double gamma = 0.95;
  double goal_reward = 1.0;
  double step_reward = -0.01;
  double epsilon = 0.1;
  double mf_eta = 0.2;
  double mf_lambda = 0.9;
  double sr_eta = 0.5;
  double sr_lambda = 0.9;
  double sr_w_eta = 0.5;
  bool manhattan_heuristic = true;     // straight-line guidance for the planner
  std::uint64_t layout_seed = 99;      // barrier layouts shared across agents/seeds

  static NavigationConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  void validate() const;
};

/// Reconfigurable 10x10 maze: agents pretrain on the open grid, then face a
/// sequence of barrier layouts, a few trials each from scattered starts, with
/// no reset between layouts.  Reports steps-to-goal curves plus the
/// adaptation-speed ordering statistics.
nlohmann::ordered_json run_navigation(const NavigationConfig& config);

// ======================== replay demo ========================

struct ReplayDemoConfig {
  int track_length = 8;  // includes the rewarded terminal
  double gamma = 0.9;
  double threshold = 1e-9;
  double forward_min_gain = 1e-6;

  static ReplayDemoConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  void validate() const;
};

/// Backup prioritization on a linear track: reverse-ordered sweep after a
/// novel terminal reward, and a need-ordered forward sweep from the start
/// once values have converged.
nlohmann::ordered_json run_replay_demo(const ReplayDemoConfig& config);

// ======================== receptive-field maps ========================

struct NeuroMapsConfig {
  int room_size = 20;
  int n_eigenmaps = 6;
  int track_length = 12;
  double gamma = 0.95;
  std::string out_dir;  // empty: report only, no CSV export

  static NeuroMapsConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  void validate() const;
};

/// Occupancy-derived receptive fields, eigenvector maps for square and
/// trapezoidal rooms, and track skew statistics, exported as plot-ready CSV.
nlohmann::ordered_json run_neuro_maps(const NeuroMapsConfig& config);

// ======================== CLI tool runners ========================

/// Closed-form occupancy analysis of a configured gridworld or MDP: exports
/// M, the normalized model, and values under a chosen policy.
nlohmann::ordered_json run_sr_tool(const nlohmann::json& config, const std::string& out_dir,
                                   const std::string& format);

/// Successor-feature library for configured tasks plus the transfer table.
nlohmann::ordered_json run_sf_tool(const nlohmann::json& config, const std::string& out_dir,
                                   const std::string& format);

/// Spectral option discovery and landmark mapping on a configured world.
nlohmann::ordered_json run_explore_tool(const nlohmann::json& config, const std::string& out_dir,
                                        const std::string& format);

/// True when every entry of the report's "checks" object is true.
bool all_checks_pass(const nlohmann::json& report);

}  // namespace predrep
