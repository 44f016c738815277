#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "predrep/rng.hpp"

namespace predrep {

// Reward convention used throughout this library: rewards attach to the
// ARRIVAL state.  A transition s -a-> s' earns R[s'], so values satisfy
// V(s) = E[sum_t gamma^t R(s_{t+1})].  Much RL software attaches rewards to
// (s,a); translate before importing a model.  Terminal states are absorbing
// self-loops; episodic samplers stop after recording the absorbing entry
// once, while the exact solvers treat the chain as infinite-horizon.

/// Policy as a row-stochastic matrix pi[s][a].
using PolicyMatrix = Eigen::MatrixXd;

/// Finite MDP (gamma, S, A, T, R) with absorbing terminals.
struct TabularMDP {
  double gamma = 0.9;
  std::vector<Eigen::MatrixXd> transition;  // one S x S row-stochastic matrix per action
  Eigen::VectorXd reward;                   // earned on the arrival state
  std::vector<bool> terminal;

  int n_states() const { return transition.empty() ? 0 : int(transition[0].rows()); }
  int n_actions() const { return int(transition.size()); }
  double prob(int s, int a, int s2) const { return transition[size_t(a)](s, s2); }

  /// Throws std::invalid_argument on any violated invariant: rows must sum to
  /// one, entries be non-negative, gamma lie in [0,1), terminals self-loop.
  void validate() const;
};

// ======================== gridworlds ========================

/// Parsed ASCII map.  Characters: '#' wall, '.' open, 'S' start, 'G' goal.
/// Motion is 4-neighborhood; bumping a wall or the border leaves the agent
/// in place.  States are open cells numbered row-major.
struct GridWorld {
  int rows = 0;
  int cols = 0;
  std::vector<std::string> text;              // validated map rows
  std::vector<int> state_of_cell;             // rows*cols entries, -1 for walls
  std::vector<std::pair<int, int>> cell_of_state;  // (row, col) per state
  int start_state = -1;                       // -1 when no 'S' present
  std::vector<int> goal_states;

  int n_states() const { return int(cell_of_state.size()); }
  int state_at(int r, int c) const { return state_of_cell[size_t(r) * cols + c]; }
};

GridWorld parse_gridworld(const std::string& text);

/// Rewards for the derived MDP, earned on arrival.
struct GridRewards {
  double goal = 1.0;
  double step = 0.0;  // arrival reward at every non-goal state
};

/// Actions are N=0, E=1, S=2, W=3.  With slip > 0 the agent moves in the
/// intended direction with probability 1-slip and perpendicular to it with
/// probability slip/2 each.  Goals are absorbing.
TabularMDP gridworld_mdp(const GridWorld& world, double gamma,
                         const GridRewards& rewards = {}, double slip = 0.0);

// ======================== policies ========================

PolicyMatrix uniform_policy(int n_states, int n_actions);

/// Deterministic greedy rows; ties broken by the lowest action index.
PolicyMatrix greedy_policy(const Eigen::MatrixXd& q);

void validate_policy(const TabularMDP& mdp, const PolicyMatrix& policy);

/// Marginal transition matrix T^pi(s,s') = sum_a pi(a|s) T(s'|s,a).
Eigen::MatrixXd policy_transition_matrix(const TabularMDP& mdp, const PolicyMatrix& policy);

// ======================== exact solvers ========================

/// Solves (I - gamma T^pi) V = T^pi R directly.
Eigen::VectorXd policy_evaluation_exact(const TabularMDP& mdp, const PolicyMatrix& policy);

struct ValueIterationResult {
  Eigen::VectorXd v;
  Eigen::MatrixXd q;       // S x A
  PolicyMatrix policy;     // deterministic greedy rows
  int iterations = 0;
};

/// Iterates Bellman optimality backups until the sup-norm change drops
/// below tol.
ValueIterationResult value_iteration(const TabularMDP& mdp, double tol = 1e-10,
                                     int max_iterations = 1000000);

// ======================== sampling ========================

struct Step {
  int state;
  int action;
  double reward;  // equals R[next_state]
  int next_state;
};

struct Trajectory {
  std::vector<Step> steps;
  std::uint64_t seed = 0;  // stream fingerprint at the time of sampling
};

/// Rolls the chain for at most `horizon` steps.  Once a terminal state is
/// entered, one absorbing self-transition is recorded and sampling stops.
Trajectory sample_trajectory(const TabularMDP& mdp, const PolicyMatrix& policy,
                             int start, int horizon, Rng& rng);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int n = 0;
};

/// Default horizon: smallest H with gamma^H < 1e-6.
int default_mc_horizon(double gamma);

/// Mean discounted return from `state`; absorbed tails are completed
/// analytically so the estimate matches the exact infinite-horizon solve up
/// to the gamma^horizon truncation.
McEstimate monte_carlo_evaluation(const TabularMDP& mdp, const PolicyMatrix& policy,
                                  int state, int n_rollouts, Rng& rng, int horizon = -1);

// ======================== Q-learning ========================

/// Decaying learning rate eta(t) = eta0 / (1 + t/tau); tau <= 0 keeps it constant.
struct EtaSchedule {
  double eta0 = 0.1;
  double tau = 1e4;
  double at(long t) const { return tau > 0 ? eta0 / (1.0 + double(t) / tau) : eta0; }
};

struct QLearningConfig {
  int episodes = 10000;
  int horizon = -1;          // -1: default_mc_horizon(gamma)
  double epsilon = 0.1;
  EtaSchedule eta;
  int start_state = -1;      // -1: uniform over non-terminal states
};

Eigen::MatrixXd q_learning(const TabularMDP& mdp, const QLearningConfig& cfg, Rng& rng);

}  // namespace predrep
