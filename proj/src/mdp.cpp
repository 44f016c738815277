#include "predrep/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace predrep {

void TabularMDP::validate() const {
  const int S = n_states();
  const int A = n_actions();
  if (S == 0 || A == 0) throw std::invalid_argument("mdp: empty state or action set");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("mdp: gamma must lie in [0,1)");
  if (reward.size() != S) throw std::invalid_argument("mdp: reward size mismatch");
  if (int(terminal.size()) != S) throw std::invalid_argument("mdp: terminal mask size mismatch");
  for (int a = 0; a < A; ++a) {
    const auto& t = transition[size_t(a)];
    if (t.rows() != S || t.cols() != S) throw std::invalid_argument("mdp: transition shape mismatch");
    for (int s = 0; s < S; ++s) {
      double sum = 0.0;
      for (int s2 = 0; s2 < S; ++s2) {
        const double p = t(s, s2);
        if (p < 0.0) throw std::invalid_argument("mdp: negative transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("mdp: transition row does not sum to 1");
      if (terminal[size_t(s)] && t(s, s) != 1.0)
        throw std::invalid_argument("mdp: terminal state must self-loop with probability 1");
    }
  }
}

// ======================== gridworlds ========================

GridWorld parse_gridworld(const std::string& text) {
  GridWorld world;
  std::stringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    world.text.push_back(line);
  }
  if (world.text.empty()) throw std::invalid_argument("gridworld: empty map");
  world.rows = int(world.text.size());
  world.cols = int(world.text[0].size());
  for (const auto& row : world.text)
    if (int(row.size()) != world.cols) throw std::invalid_argument("gridworld: ragged rows");

  world.state_of_cell.assign(size_t(world.rows) * world.cols, -1);
  for (int r = 0; r < world.rows; ++r) {
    for (int c = 0; c < world.cols; ++c) {
      const char ch = world.text[size_t(r)][size_t(c)];
      if (ch == '#') continue;
      if (ch != '.' && ch != 'S' && ch != 'G')
        throw std::invalid_argument(std::string("gridworld: unknown character '") + ch + "'");
      const int s = world.n_states();
      world.state_of_cell[size_t(r) * world.cols + c] = s;
      world.cell_of_state.emplace_back(r, c);
      if (ch == 'S') {
        if (world.start_state >= 0) throw std::invalid_argument("gridworld: multiple start cells");
        world.start_state = s;
      }
      if (ch == 'G') world.goal_states.push_back(s);
    }
  }
  if (world.n_states() == 0) throw std::invalid_argument("gridworld: no open cells");
  return world;
}

namespace {
constexpr int kMoves[4][2] = {{-1, 0}, {0, 1}, {1, 0}, {0, -1}};  // N,E,S,W
}

TabularMDP gridworld_mdp(const GridWorld& world, double gamma,
                         const GridRewards& rewards, double slip) {
  if (slip < 0.0 || slip > 1.0) throw std::invalid_argument("gridworld_mdp: slip out of range");
  const int S = world.n_states();
  TabularMDP mdp;
  mdp.gamma = gamma;
  mdp.reward = Eigen::VectorXd::Constant(S, rewards.step);
  mdp.terminal.assign(size_t(S), false);
  for (int g : world.goal_states) {
    mdp.reward[g] = rewards.goal;
    mdp.terminal[size_t(g)] = true;
  }

  auto destination = [&](int s, int a) {
    const auto [r, c] = world.cell_of_state[size_t(s)];
    const int rr = r + kMoves[a][0];
    const int cc = c + kMoves[a][1];
    if (rr < 0 || rr >= world.rows || cc < 0 || cc >= world.cols) return s;
    const int t = world.state_at(rr, cc);
    return t < 0 ? s : t;
  };

  mdp.transition.assign(4, Eigen::MatrixXd::Zero(S, S));
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < 4; ++a) {
      if (mdp.terminal[size_t(s)]) {
        mdp.transition[size_t(a)](s, s) = 1.0;
        continue;
      }
      mdp.transition[size_t(a)](s, destination(s, a)) += 1.0 - slip;
      mdp.transition[size_t(a)](s, destination(s, (a + 1) % 4)) += slip / 2.0;
      mdp.transition[size_t(a)](s, destination(s, (a + 3) % 4)) += slip / 2.0;
    }
  }
  mdp.validate();
  return mdp;
}

// ======================== policies ========================

PolicyMatrix uniform_policy(int n_states, int n_actions) {
  return PolicyMatrix::Constant(n_states, n_actions, 1.0 / n_actions);
}

PolicyMatrix greedy_policy(const Eigen::MatrixXd& q) {
  PolicyMatrix policy = PolicyMatrix::Zero(q.rows(), q.cols());
  for (int s = 0; s < q.rows(); ++s) {
    int best = 0;
    for (int a = 1; a < q.cols(); ++a)
      if (q(s, a) > q(s, best)) best = a;
    policy(s, best) = 1.0;
  }
  return policy;
}

void validate_policy(const TabularMDP& mdp, const PolicyMatrix& policy) {
  if (policy.rows() != mdp.n_states() || policy.cols() != mdp.n_actions())
    throw std::invalid_argument("policy: shape mismatch");
  for (int s = 0; s < policy.rows(); ++s) {
    double sum = 0.0;
    for (int a = 0; a < policy.cols(); ++a) {
      if (policy(s, a) < 0.0) throw std::invalid_argument("policy: negative probability");
      sum += policy(s, a);
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("policy: row does not sum to 1");
  }
}

Eigen::MatrixXd policy_transition_matrix(const TabularMDP& mdp, const PolicyMatrix& policy) {
  validate_policy(mdp, policy);
  const int S = mdp.n_states();
  Eigen::MatrixXd tpi = Eigen::MatrixXd::Zero(S, S);
  for (int a = 0; a < mdp.n_actions(); ++a)
    tpi += policy.col(a).asDiagonal() * mdp.transition[size_t(a)];
  return tpi;
}

// ======================== exact solvers ========================

Eigen::VectorXd policy_evaluation_exact(const TabularMDP& mdp, const PolicyMatrix& policy) {
  const Eigen::MatrixXd tpi = policy_transition_matrix(mdp, policy);
  const int S = mdp.n_states();
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(S, S) - mdp.gamma * tpi;
  return lhs.partialPivLu().solve(tpi * mdp.reward);
}

ValueIterationResult value_iteration(const TabularMDP& mdp, double tol, int max_iterations) {
  if (tol <= 0.0) throw std::invalid_argument("value_iteration: tol must be positive");
  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  ValueIterationResult out;
  out.v = Eigen::VectorXd::Zero(S);
  out.q = Eigen::MatrixXd::Zero(S, A);
  for (int it = 0; it < max_iterations; ++it) {
    for (int a = 0; a < A; ++a)
      out.q.col(a) = mdp.transition[size_t(a)] * (mdp.reward + mdp.gamma * out.v);
    Eigen::VectorXd next = out.q.rowwise().maxCoeff();
    const double change = (next - out.v).cwiseAbs().maxCoeff();
    out.v = std::move(next);
    out.iterations = it + 1;
    if (change < tol) {
      out.policy = greedy_policy(out.q);
      return out;
    }
  }
  throw std::runtime_error("value_iteration: did not converge");
}

// ======================== sampling ========================

namespace {
int draw_action(const PolicyMatrix& policy, int s, Rng& rng) {
  return rng.categorical(policy.row(s).transpose());
}

int draw_next(const TabularMDP& mdp, int s, int a, Rng& rng) {
  return rng.categorical(mdp.transition[size_t(a)].row(s).transpose());
}
}  // namespace

Trajectory sample_trajectory(const TabularMDP& mdp, const PolicyMatrix& policy,
                             int start, int horizon, Rng& rng) {
  if (start < 0 || start >= mdp.n_states())
    throw std::invalid_argument("sample_trajectory: invalid start state");
  validate_policy(mdp, policy);
  Trajectory traj;
  traj.seed = rng.state_id();
  int s = start;
  for (int t = 0; t < horizon; ++t) {
    const int a = draw_action(policy, s, rng);
    const int s2 = draw_next(mdp, s, a, rng);
    traj.steps.push_back({s, a, mdp.reward[s2], s2});
    if (mdp.terminal[size_t(s)]) break;  // the absorbing entry was just recorded
    s = s2;
  }
  return traj;
}

int default_mc_horizon(double gamma) {
  if (gamma <= 0.0) return 1;
  return int(std::ceil(std::log(1e-6) / std::log(gamma)));
}

McEstimate monte_carlo_evaluation(const TabularMDP& mdp, const PolicyMatrix& policy,
                                  int state, int n_rollouts, Rng& rng, int horizon) {
  if (n_rollouts < 1) throw std::invalid_argument("monte_carlo_evaluation: n_rollouts >= 1");
  if (state < 0 || state >= mdp.n_states())
    throw std::invalid_argument("monte_carlo_evaluation: invalid state");
  validate_policy(mdp, policy);
  if (horizon < 0) horizon = default_mc_horizon(mdp.gamma);

  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n_rollouts; ++i) {
    double ret = 0.0, discount = 1.0;
    int s = state;
    for (int t = 0; t < horizon; ++t) {
      const int a = draw_action(policy, s, rng);
      const int s2 = draw_next(mdp, s, a, rng);
      ret += discount * mdp.reward[s2];
      if (mdp.terminal[size_t(s2)]) {
        // remaining arrivals all land in s2; finish the geometric tail exactly
        const double tail = mdp.gamma * discount *
            (1.0 - std::pow(mdp.gamma, horizon - t - 1)) / (1.0 - mdp.gamma);
        ret += tail * mdp.reward[s2];
        break;
      }
      discount *= mdp.gamma;
      s = s2;
    }
    sum += ret;
    sum_sq += ret * ret;
  }
  McEstimate est;
  est.n = n_rollouts;
  est.mean = sum / n_rollouts;
  if (n_rollouts > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / n_rollouts) / (n_rollouts - 1));
    est.std_error = std::sqrt(var / n_rollouts);
  }
  return est;
}

// ======================== Q-learning ========================

Eigen::MatrixXd q_learning(const TabularMDP& mdp, const QLearningConfig& cfg, Rng& rng) {
  if (cfg.epsilon < 0.0 || cfg.epsilon > 1.0) throw std::invalid_argument("q_learning: epsilon out of range");
  if (cfg.eta.eta0 <= 0.0 || cfg.eta.eta0 > 1.0) throw std::invalid_argument("q_learning: eta0 out of range");
  const int S = mdp.n_states();
  const int A = mdp.n_actions();
  const int horizon = cfg.horizon > 0 ? cfg.horizon : default_mc_horizon(mdp.gamma);

  std::vector<int> starts;
  for (int s = 0; s < S; ++s)
    if (!mdp.terminal[size_t(s)]) starts.push_back(s);
  if (starts.empty()) starts.push_back(0);

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(S, A);
  long t_global = 0;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    int s = cfg.start_state >= 0 ? cfg.start_state : starts[size_t(rng.uniform_below(int(starts.size())))];
    for (int t = 0; t < horizon; ++t) {
      int a;
      if (rng.uniform() < cfg.epsilon) {
        a = rng.uniform_below(A);
      } else {
        a = 0;
        for (int b = 1; b < A; ++b)
          if (q(s, b) > q(s, a)) a = b;
      }
      const int s2 = draw_next(mdp, s, a, rng);
      const double target = mdp.reward[s2] + mdp.gamma * q.row(s2).maxCoeff();
      q(s, a) += cfg.eta.at(t_global++) * (target - q(s, a));
      s = s2;
    }
  }
  return q;
}

}  // namespace predrep
