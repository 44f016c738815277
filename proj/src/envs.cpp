#include "predrep/envs.hpp"

#include <cmath>
#include <stdexcept>

namespace predrep {

TabularMDP make_swap_chain(double gamma) {
  TabularMDP mdp;
  mdp.gamma = gamma;
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  mdp.transition = {swap, swap};
  mdp.reward = Eigen::Vector2d(0.0, 1.0);
  mdp.terminal = {false, false};
  mdp.validate();
  return mdp;
}

TabularMDP make_stay_swap_chain(double gamma) {
  TabularMDP mdp;
  mdp.gamma = gamma;
  Eigen::MatrixXd stay = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  mdp.transition = {stay, swap};
  mdp.reward = Eigen::Vector2d(0.0, 1.0);
  mdp.terminal = {false, false};
  mdp.validate();
  return mdp;
}

TabularMDP make_ring(int n, double gamma) {
  if (n < 2) throw std::invalid_argument("make_ring: need at least 2 states");
  TabularMDP mdp;
  mdp.gamma = gamma;
  Eigen::MatrixXd cw = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd ccw = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    cw(s, (s + 1) % n) = 1.0;
    ccw(s, (s + n - 1) % n) = 1.0;
  }
  mdp.transition = {cw, ccw};
  mdp.reward = Eigen::VectorXd::Zero(n);
  mdp.terminal.assign(static_cast<std::size_t>(n), false);
  mdp.validate();
  return mdp;
}

TabularMDP random_mdp(int n_states, int n_actions, double gamma, Rng& rng) {
  if (n_states < 1 || n_actions < 1) {
    throw std::invalid_argument("random_mdp: need at least one state and action");
  }
  TabularMDP mdp;
  mdp.gamma = gamma;
  mdp.transition.assign(static_cast<std::size_t>(n_actions),
                        Eigen::MatrixXd::Zero(n_states, n_states));
  for (auto& t : mdp.transition) {
    for (int s = 0; s < n_states; ++s) {
      // Dirichlet(1) row: normalized exponentials.
      double total = 0.0;
      for (int s2 = 0; s2 < n_states; ++s2) {
        double e = -std::log(1.0 - rng.uniform());
        t(s, s2) = e;
        total += e;
      }
      t.row(s) /= total;
    }
  }
  mdp.reward = Eigen::VectorXd::NullaryExpr(n_states, [&](Eigen::Index) { return rng.normal(); });
  mdp.terminal.assign(static_cast<std::size_t>(n_states), false);
  mdp.validate();
  return mdp;
}

PolicyMatrix random_policy(int n_states, int n_actions, Rng& rng) {
  PolicyMatrix pi(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    double total = 0.0;
    for (int a = 0; a < n_actions; ++a) {
      double e = -std::log(1.0 - rng.uniform());
      pi(s, a) = e;
      total += e;
    }
    pi.row(s) /= total;
  }
  return pi;
}

PolicyMatrix constant_policy(int n_states, int n_actions, int action) {
  if (action < 0 || action >= n_actions) {
    throw std::invalid_argument("constant_policy: action out of range");
  }
  PolicyMatrix pi = PolicyMatrix::Zero(n_states, n_actions);
  pi.col(action).setOnes();
  return pi;
}

// ======================== named maps ========================

GridWorld square_room(int n) {
  if (n < 1) throw std::invalid_argument("square_room: need n >= 1");
  std::string text;
  for (int r = 0; r < n; ++r) {
    text.append(static_cast<std::size_t>(n), '.');
    text.push_back('\n');
  }
  return parse_gridworld(text);
}

GridWorld four_rooms() {
  return parse_gridworld(
      "###########\n"
      "#....#....#\n"
      "#.........#\n"
      "#....#....#\n"
      "#....#....#\n"
      "##.#####.##\n"
      "#....#....#\n"
      "#....#....#\n"
      "#.........#\n"
      "#....#....#\n"
      "###########\n");
}

GridWorld two_room_map() {
  return parse_gridworld(
      "...#..\n"
      "...#..\n"
      "......\n"
      "...#..\n"
      "...#..\n"
      "...#..\n");
}

GridWorld linear_track(int n) {
  if (n < 2) throw std::invalid_argument("linear_track: need n >= 2");
  std::string row(static_cast<std::size_t>(n - 1), '.');
  row.push_back('G');
  row.push_back('\n');
  return parse_gridworld(row);
}

GridWorld trapezoid_room(int width, int height) {
  if (width < 2 || height < 3) {
    throw std::invalid_argument("trapezoid_room: need width >= 2, height >= 3");
  }
  double center = (height - 1) / 2.0;
  std::string text;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      // Half-width tapers linearly from the full west wall to one cell east.
      double frac = static_cast<double>(c) / (width - 1);
      double half = (1.0 - frac) * (height / 2.0) + frac * 0.5;
      text.push_back(std::abs(r - center) <= half + 1e-9 ? '.' : '#');
    }
    text.push_back('\n');
  }
  return parse_gridworld(text);
}

GridWorld serpentine_maze() {
  return parse_gridworld(
      "....G..\n"
      "######.\n"
      "....#S.\n"
      ".#####.\n"
      ".#####.\n"
      ".#####.\n"
      ".......\n");
}

double serpentine_gamma() { return 0.985; }

GridRewards serpentine_rewards() { return GridRewards{1.0, -0.1}; }

}  // namespace predrep
