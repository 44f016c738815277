#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "predrep/envs.hpp"
#include "predrep/mdp.hpp"
#include "predrep/rng.hpp"

using namespace predrep;

TEST_SUITE("mdp") {

TEST_CASE("gridworld parsing maps open cells to states") {
  GridWorld world = parse_gridworld("S.\n.G");
  CHECK(world.rows == 2);
  CHECK(world.cols == 2);
  CHECK(world.n_states() == 4);
  CHECK(world.start_state == world.state_at(0, 0));
  REQUIRE(world.goal_states.size() == 1);
  CHECK(world.goal_states[0] == world.state_at(1, 1));

  GridWorld walled = parse_gridworld("S#\n.G");
  CHECK(walled.n_states() == 3);
  CHECK(walled.state_at(0, 1) == -1);
  // states are numbered row-major over open cells only
  CHECK(walled.state_at(1, 0) == 1);
  CHECK(walled.state_at(1, 1) == 2);
}

TEST_CASE("gridworld dynamics: bumps, slips, absorbing goals") {
  GridWorld world = parse_gridworld("S.\n.G");
  TabularMDP mdp = gridworld_mdp(world, 0.9, GridRewards{1.0, -0.1});
  mdp.validate();

  const int s00 = world.state_at(0, 0);
  const int s01 = world.state_at(0, 1);
  const int goal = world.state_at(1, 1);

  // north from the top row bumps in place
  CHECK(mdp.prob(s00, 0, s00) == doctest::Approx(1.0));
  // east moves deterministically
  CHECK(mdp.prob(s00, 1, s01) == doctest::Approx(1.0));
  // goal is absorbing under every action
  for (int a = 0; a < mdp.n_actions(); ++a) {
    CHECK(mdp.prob(goal, a, goal) == doctest::Approx(1.0));
  }
  CHECK(mdp.terminal[goal]);
  CHECK(mdp.reward[goal] == doctest::Approx(1.0));
  CHECK(mdp.reward[s01] == doctest::Approx(-0.1));

  TabularMDP slippery = gridworld_mdp(world, 0.9, GridRewards{1.0, 0.0}, 0.2);
  slippery.validate();
  // east with slip 0.2: 0.8 east, 0.1 to each perpendicular (north bumps)
  CHECK(slippery.prob(s00, 1, s01) == doctest::Approx(0.8));
  CHECK(slippery.prob(s00, 1, world.state_at(1, 0)) == doctest::Approx(0.1));
  CHECK(slippery.prob(s00, 1, s00) == doctest::Approx(0.1));
}

TEST_CASE("validate rejects malformed models") {
  TabularMDP mdp = make_swap_chain(0.5);
  mdp.transition[0](0, 0) = 0.3;  // row no longer sums to one
  CHECK_THROWS_AS(mdp.validate(), std::invalid_argument);

  TabularMDP neg = make_swap_chain(0.5);
  neg.transition[0](0, 0) = -0.5;
  neg.transition[0](0, 1) = 1.5;
  CHECK_THROWS_AS(neg.validate(), std::invalid_argument);

  TabularMDP bad_gamma = make_swap_chain(0.5);
  bad_gamma.gamma = 1.0;
  CHECK_THROWS_AS(bad_gamma.validate(), std::invalid_argument);
}

TEST_CASE("exact policy evaluation on the two-state swap chain") {
  // Deterministic swap with arrival rewards [0, 1] and gamma = 1/2:
  // v(0) = 1 + (1/2) v(1), v(1) = (1/2) v(0)  =>  v = [4/3, 2/3].
  TabularMDP mdp = make_swap_chain(0.5);
  Eigen::MatrixXd pi = uniform_policy(2, 2);
  Eigen::VectorXd v = policy_evaluation_exact(mdp, pi);
  CHECK(v(0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(v(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("value iteration finds the stay/swap optimum") {
  // Staying on the rewarded state forever beats swapping: v* = [2, 2] at
  // gamma = 1/2 (swap into state 1 then stay: 1 + 0.5 * 2 = 2).
  TabularMDP mdp = make_stay_swap_chain(0.5);
  ValueIterationResult res = value_iteration(mdp);
  CHECK(res.v(0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(res.v(1) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(res.policy(0, 1) == 1.0);  // swap toward the reward
  CHECK(res.policy(1, 0) == 1.0);  // then stay
  Eigen::VectorXd v_exact = policy_evaluation_exact(mdp, greedy_policy(res.q));
  CHECK((v_exact - res.v).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("monte carlo evaluation agrees with the exact solve") {
  Rng rng(13);
  TabularMDP mdp = random_mdp(5, 2, 0.8, rng);
  Eigen::MatrixXd pi = random_policy(5, 2, rng);
  Eigen::VectorXd v = policy_evaluation_exact(mdp, pi);
  McEstimate est = monte_carlo_evaluation(mdp, pi, 0, 4000, rng);
  CHECK(est.n == 4000);
  CHECK(std::abs(est.mean - v(0)) < 3.5 * est.std_error + 1e-6);
}

TEST_CASE("absorbing tails are completed in closed form") {
  // One absorbing state with arrival reward 1: v = 1/(1-gamma) = 2. Once the
  // horizon is long enough for gamma^h to underflow, the closed-form tail is
  // exact, and every rollout is identical so the standard error vanishes.
  TabularMDP mdp;
  mdp.gamma = 0.5;
  mdp.transition = {Eigen::MatrixXd::Ones(1, 1)};
  mdp.reward = Eigen::VectorXd::Ones(1);
  mdp.terminal = {true};
  Eigen::MatrixXd pi = constant_policy(1, 1, 0);
  Rng rng(1);
  McEstimate est = monte_carlo_evaluation(mdp, pi, 0, 50, rng, 4000);
  CHECK(est.mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(est.std_error == doctest::Approx(0.0));
  // the default horizon truncates the same tail at gamma^h precision
  Rng rng2(2);
  McEstimate trunc = monte_carlo_evaluation(mdp, pi, 0, 10, rng2);
  CHECK(trunc.mean < 2.0);
  CHECK(trunc.mean == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("trajectories record the absorbing self-loop once and stop") {
  GridWorld world = parse_gridworld("S.\n.G");
  TabularMDP mdp = gridworld_mdp(world, 0.9, GridRewards{1.0, 0.0});
  Eigen::MatrixXd east = constant_policy(mdp.n_states(), mdp.n_actions(), 1);
  Eigen::MatrixXd south = constant_policy(mdp.n_states(), mdp.n_actions(), 2);
  // east then south: policy that goes east on row 0, south on column 1
  Eigen::MatrixXd pi = east;
  pi.row(world.state_at(0, 1)) = south.row(0);
  Rng rng(3);
  Trajectory traj = sample_trajectory(mdp, pi, world.start_state, 100, rng);
  // two moves reach the goal, then exactly one absorbing step is recorded
  REQUIRE(traj.steps.size() == 3);
  CHECK(traj.steps[1].next_state == world.goal_states[0]);
  CHECK(traj.steps[1].reward == doctest::Approx(1.0));
  CHECK(traj.steps.back().state == world.goal_states[0]);
  CHECK(traj.steps.back().next_state == world.goal_states[0]);
}

TEST_CASE("learning rate schedule decays harmonically") {
  EtaSchedule sched{0.2, 100.0};
  CHECK(sched.at(0) == doctest::Approx(0.2));
  CHECK(sched.at(100) == doctest::Approx(0.1));
  CHECK(sched.at(300) == doctest::Approx(0.05));
}

TEST_CASE("q-learning converges on a small gridworld") {
  GridWorld world = parse_gridworld("S..\n..G");
  TabularMDP mdp = gridworld_mdp(world, 0.9, GridRewards{1.0, -0.01});
  ValueIterationResult res = value_iteration(mdp);
  QLearningConfig cfg;
  cfg.episodes = 5000;
  cfg.horizon = 40;
  cfg.epsilon = 0.3;
  // the step size must stay healthy for the full run, or rarely explored
  // corner actions never catch up with the bootstrapped targets
  cfg.eta = EtaSchedule{0.5, 1e5};
  Rng rng(11);
  Eigen::MatrixXd q = q_learning(mdp, cfg, rng);
  CHECK((q - res.q).lpNorm<Eigen::Infinity>() < 0.05);
}

TEST_CASE("named layouts expose the expected state counts") {
  CHECK(four_rooms().n_states() == 68);
  CHECK(two_room_map().n_states() == 31);
  CHECK(linear_track(8).n_states() == 8);
  GridWorld maze = serpentine_maze();
  CHECK(maze.rows == 7);
  CHECK(maze.cols == 7);
  CHECK(maze.state_at(2, 5) == maze.start_state);
  CHECK(maze.goal_states[0] == maze.state_at(0, 4));
}

}  // TEST_SUITE("mdp")
