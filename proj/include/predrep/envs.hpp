#pragma once

#include <string>

#include "predrep/mdp.hpp"

namespace predrep {

// Small environments shared by tests, demos, and the experiment harness.

/// Two states, two actions, both of which swap the state.  R = [0, 1].
TabularMDP make_swap_chain(double gamma);

/// Two states; action 0 stays, action 1 swaps.  R = [0, 1].
TabularMDP make_stay_swap_chain(double gamma);

/// n states on a ring; action 0 steps clockwise, action 1 counter-clockwise.
/// Rewards zero.
TabularMDP make_ring(int n, double gamma);

/// Dense random MDP: Dirichlet(1) transition rows, standard normal rewards,
/// no terminal states.
TabularMDP random_mdp(int n_states, int n_actions, double gamma, Rng& rng);

/// Random policy with Dirichlet(1) rows.
PolicyMatrix random_policy(int n_states, int n_actions, Rng& rng);

/// Deterministic policy taking the same action everywhere.
PolicyMatrix constant_policy(int n_states, int n_actions, int action);

// ======================== named maps ========================

/// n x n fully open room.
GridWorld square_room(int n);

/// 11x11 bordered map split into four 4x4 rooms joined by four doorways.
GridWorld four_rooms();

/// 6x6 map: two rooms separated by a vertical wall with a single door.
GridWorld two_room_map();

/// 1 x n corridor with the goal at the east end.
GridWorld linear_track(int n);

/// Trapezoidal room rasterized onto a width x height lattice: full height on
/// the west side tapering to a narrow east end.
GridWorld trapezoid_room(int width, int height);

/// 7x7 serpentine demo maze.  The start pocket ('S', state s13 in 1-based
/// row-major numbering) touches the goal corridor through a single neighbor;
/// a dead-end pocket on the same row is reachable only via the long southern
/// loop.  Shipped with fixed gamma and arrival rewards (goal +1, step -0.1)
/// so occupancy numbers quoted in reports are stable.
GridWorld serpentine_maze();
double serpentine_gamma();               // 0.985
GridRewards serpentine_rewards();        // {+1, -0.1}

}  // namespace predrep
