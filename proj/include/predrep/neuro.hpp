#pragma once

#include <utility>
#include <vector>

#include "predrep/mdp.hpp"
#include "predrep/sr.hpp"

namespace predrep {

// Analysis utilities that read occupancy predictions the way physiology reads
// firing maps: receptive fields, spatial periodicity, field skew on tracks,
// and prioritized replay.

/// A scalar per grid cell.  Wall cells carry 0 so maps stay finite.
struct FieldMap {
  Eigen::MatrixXd values;  // rows x cols of the source GridWorld

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }
};

// ======================== fields ========================

/// Column s_field of M reshaped onto the grid: how much every other state
/// expects to occupy s_field (the unit's receptive field).
FieldMap place_field(const SRMatrix& sr, const GridWorld& world, int s_field);

/// Row s of M reshaped onto the grid: the occupancy prediction made from s
/// (the population activity at s).
FieldMap population_vector(const SRMatrix& sr, const GridWorld& world, int s);

/// Top-k eigenvector maps of the (symmetrized) representation.  Set
/// non_negative to clip at zero, mimicking firing rates.
std::vector<FieldMap> grid_fields(const SRMatrix& sr, const GridWorld& world, int k,
                                  bool non_negative = false);

// ======================== 1D track analysis ========================

struct SkewResult {
  double value = 0.0;  // negative = field extends opposite to motion
  bool flat = false;   // all-equal field, skew undefined
};

/// Center of mass minus peak position along a single-row field, signed so
/// that motion direction is positive.  direction: +1 for increasing column
/// index, -1 for decreasing.
SkewResult skew_metric(const FieldMap& field, int direction);

// ======================== spatial autocorrelation ========================

/// Normalized 2D autocorrelogram of a masked field (walls excluded from both
/// numerator and normalization).  Output is (2 rows - 1) x (2 cols - 1) with
/// the zero-lag coefficient at the center; lags supported by fewer than
/// min_overlap cell pairs are set to 0.
Eigen::MatrixXd autocorrelation(const FieldMap& field, const GridWorld& world,
                                int min_overlap = 20);

/// Local maxima of an autocorrelogram above height, excluding the central
/// peak, sorted by distance from center.  Offsets are (row, col) lags.
std::vector<std::pair<int, int>> autocorr_peaks(const Eigen::MatrixXd& ac, double height);

// ======================== replay ========================

struct ReplayCandidate {
  int state = 0;
  int action = 0;
  double need = 0.0;
  double gain = 0.0;
  double evb = 0.0;  // need * gain, exactly
};

struct ReplayConfig {
  double threshold = 1e-9;   // stop when the best EVB falls below this
  int max_steps = 1000;
  bool old_policy_on_pre_update_q = false;  // evaluate the old greedy policy on
                                            // pre-update instead of post-update Q
  double min_gain = 0.0;  // floor on gain; > 0 lets need alone order backups
                          // when all gains are equal (forward sweeps)
};

/// Score one-step backups by expected value of backup: need is the agent's
/// discounted occupancy of the backup state, gain the policy-improvement
/// value of applying the backup.  Greedy policies split ties uniformly, so a
/// backup that breaks a tie counts as a policy change.  Returned list is
/// sorted by EVB descending (ties by state then action index).
std::vector<ReplayCandidate> replay_priorities(
    const SRMatrix& sr, const Eigen::MatrixXd& q, const TabularMDP& mdp, int agent_state,
    const std::vector<std::pair<int, int>>& candidates, const ReplayConfig& config = {});

struct ReplayTrace {
  std::vector<ReplayCandidate> executed;  // in execution order
  Eigen::MatrixXd q_final;
};

/// Greedily execute the highest-EVB backup, rescore, and repeat until the
/// best candidate drops below the threshold (or max_steps).  Operates on its
/// own copy of Q.
ReplayTrace replay_simulate(const SRMatrix& sr, const Eigen::MatrixXd& q,
                            const TabularMDP& mdp, int agent_state,
                            const std::vector<std::pair<int, int>>& candidates,
                            const ReplayConfig& config = {});

}  // namespace predrep
