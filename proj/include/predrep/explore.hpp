#pragma once

#include <vector>

#include "predrep/mdp.hpp"
#include "predrep/sf.hpp"
#include "predrep/sr.hpp"

namespace predrep {

// Exploration machinery built on predictive representations: spectral
// options, visitation bonuses, posterior value sampling, and landmark maps.

// ======================== spectra ========================

struct EigenBasis {
  Eigen::MatrixXd vectors;  // n_states x k, one eigenvector per column
  Eigen::VectorXd values;   // descending
};

/// Top-k eigenpairs of the symmetrized matrix (M + M')/2.  Symmetrization
/// keeps the spectrum real for non-reversible chains; each vector's first
/// nonzero component is made positive so results are reproducible.
EigenBasis eigen_decompose_sr(const SRMatrix& sr, int k);

/// Intrinsic reward along a transition: e . (phi(s2) - phi(s)).
/// Antisymmetric in (s, s2) and telescoping along trajectories.
double eigenoption_reward(const Eigen::VectorXd& e, const FeatureMap& features, int s, int s2);

// ======================== options ========================

struct OptionDef {
  std::vector<bool> initiation;   // option may start here
  PolicyMatrix policy;
  std::vector<bool> termination;  // option stops on reaching these states
  int eigenvector_index = 0;
};

/// Wrap one eigenvector as an option: exact value iteration on the intrinsic
/// transition-reward MDP, termination wherever the greedy intrinsic value is
/// <= 0, initiation on the complement.
OptionDef eigenoption_from_vector(const TabularMDP& mdp, const Eigen::VectorXd& e,
                                  int eigenvector_index);

/// Uniform random walk over primitive actions plus the given options (options
/// run their policy to termination).  Returns the visited state sequence,
/// n_steps transitions long.
std::vector<int> rollout_with_options(const TabularMDP& mdp,
                                      const std::vector<OptionDef>& options, int n_steps,
                                      Rng& rng);

/// Iterative option discovery.  Each round samples with the options found so
/// far, TD-learns an SR from the stream, and wraps one fresh eigenvector as a
/// new option.  The leading eigenvector of an SR is near-constant and carries
/// no gradient, so round r uses eigenvector index r; vectors are oriented to
/// point away from the current visit density (flipped when the most-visited
/// state sits above the vector's mean), which is what makes the options reach
/// under-explored regions.
std::vector<OptionDef> discover_eigenoptions(const TabularMDP& mdp, int n_rounds,
                                             int samples_per_round, Rng& rng);

// ======================== visitation bonus ========================

/// Inverse L1 norm of the state's occupancy row.  Converged representations
/// give the uniform floor (1 - gamma); rows still near zero during learning
/// give large bonuses.  A zero row returns max_bonus.
double count_bonus(const SRMatrix& sr, int s, double max_bonus = 1.0);

/// Same bonus from an SF (action-averaged row norm); meaningful for
/// non-negative features.
double count_bonus(const SFTensor& sf, int s, double max_bonus = 1.0);

// ======================== posterior sampling ========================

/// Gaussian belief over task weights: w ~ N(mean, cov), rewards observed with
/// variance noise.
struct RewardBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double noise = 1.0;
};

/// One Thompson draw: sample w from the belief and return the Q table psi w.
/// Across draws Q ~ N(Psi mean, Psi cov Psi'); sampling w once is the cheap
/// equivalent of sampling Q jointly.
Eigen::MatrixXd posterior_q_sample(const SFTensor& sf, const RewardBelief& belief, Rng& rng);

// ======================== landmarks ========================

/// Sparse map of the state space: representative states, their visit counts,
/// and learned connectivity for coarse route planning.
struct LandmarkGraph {
  std::vector<int> landmarks;
  std::vector<long long> counts;
  std::vector<std::vector<int>> adjacency;  // indices into landmarks
  double eps_add = -1.0;  // <= 0 selects 0.75 * mean landmark self-similarity

  int size() const { return static_cast<int>(landmarks.size()); }
};

/// Index of the most similar landmark, or -1 when the graph is empty.
int landmark_localize(const LandmarkGraph& graph, const SFTensor& sf_uniform, int s);

/// Insert s as a new landmark iff it is dissimilar (below the add threshold)
/// to every stored landmark.  Returns whether an insertion happened; counts
/// start at 1 and the visited landmark's count increments otherwise.
bool landmark_maybe_add(LandmarkGraph& graph, const SFTensor& sf_uniform, int s);

/// Similarity-greedy step toward a subgoal state: argmax_a S(s, a, subgoal).
int landmark_goal_action(const LandmarkGraph& graph, const SFTensor& sf_uniform, int s,
                         int subgoal);

/// Record an undirected edge between two landmark indices.
void landmark_connect(LandmarkGraph& graph, int i, int j);

/// BFS shortest landmark route (inclusive); empty when unreachable.
std::vector<int> landmark_path(const LandmarkGraph& graph, int from, int to);

/// Draw a landmark index with probability proportional to 1/N(L): rarely
/// visited landmarks are the exploration frontier.
int landmark_sample_frontier(const LandmarkGraph& graph, Rng& rng);

}  // namespace predrep
