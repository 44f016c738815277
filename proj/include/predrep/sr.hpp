#pragma once

#include <vector>

#include "predrep/mdp.hpp"

namespace predrep {

// Successor representation under the arrival-reward convention.  M(s, s2) is
// the expected discounted count of future arrivals in s2 when starting from s,
// with the first step weighted 1:
//
//   M(s, s2) = sum_{t>=1} gamma^{t-1} P(s_t = s2 | s_0 = s)
//
// so M = T (I - gamma T)^(-1), every row sums to 1/(1 - gamma), and
// V = M R reproduces exact policy evaluation.

struct SRMatrix {
  Eigen::MatrixXd m;  // n_states x n_states
  double gamma = 0.0;
  int policy_id = -1;  // optional provenance tag carried into exports

  int n_states() const { return static_cast<int>(m.rows()); }
};

/// Action-conditioned variant: m[a](s, s2) fixes the first action and follows
/// the policy afterwards.  At gamma = 0 it reduces to the transition kernel.
struct ActionSR {
  std::vector<Eigen::MatrixXd> m;  // per action, n_states x n_states
  double gamma = 0.0;

  int n_states() const { return m.empty() ? 0 : static_cast<int>(m[0].rows()); }
  int n_actions() const { return static_cast<int>(m.size()); }
};

/// Normalized successor representation: mu = (1 - gamma) M.  Rows are
/// probability distributions over future occupancy and can be sampled.
struct SuccessorModel {
  Eigen::MatrixXd mu;
  double gamma = 0.0;

  int n_states() const { return static_cast<int>(mu.rows()); }
};

struct ActionSuccessorModel {
  std::vector<Eigen::MatrixXd> mu;  // per action
  double gamma = 0.0;

  int n_states() const { return mu.empty() ? 0 : static_cast<int>(mu[0].rows()); }
  int n_actions() const { return static_cast<int>(mu.size()); }
};

// ======================== exact solvers ========================

/// M = T_pi (I - gamma T_pi)^(-1) by direct linear solve.
SRMatrix sr_closed_form(const TabularMDP& mdp, const PolicyMatrix& policy);

/// M_a = T_a (I + gamma M_pi) for each action.
ActionSR sr_action_closed_form(const TabularMDP& mdp, const PolicyMatrix& policy);

Eigen::VectorXd value_from_sr(const SRMatrix& sr, const Eigen::VectorXd& reward);

/// Q(s, a) = M_a(s, .) . R
Eigen::MatrixXd q_from_action_sr(const ActionSR& sr, const Eigen::VectorXd& reward);

// ======================== TD learning ========================

/// Fresh TD estimate.  Zero initialization makes growing row mass a usable
/// convergence signal; an identity start is available for callers who want
/// the self-visit prior instead.
SRMatrix sr_td_init(int n_states, double gamma, bool identity = false);

/// TD error vector for the transition s -> s2:
///   delta(s2') = I[s2' = s2] + gamma M(s2, s2') - M(s, s2')
Eigen::VectorXd sr_td_delta(const SRMatrix& est, int s, int s2);

/// Tabular row update: M(s, .) += eta * delta.
void sr_td_step(SRMatrix& est, int s, int s2, double eta);

/// Credit-broadcast update: every state i with nonzero credit receives
/// M(i, .) += eta * credit(i) * delta.  With one-hot credit at s this is
/// exactly the tabular row update (bit for bit).  Temporal-context learners
/// pass their drifting context as credit.
void sr_td_step(SRMatrix& est, int s, int s2, double eta,
                const Eigen::Ref<const Eigen::VectorXd>& credit);

/// Online TD learning along one long on-policy trajectory starting from a
/// uniform random state.  Terminal absorptions update once and then teleport
/// to a random non-terminal state so every row keeps getting visits.
SRMatrix sr_td_learn(const TabularMDP& mdp, const PolicyMatrix& policy,
                     long long n_steps, const EtaSchedule& schedule, Rng& rng);

// ======================== successor models ========================

/// mu = (1 - gamma) M.  Throws if the rows of M do not sum to 1/(1 - gamma)
/// (within 1e-6 after normalization): only a converged representation yields
/// a valid distribution.
SuccessorModel successor_model(const SRMatrix& sr);
ActionSuccessorModel successor_model(const ActionSR& sr);

/// Draw a future state from row s.
int sm_sample(const SuccessorModel& sm, int s, Rng& rng);
int sm_sample(const ActionSuccessorModel& sm, int s, int a, Rng& rng);

// ======================== geometric policy composition ========================

/// Monte Carlo value of a composite process that follows each policy in turn,
/// switching on a geometric clock, and sticks with the last policy forever.
///
/// Phase i < n draws its jump from the short-horizon model of policies[i-1]
/// (discount beta); the final phase draws from the long-horizon model of the
/// last policy (discount gamma).  Each sampled state contributes
///   c_{i-1} R(s_i) / (1 - beta),   c_i = ((gamma - beta) / (1 - beta))^i
/// and the final one c_{n-1} R(s_n) / (1 - gamma).  The expectation equals the
/// composite-policy action value at (s0, a0).
///
/// short_sms must hold at least policies.size() - 1 models (one per
/// non-final policy, in order); beta > gamma is an error, beta = gamma is the
/// degenerate single-phase case.
McEstimate gpc_rollout(const std::vector<ActionSuccessorModel>& short_sms,
                       const ActionSuccessorModel& long_sm,
                       const std::vector<PolicyMatrix>& policies,
                       int s0, int a0, int n_samples,
                       const Eigen::VectorXd& reward, Rng& rng);

}  // namespace predrep
