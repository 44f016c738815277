#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "predrep/mdp.hpp"
#include "predrep/sr.hpp"

namespace predrep {

// Successor features generalize the SR from state occupancy to arbitrary
// per-state features phi.  With one-hot features they coincide with the
// action-conditioned SR, and Q(s, a, w) = psi(s, a) . w.

/// Per-state features, one row per state.
struct FeatureMap {
  Eigen::MatrixXd phi;  // n_states x n_features

  int n_states() const { return static_cast<int>(phi.rows()); }
  int n_features() const { return static_cast<int>(phi.cols()); }

  static FeatureMap one_hot(int n_states);
};

using TaskVector = Eigen::VectorXd;

/// psi[a](s, .) is the expected discounted feature accumulation when taking a
/// in s and following the generating policy afterwards.
struct SFTensor {
  std::vector<Eigen::MatrixXd> psi;  // per action, n_states x n_features
  double gamma = 0.0;
  int policy_id = -1;

  int n_states() const { return psi.empty() ? 0 : static_cast<int>(psi[0].rows()); }
  int n_actions() const { return static_cast<int>(psi.size()); }
  int n_features() const { return psi.empty() ? 0 : static_cast<int>(psi[0].cols()); }
};

// ======================== task fitting ========================

struct TaskFit {
  TaskVector w;
  double residual = 0.0;  // RMS of phi(s) . w - r over the observations
};

/// Least-squares reward decomposition r(s) ~ phi(s) . w from observed
/// (state, reward) pairs.  The small default ridge keeps the solve
/// well-conditioned; with ridge = 0 a rank-deficient design throws.
TaskFit fit_task_weights(const FeatureMap& features,
                         const std::vector<std::pair<int, double>>& observations,
                         double ridge = 1e-8);

// ======================== solvers ========================

/// psi_a = T_a (Phi + gamma Psi_state) with Psi_state from a direct solve of
/// the policy-averaged fixed point.
SFTensor sf_closed_form(const TabularMDP& mdp, const PolicyMatrix& policy,
                        const FeatureMap& features);

/// On-policy TD update for the (s, a) row:
///   psi(s, a) += eta * (phi(s2) + gamma psi(s2, a2) - psi(s, a))
void sf_td_step(SFTensor& est, const FeatureMap& features, int s, int a, int s2, int a2,
                double eta);

/// Q(s, a) = psi(s, a) . w
Eigen::MatrixXd q_from_sf(const SFTensor& sf, const TaskVector& w);

// ======================== policy reuse ========================

struct GpiChoice {
  int action = 0;
  int policy_index = 0;  // which library entry achieved the max
  double q = 0.0;
};

/// Generalized policy improvement: argmax over actions of the best library
/// policy's Q for the task w.  Ties prefer the lower policy index, then the
/// lower action index, so reports are reproducible.
GpiChoice gpi_action(const std::vector<SFTensor>& library, const TaskVector& w, int s);

/// State-dependent task preference g(s, w_new) -> w_s.
using PreferenceFn = std::function<TaskVector(int, const TaskVector&)>;

/// GPI with the task vector remapped per state; constant g reduces exactly to
/// gpi_action.  Switching w_s across regions chains library policies.
int option_keyboard_action(const std::vector<SFTensor>& library, const PreferenceFn& g,
                           int s, const TaskVector& w_new);

// ======================== similarity ========================

/// Successor-feature similarity under a uniform behavior policy:
///   S(s1, s2)    = mean_a psi(s1, a) . mean_a psi(s2, a)
///   S(s1, a, s2) = psi(s1, a) . mean_a psi(s2, a)     (pass a >= 0)
/// The state-only form is a symmetric PSD kernel.
double sf_similarity(const SFTensor& sf_uniform, int s1, int s2, int a = -1);

}  // namespace predrep
