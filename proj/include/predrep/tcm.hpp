#pragma once

#include "predrep/mdp.hpp"
#include "predrep/sr.hpp"

namespace predrep {

// Temporal context machinery: a drifting recency-weighted context vector,
// Hebbian and TD-corrected association learning between stimuli and context,
// and a sampling evaluator that spans the range from occupancy-model lookups
// (frozen context) to Monte Carlo rollouts (fully drifting context).

/// Exponentially drifting blend of recent stimulus vectors.
struct ContextVector {
  Eigen::VectorXd c;
  double omega = 1.0;  // drift rate in [0, 1]: 1 replaces, 0 freezes
};

ContextVector make_context(int dim, double omega);

/// c <- (1 - omega) c + omega phi
void context_update(ContextVector& context, const Eigen::Ref<const Eigen::VectorXd>& phi);

enum class AssocMode { hebbian, td };

/// Learned association strengths.  Hebbian mode binds stimuli (rows) to the
/// contexts they occurred in (columns); TD mode is oriented like an SR
/// estimate (row = predecessor, column = successor) and is error-corrected.
struct AssociationMatrix {
  Eigen::MatrixXd m;
  AssocMode mode = AssocMode::td;
  double gamma = 0.0;  // discount baked into TD-mode associations
};

AssociationMatrix make_association(int n_rows, int n_cols, AssocMode mode, double gamma = 0.0);

/// Outer-product binding: m += rate * phi c'.  Strictly additive; repeated
/// pairings grow without bound (no error correction).  Callers drift the
/// context after, not before, so the stimulus binds to the context it arrived
/// in.
void tcm_hebbian_update(AssociationMatrix& assoc, const Eigen::Ref<const Eigen::VectorXd>& phi,
                        const ContextVector& context, double rate);

/// Error-corrected association update for the transition s -> s2 with the
/// context acting as an eligibility trace over rows.  With omega = 1 and
/// one-hot stimuli the context is one-hot and this runs the identical code
/// path as the plain occupancy TD step.
void tcm_td_update(AssociationMatrix& assoc, int s, int s2, const ContextVector& context,
                   double rate);

/// Same, with a per-state rate multiplier keyed by the arrival state; states
/// tagged salient (multiplier > 1) imprint faster and end up overweighted in
/// later evaluation.
void tcm_td_update(AssociationMatrix& assoc, int s, int s2, const ContextVector& context,
                   double rate, const Eigen::Ref<const Eigen::VectorXd>& salience);

// ======================== sampling evaluator ========================

struct TcmEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int n = 0;
  long long clamped = 0;            // negative association weights zeroed
  long long uniform_fallbacks = 0;  // all-zero retrieval rows sampled uniformly
};

/// Estimate a value at query by repeatedly retrieving states through the
/// association matrix and the drifting context.  omega = 0 keeps the context
/// at the query and draws i.i.d. samples from the query's normalized
/// association row (occupancy-model regime); omega = 1 lets the context track
/// each sampled state so draws chain into a rollout whose discounted return
/// is scored with gamma (Monte Carlo regime).  Intermediate omega blends the
/// two endpoint scores linearly; only the endpoints carry an unbiasedness
/// claim.  Rollout scores are truncated at depth and rescaled by
/// 1/(1 - gamma^depth), which is exact for cycles whose period divides depth.
/// An initial context other than the query's own features may be supplied
/// (retrieval cue distinct from the query).
TcmEstimate tcm_sr_evaluate(const AssociationMatrix& assoc, const Eigen::VectorXd& reward,
                            int query, double omega, double gamma, int n_samples, int depth,
                            Rng& rng, const Eigen::VectorXd* initial_context = nullptr);

}  // namespace predrep
