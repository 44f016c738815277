#pragma once

#include <vector>

#include "predrep/mdp.hpp"

namespace predrep {

// Kalman-filter associative learning: a Gaussian belief over linear reward
// weights, its TD variant with temporally differenced features, and
// nonparametric context inference for switching environments.

// ======================== Kalman learning ========================

struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double process_noise = 0.0;  // added to cov's diagonal before each update
  double obs_noise = 1.0;      // observation variance

  int dim() const { return static_cast<int>(mean.size()); }
};

GaussianBelief make_belief(int dim, double prior_var = 1.0, double process_noise = 0.0,
                           double obs_noise = 1.0);

/// Per-update diagnostics: prediction error, innovation variance, gain.
struct KalmanDiag {
  double error = 0.0;           // delta
  double innovation_var = 0.0;  // lambda
  Eigen::VectorXd gain;         // k
};

/// Conjugate update for one observation r with features phi:
///   cov += qI; delta = r - phi.mean; lambda = phi.cov.phi + obs_noise;
///   k = cov.phi / lambda; mean += k delta; cov -= lambda k k'.
/// The covariance is symmetrized after each step.  Throws on a covariance
/// that is not PSD (eigenvalue below -1e-10).
KalmanDiag kalman_step(GaussianBelief& belief, const Eigen::VectorXd& phi, double r);

/// Same update with features replaced by the discounted temporal difference
/// h = phi_s - gamma * phi_s2; gamma = 0 runs the exact same code path as
/// kalman_step.
KalmanDiag kalman_td_step(GaussianBelief& belief, const Eigen::VectorXd& phi_s,
                          const Eigen::VectorXd& phi_s2, double gamma, double r);

// ======================== context priors ========================

/// Chinese restaurant process over existing contexts plus one new slot:
/// p_k proportional to N_k, p_new proportional to alpha.
Eigen::VectorXd crp_prior(const std::vector<long long>& counts, double alpha);

/// Sticky variant: the most recent context (prev, or -1 for none) gets an
/// extra nu of mass.  nu = 0 reduces to crp_prior.
Eigen::VectorXd sticky_crp_prior(const std::vector<long long>& counts, double alpha, double nu,
                                 int prev);

// ======================== switching context model ========================

struct ContextParams {
  double alpha = 1.0;      // CRP concentration
  double nu = 5.0;         // stickiness
  double process_noise = 0.01;
  double obs_noise = 0.01;  // feature observation variance (std 0.1)
  double prior_var = 1.0;   // isotropic prior covariance per bank
};

/// One belief bank per context: a mean weight column per predicted feature,
/// sharing a single covariance (all columns see the same inputs).
struct ContextBank {
  Eigen::MatrixXd means;  // dim x dim; column j predicts feature j
  Eigen::MatrixXd cov;    // shared dim x dim
};

struct ContextModel {
  std::vector<ContextBank> banks;
  std::vector<long long> counts;
  int previous = -1;
  int dim = 0;
  ContextParams params;
};

ContextModel make_context_model(int dim, ContextParams params = {});

struct ContextStep {
  Eigen::VectorXd posterior;  // over existing contexts + the new slot
  int assigned = 0;           // MAP context index after this observation
  bool created = false;       // the new slot won
};

/// One observation (phi_s, phi_s2): score every context by sticky-CRP prior
/// times the marginal likelihood of phi_s under its predictive distribution
/// for the TD features h = phi_s - gamma phi_s2, hard-assign to the MAP
/// context (creating one if the new slot wins), and Kalman-update only the
/// winner's bank.
ContextStep context_step(ContextModel& model, const Eigen::VectorXd& phi_s,
                         const Eigen::VectorXd& phi_s2, double gamma);

/// Time passing between sessions: n_skip rounds of covariance inflation
/// (cov += q I) applied to every bank; means stay put, so old knowledge is
/// retained but held with growing uncertainty.
void elapse_time(ContextModel& model, int n_skip);

}  // namespace predrep
