#include "predrep/bayes.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace predrep {

// ======================== Kalman learning ========================

GaussianBelief make_belief(int dim, double prior_var, double process_noise, double obs_noise) {
  if (dim < 1) throw std::invalid_argument("make_belief: need dim >= 1");
  if (prior_var < 0.0 || process_noise < 0.0 || obs_noise <= 0.0) {
    throw std::invalid_argument("make_belief: variances must be non-negative, obs_noise > 0");
  }
  GaussianBelief belief;
  belief.mean = Eigen::VectorXd::Zero(dim);
  belief.cov = prior_var * Eigen::MatrixXd::Identity(dim, dim);
  belief.process_noise = process_noise;
  belief.obs_noise = obs_noise;
  return belief;
}

KalmanDiag kalman_step(GaussianBelief& belief, const Eigen::VectorXd& phi, double r) {
  if (phi.size() != belief.dim()) throw std::invalid_argument("kalman_step: feature size mismatch");
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(belief.cov,
                                                         Eigen::EigenvaluesOnly);
    if (check.eigenvalues().minCoeff() < -1e-10) {
      throw std::invalid_argument("kalman_step: covariance not positive semidefinite");
    }
  }
  belief.cov.diagonal().array() += belief.process_noise;

  KalmanDiag diag;
  diag.error = r - phi.dot(belief.mean);
  diag.innovation_var = phi.dot(belief.cov * phi) + belief.obs_noise;
  diag.gain = (belief.cov * phi) / diag.innovation_var;
  belief.mean += diag.gain * diag.error;
  belief.cov -= diag.innovation_var * diag.gain * diag.gain.transpose();
  belief.cov = 0.5 * (belief.cov + belief.cov.transpose());
  return diag;
}

KalmanDiag kalman_td_step(GaussianBelief& belief, const Eigen::VectorXd& phi_s,
                          const Eigen::VectorXd& phi_s2, double gamma, double r) {
  if (phi_s.size() != phi_s2.size()) {
    throw std::invalid_argument("kalman_td_step: feature size mismatch");
  }
  Eigen::VectorXd h = phi_s - gamma * phi_s2;
  return kalman_step(belief, h, r);
}

// ======================== context priors ========================

Eigen::VectorXd crp_prior(const std::vector<long long>& counts, double alpha) {
  return sticky_crp_prior(counts, alpha, 0.0, -1);
}

Eigen::VectorXd sticky_crp_prior(const std::vector<long long>& counts, double alpha, double nu,
                                 int prev) {
  if (alpha < 0.0 || nu < 0.0) {
    throw std::invalid_argument("sticky_crp_prior: alpha and nu must be non-negative");
  }
  if (prev >= static_cast<int>(counts.size())) {
    throw std::invalid_argument("sticky_crp_prior: prev out of range");
  }
  int k = static_cast<int>(counts.size());
  Eigen::VectorXd weights(k + 1);
  for (int i = 0; i < k; ++i) {
    if (counts[static_cast<std::size_t>(i)] < 0) {
      throw std::invalid_argument("sticky_crp_prior: negative count");
    }
    weights(i) = static_cast<double>(counts[static_cast<std::size_t>(i)]);
  }
  weights(k) = alpha;
  if (prev >= 0) weights(prev) += nu;
  double total = weights.sum();
  if (total <= 0.0) {
    throw std::invalid_argument("sticky_crp_prior: no mass (alpha = 0 with no counts)");
  }
  return weights / total;
}

// ======================== switching context model ========================

ContextModel make_context_model(int dim, ContextParams params) {
  if (dim < 1) throw std::invalid_argument("make_context_model: need dim >= 1");
  if (params.obs_noise <= 0.0 || params.process_noise < 0.0 || params.prior_var < 0.0) {
    throw std::invalid_argument("make_context_model: bad variance parameters");
  }
  ContextModel model;
  model.dim = dim;
  model.params = params;
  return model;
}

namespace {

ContextBank fresh_bank(int dim, const ContextParams& params) {
  ContextBank bank;
  bank.means = Eigen::MatrixXd::Zero(dim, dim);
  bank.cov = params.prior_var * Eigen::MatrixXd::Identity(dim, dim);
  return bank;
}

// Log marginal likelihood of observing y (= phi_s) when each column j is
// predicted as N(h . means_j, h' cov_pred h + obs_noise).
double bank_log_likelihood(const ContextBank& bank, double extra_diag, double obs_noise,
                           const Eigen::VectorXd& h, const Eigen::VectorXd& y) {
  Eigen::VectorXd predicted = bank.means.transpose() * h;
  double var = h.dot(bank.cov * h) + extra_diag * h.squaredNorm() + obs_noise;
  double log_lik = 0.0;
  for (int j = 0; j < y.size(); ++j) {
    double resid = y(j) - predicted(j);
    log_lik += -0.5 * (std::log(2.0 * M_PI * var) + resid * resid / var);
  }
  return log_lik;
}

}  // namespace

ContextStep context_step(ContextModel& model, const Eigen::VectorXd& phi_s,
                         const Eigen::VectorXd& phi_s2, double gamma) {
  if (phi_s.size() != model.dim || phi_s2.size() != model.dim) {
    throw std::invalid_argument("context_step: feature size mismatch");
  }
  Eigen::VectorXd h = phi_s - gamma * phi_s2;
  const ContextParams& p = model.params;
  int k = static_cast<int>(model.banks.size());

  Eigen::VectorXd prior = sticky_crp_prior(model.counts, p.alpha, p.nu, model.previous);
  Eigen::VectorXd log_post(k + 1);
  for (int i = 0; i < k; ++i) {
    // Existing banks predict with their inflated (predict-step) covariance.
    log_post(i) = std::log(prior(i)) +
                  bank_log_likelihood(model.banks[static_cast<std::size_t>(i)], p.process_noise,
                                      p.obs_noise, h, phi_s);
  }
  ContextBank prior_bank = fresh_bank(model.dim, p);
  log_post(k) = prior(k) > 0.0
                    ? std::log(prior(k)) + bank_log_likelihood(prior_bank, 0.0, p.obs_noise, h, phi_s)
                    : -std::numeric_limits<double>::infinity();

  ContextStep step;
  double max_log = log_post.maxCoeff();
  step.posterior = (log_post.array() - max_log).exp();
  step.posterior /= step.posterior.sum();
  log_post.maxCoeff(&step.assigned);
  step.created = step.assigned == k;

  if (step.created) {
    model.banks.push_back(std::move(prior_bank));
    model.counts.push_back(0);
  }
  ContextBank& bank = model.banks[static_cast<std::size_t>(step.assigned)];

  // Shared-gain Kalman update: one predict+gain for the common covariance,
  // one mean correction per predicted feature column.
  bank.cov.diagonal().array() += p.process_noise;
  double innovation_var = h.dot(bank.cov * h) + p.obs_noise;
  Eigen::VectorXd gain = (bank.cov * h) / innovation_var;
  Eigen::VectorXd errors = phi_s - bank.means.transpose() * h;
  bank.means += gain * errors.transpose();
  bank.cov -= innovation_var * gain * gain.transpose();
  bank.cov = 0.5 * (bank.cov + bank.cov.transpose());

  model.counts[static_cast<std::size_t>(step.assigned)] += 1;
  model.previous = step.assigned;
  return step;
}

void elapse_time(ContextModel& model, int n_skip) {
  if (n_skip < 0) throw std::invalid_argument("elapse_time: negative n_skip");
  double inflation = static_cast<double>(n_skip) * model.params.process_noise;
  for (auto& bank : model.banks) bank.cov.diagonal().array() += inflation;
}

}  // namespace predrep
