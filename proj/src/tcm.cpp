#include "predrep/tcm.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace predrep {

ContextVector make_context(int dim, double omega) {
  if (dim < 1) throw std::invalid_argument("make_context: need dim >= 1");
  if (omega < 0.0 || omega > 1.0) throw std::invalid_argument("make_context: omega outside [0, 1]");
  return ContextVector{Eigen::VectorXd::Zero(dim), omega};
}

void context_update(ContextVector& context, const Eigen::Ref<const Eigen::VectorXd>& phi) {
  if (phi.size() != context.c.size()) {
    throw std::invalid_argument("context_update: dimension mismatch");
  }
  context.c = (1.0 - context.omega) * context.c + context.omega * phi;
}

AssociationMatrix make_association(int n_rows, int n_cols, AssocMode mode, double gamma) {
  if (n_rows < 1 || n_cols < 1) throw std::invalid_argument("make_association: bad shape");
  if (mode == AssocMode::td && n_rows != n_cols) {
    throw std::invalid_argument("make_association: TD associations must be square");
  }
  return AssociationMatrix{Eigen::MatrixXd::Zero(n_rows, n_cols), mode, gamma};
}

void tcm_hebbian_update(AssociationMatrix& assoc, const Eigen::Ref<const Eigen::VectorXd>& phi,
                        const ContextVector& context, double rate) {
  if (assoc.mode != AssocMode::hebbian) {
    throw std::invalid_argument("tcm_hebbian_update: association not in hebbian mode");
  }
  if (phi.size() != assoc.m.rows() || context.c.size() != assoc.m.cols()) {
    throw std::invalid_argument("tcm_hebbian_update: dimension mismatch");
  }
  assoc.m += rate * phi * context.c.transpose();
}

namespace {

void td_update_impl(AssociationMatrix& assoc, int s, int s2, const ContextVector& context,
                    double rate) {
  if (assoc.mode != AssocMode::td) {
    throw std::invalid_argument("tcm_td_update: association not in td mode");
  }
  // Borrow the matrix into an occupancy estimate so both learners share one
  // update kernel, then hand it back; no copies happen.
  SRMatrix view{std::move(assoc.m), assoc.gamma};
  sr_td_step(view, s, s2, rate, context.c);
  assoc.m = std::move(view.m);
}

}  // namespace

void tcm_td_update(AssociationMatrix& assoc, int s, int s2, const ContextVector& context,
                   double rate) {
  td_update_impl(assoc, s, s2, context, rate);
}

void tcm_td_update(AssociationMatrix& assoc, int s, int s2, const ContextVector& context,
                   double rate, const Eigen::Ref<const Eigen::VectorXd>& salience) {
  if (salience.size() != assoc.m.rows()) {
    throw std::invalid_argument("tcm_td_update: salience size mismatch");
  }
  td_update_impl(assoc, s, s2, context, rate * salience(s2));
}

// ======================== sampling evaluator ========================

TcmEstimate tcm_sr_evaluate(const AssociationMatrix& assoc, const Eigen::VectorXd& reward,
                            int query, double omega, double gamma, int n_samples, int depth,
                            Rng& rng, const Eigen::VectorXd* initial_context) {
  int n = static_cast<int>(assoc.m.rows());
  if (assoc.m.cols() != n) {
    throw std::invalid_argument("tcm_sr_evaluate: association matrix must be square");
  }
  if (reward.size() != n) throw std::invalid_argument("tcm_sr_evaluate: reward size mismatch");
  if (query < 0 || query >= n) throw std::invalid_argument("tcm_sr_evaluate: query out of range");
  if (omega < 0.0 || omega > 1.0) throw std::invalid_argument("tcm_sr_evaluate: omega outside [0, 1]");
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("tcm_sr_evaluate: gamma outside [0, 1)");
  if (n_samples < 1 || depth < 1) {
    throw std::invalid_argument("tcm_sr_evaluate: need n_samples >= 1 and depth >= 1");
  }
  if (initial_context && initial_context->size() != n) {
    throw std::invalid_argument("tcm_sr_evaluate: initial context size mismatch");
  }

  TcmEstimate est;
  est.n = n_samples;
  double truncation = 1.0 - std::pow(gamma, depth);

  double sum = 0.0, sum_sq = 0.0;
  for (int run = 0; run < n_samples; ++run) {
    ContextVector context{initial_context ? *initial_context
                                          : Eigen::VectorXd::Unit(n, query),
                          omega};
    double row_mass = 0.0;   // clamped retrieval mass at the query, scales the
                             // occupancy-model score back to unnormalized units
    double reward_sum = 0.0;
    double discounted = 0.0;
    double discount = 1.0;
    for (int tau = 0; tau < depth; ++tau) {
      Eigen::VectorXd weights = assoc.mode == AssocMode::td
                                    ? Eigen::VectorXd(assoc.m.transpose() * context.c)
                                    : Eigen::VectorXd(assoc.m * context.c);
      for (int i = 0; i < n; ++i) {
        if (weights(i) < 0.0) {
          weights(i) = 0.0;
          ++est.clamped;
        }
      }
      double mass = weights.sum();
      if (mass <= 0.0) {
        weights.setOnes();
        ++est.uniform_fallbacks;
        mass = 0.0;
      }
      if (tau == 0) row_mass = mass;
      int sampled = rng.categorical(weights);
      reward_sum += reward(sampled);
      discounted += discount * reward(sampled);
      discount *= gamma;
      context_update(context, Eigen::VectorXd::Unit(n, sampled));
    }
    double occupancy_score = row_mass * reward_sum / depth;
    double rollout_score = truncation > 0.0 ? discounted / truncation : discounted;
    double blended = (1.0 - omega) * occupancy_score + omega * rollout_score;
    sum += blended;
    sum_sq += blended * blended;
  }

  est.mean = sum / n_samples;
  if (n_samples > 1) {
    double var = (sum_sq - sum * sum / n_samples) / (n_samples - 1);
    est.std_error = std::sqrt(std::max(0.0, var) / n_samples);
  }
  return est;
}

}  // namespace predrep
