#include "predrep/sr.hpp"

#include <cmath>
#include <stdexcept>

namespace predrep {

namespace {

void check_state(const char* who, int s, int n) {
  if (s < 0 || s >= n) throw std::invalid_argument(std::string(who) + ": state out of range");
}

}  // namespace

// ======================== exact solvers ========================

SRMatrix sr_closed_form(const TabularMDP& mdp, const PolicyMatrix& policy) {
  validate_policy(mdp, policy);
  int n = mdp.n_states();
  Eigen::MatrixXd t = policy_transition_matrix(mdp, policy);
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - mdp.gamma * t;
  // M (I - gamma T) = T, solved row-wise via the transposed system.
  Eigen::MatrixXd m = lhs.transpose().partialPivLu().solve(t.transpose()).transpose();
  return SRMatrix{std::move(m), mdp.gamma};
}

ActionSR sr_action_closed_form(const TabularMDP& mdp, const PolicyMatrix& policy) {
  SRMatrix state_sr = sr_closed_form(mdp, policy);
  int n = mdp.n_states();
  Eigen::MatrixXd successor = Eigen::MatrixXd::Identity(n, n) + mdp.gamma * state_sr.m;
  ActionSR out;
  out.gamma = mdp.gamma;
  out.m.reserve(mdp.transition.size());
  for (const auto& t : mdp.transition) out.m.push_back(t * successor);
  return out;
}

Eigen::VectorXd value_from_sr(const SRMatrix& sr, const Eigen::VectorXd& reward) {
  if (reward.size() != sr.m.cols()) {
    throw std::invalid_argument("value_from_sr: reward size mismatch");
  }
  return sr.m * reward;
}

Eigen::MatrixXd q_from_action_sr(const ActionSR& sr, const Eigen::VectorXd& reward) {
  if (sr.m.empty()) throw std::invalid_argument("q_from_action_sr: empty representation");
  if (reward.size() != sr.m[0].cols()) {
    throw std::invalid_argument("q_from_action_sr: reward size mismatch");
  }
  Eigen::MatrixXd q(sr.n_states(), sr.n_actions());
  for (int a = 0; a < sr.n_actions(); ++a) q.col(a) = sr.m[static_cast<std::size_t>(a)] * reward;
  return q;
}

// ======================== TD learning ========================

SRMatrix sr_td_init(int n_states, double gamma, bool identity) {
  if (n_states < 1) throw std::invalid_argument("sr_td_init: need at least one state");
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("sr_td_init: gamma outside [0, 1)");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_states, n_states);
  if (identity) m.setIdentity();
  return SRMatrix{std::move(m), gamma};
}

Eigen::VectorXd sr_td_delta(const SRMatrix& est, int s, int s2) {
  check_state("sr_td_delta", s, est.n_states());
  check_state("sr_td_delta", s2, est.n_states());
  Eigen::VectorXd delta = est.gamma * est.m.row(s2) - est.m.row(s);
  delta(s2) += 1.0;
  return delta;
}

void sr_td_step(SRMatrix& est, int s, int s2, double eta) {
  Eigen::VectorXd delta = sr_td_delta(est, s, s2);
  est.m.row(s) += eta * delta.transpose();
}

void sr_td_step(SRMatrix& est, int s, int s2, double eta,
                const Eigen::Ref<const Eigen::VectorXd>& credit) {
  if (credit.size() != est.n_states()) {
    throw std::invalid_argument("sr_td_step: credit size mismatch");
  }
  Eigen::VectorXd delta = sr_td_delta(est, s, s2);
  for (int i = 0; i < credit.size(); ++i) {
    if (credit(i) == 0.0) continue;  // keeps one-hot credit identical to the row update
    est.m.row(i) += (eta * credit(i)) * delta.transpose();
  }
}

SRMatrix sr_td_learn(const TabularMDP& mdp, const PolicyMatrix& policy,
                     long long n_steps, const EtaSchedule& schedule, Rng& rng) {
  validate_policy(mdp, policy);
  int n = mdp.n_states();
  SRMatrix est{Eigen::MatrixXd::Zero(n, n), mdp.gamma};

  auto random_nonterminal = [&]() {
    for (;;) {
      int s = rng.uniform_below(n);
      if (!mdp.terminal[static_cast<std::size_t>(s)]) return s;
    }
  };

  int s = random_nonterminal();
  for (long long step = 0; step < n_steps; ++step) {
    int a = rng.categorical(policy.row(s).transpose());
    int s2 = rng.categorical(mdp.transition[static_cast<std::size_t>(a)].row(s).transpose());
    sr_td_step(est, s, s2, schedule.at(step));
    s = mdp.terminal[static_cast<std::size_t>(s2)] ? random_nonterminal() : s2;
  }
  return est;
}

// ======================== successor models ========================

namespace {

Eigen::MatrixXd normalized_occupancy(const Eigen::MatrixXd& m, double gamma, const char* who) {
  Eigen::MatrixXd mu = (1.0 - gamma) * m;
  for (int s = 0; s < mu.rows(); ++s) {
    if (std::abs(mu.row(s).sum() - 1.0) > 1e-6) {
      throw std::invalid_argument(std::string(who) +
                                  ": row mass != 1/(1 - gamma); representation not converged");
    }
  }
  return mu;
}

}  // namespace

SuccessorModel successor_model(const SRMatrix& sr) {
  return SuccessorModel{normalized_occupancy(sr.m, sr.gamma, "successor_model"), sr.gamma};
}

ActionSuccessorModel successor_model(const ActionSR& sr) {
  ActionSuccessorModel out;
  out.gamma = sr.gamma;
  out.mu.reserve(sr.m.size());
  for (const auto& m : sr.m) {
    out.mu.push_back(normalized_occupancy(m, sr.gamma, "successor_model"));
  }
  return out;
}

int sm_sample(const SuccessorModel& sm, int s, Rng& rng) {
  check_state("sm_sample", s, sm.n_states());
  return rng.categorical(sm.mu.row(s).transpose());
}

int sm_sample(const ActionSuccessorModel& sm, int s, int a, Rng& rng) {
  check_state("sm_sample", s, sm.n_states());
  if (a < 0 || a >= sm.n_actions()) throw std::invalid_argument("sm_sample: action out of range");
  return rng.categorical(sm.mu[static_cast<std::size_t>(a)].row(s).transpose());
}

// ======================== geometric policy composition ========================

McEstimate gpc_rollout(const std::vector<ActionSuccessorModel>& short_sms,
                       const ActionSuccessorModel& long_sm,
                       const std::vector<PolicyMatrix>& policies,
                       int s0, int a0, int n_samples,
                       const Eigen::VectorXd& reward, Rng& rng) {
  int n = static_cast<int>(policies.size());
  if (n < 1) throw std::invalid_argument("gpc_rollout: need at least one policy");
  if (static_cast<int>(short_sms.size()) < n - 1) {
    throw std::invalid_argument("gpc_rollout: need a short-horizon model per non-final policy");
  }
  if (n_samples < 1) throw std::invalid_argument("gpc_rollout: need n_samples >= 1");
  double gamma = long_sm.gamma;
  double beta = n > 1 ? short_sms[0].gamma : gamma;
  for (int i = 0; i + 1 < n; ++i) {
    if (short_sms[static_cast<std::size_t>(i)].gamma != beta) {
      throw std::invalid_argument("gpc_rollout: short-horizon discounts differ");
    }
  }
  if (beta > gamma) {
    throw std::invalid_argument("gpc_rollout: switching discount must not exceed the evaluation discount");
  }
  check_state("gpc_rollout", s0, long_sm.n_states());
  if (a0 < 0 || a0 >= long_sm.n_actions()) {
    throw std::invalid_argument("gpc_rollout: action out of range");
  }
  if (reward.size() != long_sm.n_states()) {
    throw std::invalid_argument("gpc_rollout: reward size mismatch");
  }

  double decay = (gamma - beta) / (1.0 - beta);
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    double total = 0.0;
    double weight = 1.0;  // c_i at phase i, starting from c_0 = 1
    int s = s0, a = a0;
    for (int i = 0; i + 1 < n; ++i) {
      s = sm_sample(short_sms[static_cast<std::size_t>(i)], s, a, rng);
      total += weight * reward(s) / (1.0 - beta);
      a = rng.categorical(policies[static_cast<std::size_t>(i) + 1].row(s).transpose());
      weight *= decay;
    }
    s = sm_sample(long_sm, s, a, rng);
    total += weight * reward(s) / (1.0 - gamma);
    sum += total;
    sum_sq += total * total;
  }

  McEstimate out;
  out.n = n_samples;
  out.mean = sum / n_samples;
  if (n_samples > 1) {
    double var = (sum_sq - sum * sum / n_samples) / (n_samples - 1);
    out.std_error = std::sqrt(std::max(0.0, var) / n_samples);
  }
  return out;
}

}  // namespace predrep
