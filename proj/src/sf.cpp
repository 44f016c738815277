#include "predrep/sf.hpp"

#include <cmath>
#include <stdexcept>

namespace predrep {

FeatureMap FeatureMap::one_hot(int n_states) {
  if (n_states < 1) throw std::invalid_argument("FeatureMap::one_hot: need n_states >= 1");
  return FeatureMap{Eigen::MatrixXd::Identity(n_states, n_states)};
}

// ======================== task fitting ========================

TaskFit fit_task_weights(const FeatureMap& features,
                         const std::vector<std::pair<int, double>>& observations,
                         double ridge) {
  if (observations.empty()) throw std::invalid_argument("fit_task_weights: no observations");
  if (ridge < 0.0) throw std::invalid_argument("fit_task_weights: negative ridge");
  int d = features.n_features();
  Eigen::MatrixXd design(static_cast<Eigen::Index>(observations.size()), d);
  Eigen::VectorXd target(static_cast<Eigen::Index>(observations.size()));
  for (std::size_t i = 0; i < observations.size(); ++i) {
    auto [s, r] = observations[i];
    if (s < 0 || s >= features.n_states()) {
      throw std::invalid_argument("fit_task_weights: state out of range");
    }
    design.row(static_cast<Eigen::Index>(i)) = features.phi.row(s);
    target(static_cast<Eigen::Index>(i)) = r;
  }

  TaskFit fit;
  if (ridge == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < d) {
      throw std::invalid_argument("fit_task_weights: rank-deficient design needs ridge > 0");
    }
    fit.w = qr.solve(target);
  } else {
    Eigen::MatrixXd gram = design.transpose() * design;
    gram.diagonal().array() += ridge;
    fit.w = gram.ldlt().solve(design.transpose() * target);
  }
  fit.residual = std::sqrt((design * fit.w - target).squaredNorm() /
                           static_cast<double>(observations.size()));
  return fit;
}

// ======================== solvers ========================

SFTensor sf_closed_form(const TabularMDP& mdp, const PolicyMatrix& policy,
                        const FeatureMap& features) {
  validate_policy(mdp, policy);
  if (features.n_states() != mdp.n_states()) {
    throw std::invalid_argument("sf_closed_form: feature rows != states");
  }
  int n = mdp.n_states();
  Eigen::MatrixXd t = policy_transition_matrix(mdp, policy);
  // Psi_state = T Phi + gamma T Psi_state, the feature-space analog of the SR.
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - mdp.gamma * t;
  Eigen::MatrixXd psi_state = lhs.partialPivLu().solve(t * features.phi);
  Eigen::MatrixXd successor = features.phi + mdp.gamma * psi_state;
  SFTensor sf;
  sf.gamma = mdp.gamma;
  sf.psi.reserve(mdp.transition.size());
  for (const auto& ta : mdp.transition) sf.psi.push_back(ta * successor);
  return sf;
}

void sf_td_step(SFTensor& est, const FeatureMap& features, int s, int a, int s2, int a2,
                double eta) {
  if (a < 0 || a >= est.n_actions() || a2 < 0 || a2 >= est.n_actions()) {
    throw std::invalid_argument("sf_td_step: action out of range");
  }
  if (s < 0 || s >= est.n_states() || s2 < 0 || s2 >= est.n_states()) {
    throw std::invalid_argument("sf_td_step: state out of range");
  }
  Eigen::RowVectorXd delta = features.phi.row(s2) +
                             est.gamma * est.psi[static_cast<std::size_t>(a2)].row(s2) -
                             est.psi[static_cast<std::size_t>(a)].row(s);
  est.psi[static_cast<std::size_t>(a)].row(s) += eta * delta;
}

Eigen::MatrixXd q_from_sf(const SFTensor& sf, const TaskVector& w) {
  if (w.size() != sf.n_features()) throw std::invalid_argument("q_from_sf: task size mismatch");
  Eigen::MatrixXd q(sf.n_states(), sf.n_actions());
  for (int a = 0; a < sf.n_actions(); ++a) q.col(a) = sf.psi[static_cast<std::size_t>(a)] * w;
  return q;
}

// ======================== policy reuse ========================

GpiChoice gpi_action(const std::vector<SFTensor>& library, const TaskVector& w, int s) {
  if (library.empty()) throw std::invalid_argument("gpi_action: empty library");
  GpiChoice best;
  bool first = true;
  for (std::size_t i = 0; i < library.size(); ++i) {
    const SFTensor& sf = library[i];
    if (s < 0 || s >= sf.n_states()) throw std::invalid_argument("gpi_action: state out of range");
    if (w.size() != sf.n_features()) throw std::invalid_argument("gpi_action: task size mismatch");
    for (int a = 0; a < sf.n_actions(); ++a) {
      double q = sf.psi[static_cast<std::size_t>(a)].row(s).dot(w);
      if (first || q > best.q) {
        best = GpiChoice{a, static_cast<int>(i), q};
        first = false;
      }
    }
  }
  return best;
}

int option_keyboard_action(const std::vector<SFTensor>& library, const PreferenceFn& g,
                           int s, const TaskVector& w_new) {
  if (!g) throw std::invalid_argument("option_keyboard_action: missing preference function");
  return gpi_action(library, g(s, w_new), s).action;
}

// ======================== similarity ========================

namespace {

Eigen::RowVectorXd mean_sf_row(const SFTensor& sf, int s) {
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(sf.n_features());
  for (const auto& psi : sf.psi) acc += psi.row(s);
  return acc / sf.n_actions();
}

}  // namespace

double sf_similarity(const SFTensor& sf_uniform, int s1, int s2, int a) {
  if (s1 < 0 || s1 >= sf_uniform.n_states() || s2 < 0 || s2 >= sf_uniform.n_states()) {
    throw std::invalid_argument("sf_similarity: state out of range");
  }
  if (a >= sf_uniform.n_actions()) throw std::invalid_argument("sf_similarity: action out of range");
  Eigen::RowVectorXd rhs = mean_sf_row(sf_uniform, s2);
  Eigen::RowVectorXd lhs =
      a < 0 ? mean_sf_row(sf_uniform, s1) : sf_uniform.psi[static_cast<std::size_t>(a)].row(s1);
  return lhs.dot(rhs);
}

}  // namespace predrep
