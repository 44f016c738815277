#include "predrep/explore.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace predrep {

// ======================== spectra ========================

EigenBasis eigen_decompose_sr(const SRMatrix& sr, int k) {
  int n = sr.n_states();
  if (k < 1 || k > n) throw std::invalid_argument("eigen_decompose_sr: k out of range");
  if (!sr.m.allFinite()) throw std::invalid_argument("eigen_decompose_sr: non-finite entries");
  Eigen::MatrixXd sym = 0.5 * (sr.m + sr.m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigen_decompose_sr: eigensolver failed");
  }

  EigenBasis basis;
  basis.vectors.resize(n, k);
  basis.values.resize(k);
  // Eigen returns ascending order; take the top k from the back.
  for (int j = 0; j < k; ++j) {
    int src = n - 1 - j;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    for (int i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    basis.vectors.col(j) = v;
    basis.values(j) = solver.eigenvalues()(src);
  }
  return basis;
}

double eigenoption_reward(const Eigen::VectorXd& e, const FeatureMap& features, int s, int s2) {
  if (e.size() != features.n_features()) {
    throw std::invalid_argument("eigenoption_reward: dimension mismatch");
  }
  if (s < 0 || s >= features.n_states() || s2 < 0 || s2 >= features.n_states()) {
    throw std::invalid_argument("eigenoption_reward: state out of range");
  }
  return e.dot(features.phi.row(s2) - features.phi.row(s));
}

// ======================== options ========================

OptionDef eigenoption_from_vector(const TabularMDP& mdp, const Eigen::VectorXd& e,
                                  int eigenvector_index) {
  int n = mdp.n_states();
  int na = mdp.n_actions();
  if (e.size() != n) throw std::invalid_argument("eigenoption_from_vector: dimension mismatch");

  // Value iteration with the transition reward e(s2) - e(s).
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd q(n, na);
  for (int iter = 0;; ++iter) {
    if (iter >= 1000000) {
      throw std::runtime_error("eigenoption_from_vector: value iteration failed to converge");
    }
    for (int a = 0; a < na; ++a) {
      const Eigen::MatrixXd& t = mdp.transition[static_cast<std::size_t>(a)];
      q.col(a) = t * (e + mdp.gamma * v) - e;
    }
    Eigen::VectorXd next = q.rowwise().maxCoeff();
    double change = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (change <= 1e-12) break;
  }

  OptionDef opt;
  opt.eigenvector_index = eigenvector_index;
  opt.policy = greedy_policy(q);
  opt.termination.resize(static_cast<std::size_t>(n));
  opt.initiation.resize(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    bool stop = v(s) <= 0.0;  // nothing left to climb
    opt.termination[static_cast<std::size_t>(s)] = stop;
    opt.initiation[static_cast<std::size_t>(s)] = !stop;
  }
  return opt;
}

std::vector<int> rollout_with_options(const TabularMDP& mdp,
                                      const std::vector<OptionDef>& options, int n_steps,
                                      Rng& rng) {
  int n = mdp.n_states();
  int na = mdp.n_actions();
  int n_choices = na + static_cast<int>(options.size());

  auto primitive_step = [&](int s, int a) {
    return rng.categorical(mdp.transition[static_cast<std::size_t>(a)].row(s).transpose());
  };

  std::vector<int> visited;
  visited.reserve(static_cast<std::size_t>(n_steps) + 1);
  int s = rng.uniform_below(n);
  visited.push_back(s);
  while (static_cast<int>(visited.size()) <= n_steps) {
    int choice = rng.uniform_below(n_choices);
    if (choice < na) {
      s = primitive_step(s, choice);
      visited.push_back(s);
      continue;
    }
    const OptionDef& opt = options[static_cast<std::size_t>(choice - na)];
    if (opt.termination[static_cast<std::size_t>(s)]) {
      // Option unavailable here; fall back to a primitive step.
      s = primitive_step(s, rng.uniform_below(na));
      visited.push_back(s);
      continue;
    }
    while (!opt.termination[static_cast<std::size_t>(s)] &&
           static_cast<int>(visited.size()) <= n_steps) {
      int a = rng.categorical(opt.policy.row(s).transpose());
      s = primitive_step(s, a);
      visited.push_back(s);
    }
  }
  visited.resize(static_cast<std::size_t>(n_steps) + 1);
  return visited;
}

std::vector<OptionDef> discover_eigenoptions(const TabularMDP& mdp, int n_rounds,
                                             int samples_per_round, Rng& rng) {
  if (n_rounds < 0) throw std::invalid_argument("discover_eigenoptions: negative n_rounds");
  if (n_rounds > 0 && samples_per_round < 1) {
    throw std::invalid_argument("discover_eigenoptions: need samples_per_round >= 1");
  }
  int n = mdp.n_states();
  std::vector<OptionDef> options;
  EtaSchedule schedule;
  for (int round = 1; round <= n_rounds; ++round) {
    std::vector<int> visited = rollout_with_options(mdp, options, samples_per_round, rng);

    SRMatrix est = sr_td_init(n, mdp.gamma);
    Eigen::VectorXd visit_count = Eigen::VectorXd::Zero(n);
    visit_count(visited.front()) += 1.0;
    for (std::size_t t = 0; t + 1 < visited.size(); ++t) {
      sr_td_step(est, visited[t], visited[t + 1], schedule.at(static_cast<long long>(t)));
      visit_count(visited[t + 1]) += 1.0;
    }

    int index = std::min(round, n - 1);  // index 0 is the flat leading vector
    EigenBasis basis = eigen_decompose_sr(est, index + 1);
    Eigen::VectorXd e = basis.vectors.col(index);
    int densest = 0;
    visit_count.maxCoeff(&densest);
    if (e(densest) > e.mean()) e = -e;  // climb away from where sampling already concentrates
    options.push_back(eigenoption_from_vector(mdp, e, index));
  }
  return options;
}

// ======================== visitation bonus ========================

double count_bonus(const SRMatrix& sr, int s, double max_bonus) {
  if (s < 0 || s >= sr.n_states()) throw std::invalid_argument("count_bonus: state out of range");
  double norm = sr.m.row(s).cwiseAbs().sum();
  if (norm <= 0.0) return max_bonus;
  return std::min(max_bonus, 1.0 / norm);
}

double count_bonus(const SFTensor& sf, int s, double max_bonus) {
  if (s < 0 || s >= sf.n_states()) throw std::invalid_argument("count_bonus: state out of range");
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(sf.n_features());
  for (const auto& psi : sf.psi) acc += psi.row(s);
  double norm = (acc / sf.n_actions()).cwiseAbs().sum();
  if (norm <= 0.0) return max_bonus;
  return std::min(max_bonus, 1.0 / norm);
}

// ======================== posterior sampling ========================

Eigen::MatrixXd posterior_q_sample(const SFTensor& sf, const RewardBelief& belief, Rng& rng) {
  int d = sf.n_features();
  if (belief.mean.size() != d || belief.cov.rows() != d || belief.cov.cols() != d) {
    throw std::invalid_argument("posterior_q_sample: belief dimensions mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (belief.cov + belief.cov.transpose()));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("posterior_q_sample: covariance factorization failed");
  }
  Eigen::VectorXd eigs = solver.eigenvalues();
  if (eigs.minCoeff() < -1e-8) {
    throw std::invalid_argument("posterior_q_sample: covariance not positive semidefinite");
  }
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z(i) = rng.normal();
  Eigen::VectorXd w = belief.mean +
                      solver.eigenvectors() * eigs.cwiseMax(0.0).cwiseSqrt().asDiagonal() * z;
  return q_from_sf(sf, w);
}

// ======================== landmarks ========================

namespace {

double add_threshold(const LandmarkGraph& graph, const SFTensor& sf_uniform) {
  if (graph.eps_add > 0.0) return graph.eps_add;
  double mean_self = 0.0;
  for (int l : graph.landmarks) mean_self += sf_similarity(sf_uniform, l, l);
  mean_self /= static_cast<double>(graph.landmarks.size());
  return 0.75 * mean_self;
}

}  // namespace

int landmark_localize(const LandmarkGraph& graph, const SFTensor& sf_uniform, int s) {
  int best = -1;
  double best_sim = 0.0;
  for (int i = 0; i < graph.size(); ++i) {
    double sim = sf_similarity(sf_uniform, s, graph.landmarks[static_cast<std::size_t>(i)]);
    if (best < 0 || sim > best_sim) {
      best = i;
      best_sim = sim;
    }
  }
  return best;
}

bool landmark_maybe_add(LandmarkGraph& graph, const SFTensor& sf_uniform, int s) {
  if (graph.size() == 0) {
    graph.landmarks.push_back(s);
    graph.counts.push_back(1);
    graph.adjacency.emplace_back();
    return true;
  }
  double eps = add_threshold(graph, sf_uniform);
  int nearest = -1;
  double nearest_sim = 0.0;
  bool novel = true;
  for (int i = 0; i < graph.size(); ++i) {
    double sim = sf_similarity(sf_uniform, s, graph.landmarks[static_cast<std::size_t>(i)]);
    if (nearest < 0 || sim > nearest_sim) {
      nearest = i;
      nearest_sim = sim;
    }
    if (sim >= eps) novel = false;
  }
  if (novel) {
    graph.landmarks.push_back(s);
    graph.counts.push_back(1);
    graph.adjacency.emplace_back();
    return true;
  }
  graph.counts[static_cast<std::size_t>(nearest)] += 1;
  return false;
}

int landmark_goal_action(const LandmarkGraph&, const SFTensor& sf_uniform, int s, int subgoal) {
  int best = 0;
  double best_sim = sf_similarity(sf_uniform, s, subgoal, 0);
  for (int a = 1; a < sf_uniform.n_actions(); ++a) {
    double sim = sf_similarity(sf_uniform, s, subgoal, a);
    if (sim > best_sim) {
      best = a;
      best_sim = sim;
    }
  }
  return best;
}

void landmark_connect(LandmarkGraph& graph, int i, int j) {
  if (i < 0 || i >= graph.size() || j < 0 || j >= graph.size()) {
    throw std::invalid_argument("landmark_connect: index out of range");
  }
  if (i == j) return;
  auto& ai = graph.adjacency[static_cast<std::size_t>(i)];
  auto& aj = graph.adjacency[static_cast<std::size_t>(j)];
  if (std::find(ai.begin(), ai.end(), j) == ai.end()) ai.push_back(j);
  if (std::find(aj.begin(), aj.end(), i) == aj.end()) aj.push_back(i);
}

std::vector<int> landmark_path(const LandmarkGraph& graph, int from, int to) {
  if (from < 0 || from >= graph.size() || to < 0 || to >= graph.size()) {
    throw std::invalid_argument("landmark_path: index out of range");
  }
  std::vector<int> parent(static_cast<std::size_t>(graph.size()), -2);
  parent[static_cast<std::size_t>(from)] = -1;
  std::deque<int> frontier{from};
  while (!frontier.empty()) {
    int cur = frontier.front();
    frontier.pop_front();
    if (cur == to) break;
    for (int next : graph.adjacency[static_cast<std::size_t>(cur)]) {
      if (parent[static_cast<std::size_t>(next)] == -2) {
        parent[static_cast<std::size_t>(next)] = cur;
        frontier.push_back(next);
      }
    }
  }
  if (parent[static_cast<std::size_t>(to)] == -2) return {};
  std::vector<int> path;
  for (int cur = to; cur != -1; cur = parent[static_cast<std::size_t>(cur)]) path.push_back(cur);
  std::reverse(path.begin(), path.end());
  return path;
}

int landmark_sample_frontier(const LandmarkGraph& graph, Rng& rng) {
  if (graph.size() == 0) throw std::invalid_argument("landmark_sample_frontier: empty graph");
  Eigen::VectorXd weights(graph.size());
  for (int i = 0; i < graph.size(); ++i) {
    weights(i) = 1.0 / static_cast<double>(graph.counts[static_cast<std::size_t>(i)]);
  }
  return rng.categorical(weights);
}

}  // namespace predrep
