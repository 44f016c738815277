#include "predrep/neuro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "predrep/explore.hpp"

namespace predrep {

namespace {

FieldMap reshape_onto_grid(const Eigen::VectorXd& per_state, const GridWorld& world) {
  FieldMap field;
  field.values = Eigen::MatrixXd::Zero(world.rows, world.cols);
  for (int r = 0; r < world.rows; ++r) {
    for (int c = 0; c < world.cols; ++c) {
      int s = world.state_at(r, c);
      if (s >= 0) field.values(r, c) = per_state(s);
    }
  }
  return field;
}

}  // namespace

// ======================== fields ========================

FieldMap place_field(const SRMatrix& sr, const GridWorld& world, int s_field) {
  if (s_field < 0 || s_field >= sr.n_states()) {
    throw std::invalid_argument("place_field: state out of range");
  }
  if (world.n_states() != sr.n_states()) {
    throw std::invalid_argument("place_field: geometry does not match representation");
  }
  return reshape_onto_grid(sr.m.col(s_field), world);
}

FieldMap population_vector(const SRMatrix& sr, const GridWorld& world, int s) {
  if (s < 0 || s >= sr.n_states()) {
    throw std::invalid_argument("population_vector: state out of range");
  }
  if (world.n_states() != sr.n_states()) {
    throw std::invalid_argument("population_vector: geometry does not match representation");
  }
  return reshape_onto_grid(sr.m.row(s).transpose(), world);
}

std::vector<FieldMap> grid_fields(const SRMatrix& sr, const GridWorld& world, int k,
                                  bool non_negative) {
  if (world.n_states() != sr.n_states()) {
    throw std::invalid_argument("grid_fields: geometry does not match representation");
  }
  EigenBasis basis = eigen_decompose_sr(sr, k);
  std::vector<FieldMap> fields;
  fields.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd v = basis.vectors.col(j);
    if (non_negative) v = v.cwiseMax(0.0);
    fields.push_back(reshape_onto_grid(v, world));
  }
  return fields;
}

// ======================== 1D track analysis ========================

SkewResult skew_metric(const FieldMap& field, int direction) {
  if (field.rows() != 1) throw std::invalid_argument("skew_metric: field must be a single row");
  if (direction != 1 && direction != -1) {
    throw std::invalid_argument("skew_metric: direction must be +1 or -1");
  }
  const Eigen::MatrixXd& v = field.values;
  int n = field.cols();

  double lo = v.minCoeff(), hi = v.maxCoeff();
  if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) return SkewResult{0.0, true};

  // Shift so mass is non-negative; peak index is the first argmax.
  double total = 0.0, weighted = 0.0;
  int peak = 0;
  for (int c = 0; c < n; ++c) {
    double mass = v(0, c) - lo;
    total += mass;
    weighted += mass * c;
    if (v(0, c) > v(0, peak)) peak = c;
  }
  double com = weighted / total;
  return SkewResult{(com - peak) * direction, false};
}

// ======================== spatial autocorrelation ========================

Eigen::MatrixXd autocorrelation(const FieldMap& field, const GridWorld& world,
                                int min_overlap) {
  if (field.rows() != world.rows || field.cols() != world.cols) {
    throw std::invalid_argument("autocorrelation: field does not match geometry");
  }
  int r0 = world.rows, c0 = world.cols;

  // Open-cell mean and variance for normalization.
  double mean = 0.0;
  int n_open = 0;
  for (int r = 0; r < r0; ++r) {
    for (int c = 0; c < c0; ++c) {
      if (world.state_at(r, c) >= 0) {
        mean += field.values(r, c);
        ++n_open;
      }
    }
  }
  mean /= n_open;

  Eigen::MatrixXd ac = Eigen::MatrixXd::Zero(2 * r0 - 1, 2 * c0 - 1);
  for (int dr = -(r0 - 1); dr <= r0 - 1; ++dr) {
    for (int dc = -(c0 - 1); dc <= c0 - 1; ++dc) {
      double num = 0.0, var_a = 0.0, var_b = 0.0;
      int overlap = 0;
      for (int r = 0; r < r0; ++r) {
        int r2 = r + dr;
        if (r2 < 0 || r2 >= r0) continue;
        for (int c = 0; c < c0; ++c) {
          int c2 = c + dc;
          if (c2 < 0 || c2 >= c0) continue;
          if (world.state_at(r, c) < 0 || world.state_at(r2, c2) < 0) continue;
          double a = field.values(r, c) - mean;
          double b = field.values(r2, c2) - mean;
          num += a * b;
          var_a += a * a;
          var_b += b * b;
          ++overlap;
        }
      }
      double denom = std::sqrt(var_a * var_b);
      if (overlap >= min_overlap && denom > 1e-12) {
        ac(dr + r0 - 1, dc + c0 - 1) = num / denom;
      }
    }
  }
  return ac;
}

std::vector<std::pair<int, int>> autocorr_peaks(const Eigen::MatrixXd& ac, double height) {
  int rows = static_cast<int>(ac.rows()), cols = static_cast<int>(ac.cols());
  int cr = rows / 2, cc = cols / 2;
  std::vector<std::pair<int, int>> peaks;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (r == cr && c == cc) continue;
      double v = ac(r, c);
      if (v < height) continue;
      bool is_max = true;
      for (int dr = -1; dr <= 1 && is_max; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          int r2 = r + dr, c2 = c + dc;
          if (r2 < 0 || r2 >= rows || c2 < 0 || c2 >= cols) continue;
          if (ac(r2, c2) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.emplace_back(r - cr, c - cc);
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) {
    long da = static_cast<long>(a.first) * a.first + static_cast<long>(a.second) * a.second;
    long db = static_cast<long>(b.first) * b.first + static_cast<long>(b.second) * b.second;
    if (da != db) return da < db;
    return a < b;
  });
  return peaks;
}

// ======================== replay ========================

namespace {

// Mean of `evaluate_on` over the argmax set of `argmax_of`.  Greedy policies
// split ties uniformly; without the split, a backup into an all-tied row
// (fresh Q) would count as no policy change and score zero gain.
double tie_mean(const Eigen::RowVectorXd& evaluate_on, const Eigen::RowVectorXd& argmax_of) {
  double maxv = argmax_of.maxCoeff();
  double tol = 1e-12 * std::max(1.0, std::abs(maxv));
  double sum = 0.0;
  int count = 0;
  for (int a = 0; a < argmax_of.size(); ++a) {
    if (argmax_of(a) >= maxv - tol) {
      sum += evaluate_on(a);
      ++count;
    }
  }
  return sum / count;
}

ReplayCandidate score_backup(const SRMatrix& sr, const Eigen::MatrixXd& q,
                             const TabularMDP& mdp, int agent_state, int s, int a,
                             const ReplayConfig& config) {
  // One-step sample-free backup of (s, a) against the current Q.
  const Eigen::MatrixXd& t = mdp.transition[static_cast<std::size_t>(a)];
  double backed_up = 0.0;
  for (int s2 = 0; s2 < mdp.n_states(); ++s2) {
    double p = t(s, s2);
    if (p == 0.0) continue;
    backed_up += p * (mdp.reward(s2) + mdp.gamma * q.row(s2).maxCoeff());
  }

  Eigen::RowVectorXd updated = q.row(s);
  updated(a) = backed_up;

  double new_value = tie_mean(updated, updated);
  double old_value = config.old_policy_on_pre_update_q ? tie_mean(q.row(s), q.row(s))
                                                       : tie_mean(updated, q.row(s));
  double gain = new_value - old_value;
  if (config.min_gain > 0.0) gain = std::max(gain, config.min_gain);

  ReplayCandidate cand;
  cand.state = s;
  cand.action = a;
  cand.need = sr.m(agent_state, s);
  cand.gain = gain;
  cand.evb = cand.need * cand.gain;
  return cand;
}

}  // namespace

std::vector<ReplayCandidate> replay_priorities(
    const SRMatrix& sr, const Eigen::MatrixXd& q, const TabularMDP& mdp, int agent_state,
    const std::vector<std::pair<int, int>>& candidates, const ReplayConfig& config) {
  if (agent_state < 0 || agent_state >= sr.n_states()) {
    throw std::invalid_argument("replay_priorities: agent state out of range");
  }
  std::vector<ReplayCandidate> scored;
  scored.reserve(candidates.size());
  for (auto [s, a] : candidates) {
    if (s < 0 || s >= mdp.n_states() || a < 0 || a >= mdp.n_actions()) {
      throw std::invalid_argument("replay_priorities: candidate out of range");
    }
    scored.push_back(score_backup(sr, q, mdp, agent_state, s, a, config));
  }
  std::stable_sort(scored.begin(), scored.end(), [](const ReplayCandidate& a, const ReplayCandidate& b) {
    if (a.evb != b.evb) return a.evb > b.evb;
    if (a.state != b.state) return a.state < b.state;
    return a.action < b.action;
  });
  return scored;
}

ReplayTrace replay_simulate(const SRMatrix& sr, const Eigen::MatrixXd& q,
                            const TabularMDP& mdp, int agent_state,
                            const std::vector<std::pair<int, int>>& candidates,
                            const ReplayConfig& config) {
  ReplayTrace trace;
  trace.q_final = q;
  for (int step = 0; step < config.max_steps; ++step) {
    std::vector<ReplayCandidate> ranked =
        replay_priorities(sr, trace.q_final, mdp, agent_state, candidates, config);
    if (ranked.empty() || ranked.front().evb < config.threshold) break;
    const ReplayCandidate& best = ranked.front();

    const Eigen::MatrixXd& t = mdp.transition[static_cast<std::size_t>(best.action)];
    double backed_up = 0.0;
    for (int s2 = 0; s2 < mdp.n_states(); ++s2) {
      double p = t(best.state, s2);
      if (p == 0.0) continue;
      backed_up += p * (mdp.reward(s2) + mdp.gamma * trace.q_final.row(s2).maxCoeff());
    }
    trace.q_final(best.state, best.action) = backed_up;
    trace.executed.push_back(best);
  }
  return trace;
}

}  // namespace predrep
