#include "predrep/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "predrep/envs.hpp"
#include "predrep/explore.hpp"
#include "predrep/io.hpp"
#include "predrep/neuro.hpp"
#include "predrep/rng.hpp"
#include "predrep/sf.hpp"
#include "predrep/sr.hpp"

namespace predrep {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// ======================== config plumbing ========================

void require_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) {
    throw std::invalid_argument(std::string(where) + ": config must be a JSON object");
  }
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) {
      throw std::invalid_argument(std::string(where) + ": unknown config key \"" + item.key() +
                                  "\"");
    }
  }
}

double jnum(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw std::invalid_argument(std::string("config key \"") + key + "\" must be a number");
  }
  return j.at(key).get<double>();
}

int jint(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) {
    throw std::invalid_argument(std::string("config key \"") + key + "\" must be an integer");
  }
  return j.at(key).get<int>();
}

std::uint64_t juint(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer() || j.at(key).is_number_float() ||
      (j.at(key).is_number_integer() && j.at(key).get<long long>() < 0)) {
    throw std::invalid_argument(std::string("config key \"") + key +
                                " must be a non-negative integer");
  }
  return j.at(key).get<std::uint64_t>();
}

std::string jstr(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) {
    throw std::invalid_argument(std::string("config key \"") + key + "\" must be a string");
  }
  return j.at(key).get<std::string>();
}

std::vector<std::uint64_t> jseeds(const json& j, int default_count) {
  std::vector<std::uint64_t> out;
  if (j.contains("seeds")) {
    const json& v = j.at("seeds");
    if (!v.is_array() || v.empty()) {
      throw std::invalid_argument("config key \"seeds\" must be a non-empty array");
    }
    for (const auto& e : v) {
      if (!e.is_number_integer() || e.get<long long>() < 0) {
        throw std::invalid_argument("config key \"seeds\" must hold non-negative integers");
      }
      out.push_back(e.get<std::uint64_t>());
    }
  } else {
    int n = jint(j, "n_seeds", default_count);
    if (n <= 0) throw std::invalid_argument("config key \"n_seeds\" must be positive");
    for (int i = 1; i <= n; ++i) out.push_back(std::uint64_t(i));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ordered_json seeds_json(const std::vector<std::uint64_t>& seeds) {
  ordered_json a = ordered_json::array();
  for (auto s : seeds) a.push_back(s);
  return a;
}

// ======================== shared helpers ========================

int sample_next(const TabularMDP& mdp, int s, int a, Rng& rng) {
  return rng.categorical(mdp.transition[std::size_t(a)].row(s).transpose());
}

int eps_greedy(Eigen::VectorXd q, double epsilon, Rng& rng) {
  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    return int(rng.uniform_below(std::uint64_t(q.size())));
  }
  int a = 0;
  q.maxCoeff(&a);
  return a;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// One-sided Wilcoxon signed-rank test of H1: x < y (paired), normal
// approximation with tie correction and continuity correction.
double wilcoxon_less(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double diff = x[i] - y[i];
    if (diff != 0.0) d.push_back(diff);
  }
  std::size_t n = d.size();
  if (n == 0) return 1.0;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(d[a]) < std::abs(d[b]);
  });

  std::vector<double> rank(n, 0.0);
  double tie_correction = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t k = i;
    while (k + 1 < n && std::abs(d[order[k + 1]]) == std::abs(d[order[i]])) ++k;
    double avg = 0.5 * (double(i) + double(k)) + 1.0;  // ranks are 1-based
    for (std::size_t t = i; t <= k; ++t) rank[order[t]] = avg;
    double ties = double(k - i + 1);
    tie_correction += ties * ties * ties - ties;
    i = k + 1;
  }

  double w_plus = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (d[t] > 0.0) w_plus += rank[t];
  }
  double nn = double(n);
  double mu = nn * (nn + 1.0) / 4.0;
  double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_correction / 48.0;
  if (var <= 0.0) return w_plus <= mu ? 0.0 : 1.0;
  return normal_cdf((w_plus + 0.5 - mu) / std::sqrt(var));
}

/// Deterministic MDP from a successor table next[s][a].
TabularMDP chain_mdp(double gamma, const std::vector<std::vector<int>>& next,
                     const Eigen::VectorXd& reward, const std::vector<bool>& terminal) {
  int n = int(next.size());
  int n_actions = int(next[0].size());
  TabularMDP mdp;
  mdp.gamma = gamma;
  mdp.reward = reward;
  mdp.terminal = terminal;
  mdp.transition.assign(std::size_t(n_actions), Eigen::MatrixXd::Zero(n, n));
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      int s2 = terminal[std::size_t(s)] ? s : next[std::size_t(s)][std::size_t(a)];
      mdp.transition[std::size_t(a)](s, s2) = 1.0;
    }
  }
  mdp.validate();
  return mdp;
}

// ======================== learning agents ========================
//
// Episodic semantics shared by the experiment agents: an episode ends on
// arrival at a terminal state, whose continuation value is treated as zero.

struct MfAgent {
  Eigen::MatrixXd q;
  Rng rng{0};

  MfAgent(int n_states, int n_actions, Rng r)
      : q(Eigen::MatrixXd::Zero(n_states, n_actions)), rng(r) {}

  void episode(const TabularMDP& mdp, int start, int forced_first, double eta, double epsilon,
               int max_steps = 64) {
    int s = start;
    int forced = forced_first;
    for (int step = 0; step < max_steps && !mdp.terminal[std::size_t(s)]; ++step) {
      int a = forced >= 0 ? forced : eps_greedy(q.row(s).transpose(), epsilon, rng);
      forced = -1;
      int s2 = sample_next(mdp, s, a, rng);
      double target = mdp.reward(s2) +
                      (mdp.terminal[std::size_t(s2)] ? 0.0 : mdp.gamma * q.row(s2).maxCoeff());
      q(s, a) += eta * (target - q(s, a));
      s = s2;
    }
  }

  double value(int s) const { return q.row(s).maxCoeff(); }
};

struct MbAgent {
  std::vector<Eigen::MatrixXd> counts;
  Eigen::VectorXd r_hat;
  std::vector<bool> term_seen;
  double gamma;
  Rng rng{0};

  MbAgent(int n_states, int n_actions, double g, Rng r)
      : counts(std::size_t(n_actions), Eigen::MatrixXd::Zero(n_states, n_states)),
        r_hat(Eigen::VectorXd::Zero(n_states)),
        term_seen(std::size_t(n_states), false),
        gamma(g),
        rng(r) {}

  Eigen::MatrixXd plan() const {
    int n = int(r_hat.size());
    int n_actions = int(counts.size());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n_actions);
    for (int sweep = 0; sweep < 200; ++sweep) {
      double change = 0.0;
      for (int s = 0; s < n; ++s) {
        if (term_seen[std::size_t(s)]) continue;
        for (int a = 0; a < n_actions; ++a) {
          const Eigen::MatrixXd& c = counts[std::size_t(a)];
          double total = c.row(s).sum();
          double backed = 0.0;
          if (total > 0.0) {
            for (int s2 = 0; s2 < n; ++s2) {
              double p = c(s, s2) / total;
              if (p == 0.0) continue;
              double cont = term_seen[std::size_t(s2)] ? 0.0 : q.row(s2).maxCoeff();
              backed += p * (r_hat(s2) + gamma * cont);
            }
          }
          change = std::max(change, std::abs(backed - q(s, a)));
          q(s, a) = backed;
        }
      }
      if (change < 1e-12) break;
    }
    return q;
  }

  void episode(const TabularMDP& mdp, int start, int forced_first, double epsilon,
               int max_steps = 64) {
    Eigen::MatrixXd q = plan();
    int s = start;
    int forced = forced_first;
    for (int step = 0; step < max_steps && !mdp.terminal[std::size_t(s)]; ++step) {
      int a = forced >= 0 ? forced : eps_greedy(q.row(s).transpose(), epsilon, rng);
      forced = -1;
      int s2 = sample_next(mdp, s, a, rng);
      // last observation wins, for transitions as for rewards: a stationary
      // count average would blend the pre- and post-change worlds forever
      counts[std::size_t(a)].row(s).setZero();
      counts[std::size_t(a)](s, s2) = 1.0;
      r_hat(s2) = mdp.reward(s2);
      if (mdp.terminal[std::size_t(s2)]) term_seen[std::size_t(s2)] = true;
      s = s2;
    }
  }

  double value(int s) const { return plan().row(s).maxCoeff(); }
};

struct SrAgent {
  std::vector<Eigen::MatrixXd> m;  // action-conditioned occupancy rows
  Eigen::VectorXd w;
  double gamma;
  Rng rng{0};

  SrAgent(int n_states, int n_actions, double g, Rng r)
      : m(std::size_t(n_actions), Eigen::MatrixXd::Zero(n_states, n_states)),
        w(Eigen::VectorXd::Zero(n_states)),
        gamma(g),
        rng(r) {}

  double action_value(int s, int a) const { return m[std::size_t(a)].row(s).dot(w); }

  Eigen::VectorXd q_row(int s) const {
    Eigen::VectorXd q(m.size());
    for (int a = 0; a < int(m.size()); ++a) q(a) = action_value(s, a);
    return q;
  }

  void episode(const TabularMDP& mdp, int start, int forced_first, double eta, double eta_w,
               double epsilon, int max_steps = 64) {
    int s = start;
    if (mdp.terminal[std::size_t(s)]) return;
    int a = forced_first >= 0 ? forced_first : eps_greedy(q_row(s), epsilon, rng);
    for (int step = 0; step < max_steps; ++step) {
      int s2 = sample_next(mdp, s, a, rng);
      w(s2) += eta_w * (mdp.reward(s2) - w(s2));
      bool done = mdp.terminal[std::size_t(s2)];
      int a2 = done ? 0 : eps_greedy(q_row(s2), epsilon, rng);
      Eigen::RowVectorXd target = Eigen::RowVectorXd::Zero(w.size());
      target(s2) = 1.0;
      if (!done) target += gamma * m[std::size_t(a2)].row(s2);
      m[std::size_t(a)].row(s) += eta * (target - m[std::size_t(a)].row(s));
      if (done) break;
      s = s2;
      a = a2;
    }
  }

  double value(int s) const { return q_row(s).maxCoeff(); }
};

}  // namespace

// ======================== revaluation ========================

namespace {

enum class RevalKind { reward, transition, policy };

struct RevalSetup {
  TabularMDP learn;
  TabularMDP reval;
  std::vector<int> learn_starts;
  std::vector<int> reval_starts;
};

/// Two-step chains.  The base task pays $10 down one arm and $1 down the
/// other; each revaluation changes only the far end of the arms.  The policy
/// variant gives the second stage a real choice so that a change in the best
/// far outcome also changes which action the learned arm policy should take.
RevalSetup reval_setup(RevalKind kind, double gamma) {
  RevalSetup out;
  if (kind != RevalKind::policy) {
    std::vector<std::vector<int>> next = {{2}, {3}, {4}, {5}, {4}, {5}};
    Eigen::VectorXd r(6);
    r << 0, 0, 0, 0, 10, 1;
    std::vector<bool> term = {false, false, false, false, true, true};
    out.learn = chain_mdp(gamma, next, r, term);
    if (kind == RevalKind::reward) {
      Eigen::VectorXd r2(6);
      r2 << 0, 0, 0, 0, 1, 10;
      out.reval = chain_mdp(gamma, next, r2, term);
    } else {
      std::vector<std::vector<int>> next2 = {{2}, {3}, {5}, {4}, {4}, {5}};
      out.reval = chain_mdp(gamma, next2, r, term);
    }
  } else {
    std::vector<std::vector<int>> next = {{2, 2}, {3, 3}, {4, 5}, {6, 7}, {4, 4}, {5, 5}, {6, 6}, {7, 7}};
    Eigen::VectorXd r(8);
    r << 0, 0, 0, 0, 10, 0, 1, 0;
    std::vector<bool> term = {false, false, false, false, true, true, true, true};
    out.learn = chain_mdp(gamma, next, r, term);
    Eigen::VectorXd r2 = r;
    r2(7) = 20.0;  // the previously worthless branch becomes the jackpot
    out.reval = chain_mdp(gamma, next, r2, term);
  }
  out.learn_starts = {0, 1};
  out.reval_starts = {2, 3};
  return out;
}

}  // namespace

RevaluationConfig RevaluationConfig::from_json(const json& j) {
  require_keys(j, "revaluation", {"experiment", "seeds", "n_seeds", "learn_episodes",
                                  "reval_episodes", "epsilon", "eta", "gamma"});
  RevaluationConfig c;
  c.seeds = jseeds(j, 100);
  c.learn_episodes = jint(j, "learn_episodes", c.learn_episodes);
  c.reval_episodes = jint(j, "reval_episodes", c.reval_episodes);
  c.epsilon = jnum(j, "epsilon", c.epsilon);
  c.eta = jnum(j, "eta", c.eta);
  c.gamma = jnum(j, "gamma", c.gamma);
  c.validate();
  return c;
}

void RevaluationConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("revaluation: seeds must be non-empty");
  if (learn_episodes <= 0 || reval_episodes <= 0) {
    throw std::invalid_argument("revaluation: episode counts must be positive");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("revaluation: gamma in (0,1)");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("revaluation: epsilon in [0,1]");
  }
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("revaluation: eta in (0,1]");
}

ordered_json RevaluationConfig::to_json() const {
  ordered_json j;
  j["experiment"] = "revaluation";
  j["seeds"] = seeds_json(seeds);
  j["learn_episodes"] = learn_episodes;
  j["reval_episodes"] = reval_episodes;
  j["epsilon"] = epsilon;
  j["eta"] = eta;
  j["gamma"] = gamma;
  return j;
}

ordered_json run_revaluation(const RevaluationConfig& config) {
  config.validate();
  const RevalKind kinds[] = {RevalKind::reward, RevalKind::transition, RevalKind::policy};
  const char* kind_names[] = {"reward", "transition", "policy"};
  const char* agent_names[] = {"mf", "mb", "sr"};
  // Start-state choice (1 or 2) each agent class should make after each
  // revaluation: only the model keeps up with everything, only the occupancy
  // map tracks pure reward changes, and cached values notice nothing.
  const int expected[3][3] = {{1, 2, 2}, {1, 2, 1}, {1, 2, 1}};

  ordered_json records = ordered_json::array();
  long long match[3][3] = {};

  for (std::uint64_t seed : config.seeds) {
    ordered_json rec;
    rec["seed"] = seed;
    for (int k = 0; k < 3; ++k) {
      RevalSetup setup = reval_setup(kinds[k], config.gamma);
      int n = setup.learn.n_states();
      int n_actions = setup.learn.n_actions();
      Rng base(seed);
      MfAgent mf(n, n_actions, base.split(std::uint64_t(16 * k + 1)));
      MbAgent mb(n, n_actions, config.gamma, base.split(std::uint64_t(16 * k + 2)));
      SrAgent sr(n, n_actions, config.gamma, base.split(std::uint64_t(16 * k + 3)));

      for (int e = 0; e < config.learn_episodes; ++e) {
        int start = setup.learn_starts[std::size_t(e % 2)];
        mf.episode(setup.learn, start, -1, config.eta, config.epsilon);
        mb.episode(setup.learn, start, -1, config.epsilon);
        sr.episode(setup.learn, start, -1, config.eta, config.eta, config.epsilon);
      }
      // Passive exposure: the revaluation phase walks the agents through
      // every second-stage action so discovery does not hinge on epsilon.
      for (int e = 0; e < config.reval_episodes; ++e) {
        int start = setup.reval_starts[std::size_t(e % 2)];
        int forced = (e / 2) % n_actions;
        mf.episode(setup.reval, start, forced, config.eta, config.epsilon);
        mb.episode(setup.reval, start, forced, config.epsilon);
        sr.episode(setup.reval, start, forced, config.eta, config.eta, config.epsilon);
      }

      ordered_json cond;
      double values[3][2] = {{mf.value(0), mf.value(1)},
                             {mb.value(0), mb.value(1)},
                             {sr.value(0), sr.value(1)}};
      for (int a = 0; a < 3; ++a) {
        int choice = values[a][1] > values[a][0] ? 2 : 1;
        cond[agent_names[a]] = choice;
        if (choice == expected[k][a]) ++match[k][a];
      }
      rec[kind_names[k]] = cond;
    }
    records.push_back(rec);
  }

  double n_seeds = double(config.seeds.size());
  ordered_json rates;
  ordered_json checks;
  bool all_ok = true;
  for (int k = 0; k < 3; ++k) {
    ordered_json row;
    for (int a = 0; a < 3; ++a) {
      double rate = double(match[k][a]) / n_seeds;
      row[agent_names[a]] = rate;
      bool ok = rate >= 0.95;
      all_ok = all_ok && ok;
      checks[std::string(agent_names[a]) + "_" + kind_names[k] + "_ge_95"] = ok;
    }
    rates[kind_names[k]] = row;
  }
  checks["signature_complete"] = all_ok;

  ordered_json expected_json;
  for (int k = 0; k < 3; ++k) {
    ordered_json row;
    for (int a = 0; a < 3; ++a) row[agent_names[a]] = expected[k][a];
    expected_json[kind_names[k]] = row;
  }

  ordered_json report;
  report["config"] = config.to_json();
  report["version"] = PREDREP_VERSION;
  report["expected_choice"] = expected_json;
  report["match_rate"] = rates;
  report["records"] = records;
  report["checks"] = checks;
  return report;
}

// ======================== multitask transfer ========================

namespace {

struct FeatureWorld {
  TabularMDP mdp;  // rewards left zero; tasks fill them in
  FeatureMap features;
};

/// Two-step diamond: a start state, two arms, and two outcomes per arm.  The
/// feature vectors are chosen so that the best single outcome for a mixed
/// task hides behind an arm that neither specialist policy visits.
FeatureWorld two_step_feature_world(double gamma) {
  std::vector<std::vector<int>> next = {{1, 2}, {3, 4}, {6, 5}, {3, 3}, {4, 4}, {5, 5}, {6, 6}};
  Eigen::VectorXd r = Eigen::VectorXd::Zero(7);
  std::vector<bool> term = {false, false, false, true, true, true, true};
  FeatureWorld world;
  world.mdp = chain_mdp(gamma, next, r, term);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(7, 3);
  phi.row(3) << 0.9, 0.0, 0.0;  // arm A, outcome favored by task 1
  phi.row(4) << 0.0, 0.0, 3.0;  // arm A, big payoff on the third feature
  phi.row(5) << 0.0, 1.0, 0.0;  // arm B, outcome favored by task 2
  phi.row(6) << 0.0, 0.0, 0.5;  // arm B, small third-feature payoff
  world.features.phi = phi;
  return world;
}

TaskVector task_from_json(const json& t) {
  if (!t.is_array() || t.empty()) {
    throw std::invalid_argument("multitask: each task must be a non-empty array");
  }
  TaskVector w(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!t[i].is_number()) throw std::invalid_argument("multitask: task entries must be numbers");
    w(Eigen::Index(i)) = t[i].get<double>();
  }
  return w;
}

/// Exact dominance margin of the GPI policy over a library on task w:
/// min over (s,a) of Q^gpi - max_i Q^i.  Non-negative up to numerical noise.
double gpi_dominance_margin(const TabularMDP& base, const std::vector<SFTensor>& library,
                            const std::vector<PolicyMatrix>& policies, const TaskVector& w,
                            const FeatureMap& features) {
  TabularMDP task = base;
  task.reward = features.phi * w;
  int n = task.n_states();
  int n_actions = task.n_actions();

  PolicyMatrix gpi = PolicyMatrix::Zero(n, n_actions);
  for (int s = 0; s < n; ++s) gpi(s, gpi_action(library, w, s).action) = 1.0;

  Eigen::MatrixXd q_gpi = q_from_action_sr(sr_action_closed_form(task, gpi), task.reward);
  Eigen::MatrixXd q_best = Eigen::MatrixXd::Constant(n, n_actions,
                                                     -std::numeric_limits<double>::infinity());
  for (const PolicyMatrix& pol : policies) {
    Eigen::MatrixXd q = q_from_action_sr(sr_action_closed_form(task, pol), task.reward);
    q_best = q_best.cwiseMax(q);
  }
  return (q_gpi - q_best).minCoeff();
}

}  // namespace

MultitaskConfig MultitaskConfig::from_json(const json& j) {
  require_keys(j, "multitask", {"experiment", "gamma", "n_random_worlds", "seed", "test_tasks"});
  MultitaskConfig c;
  c.gamma = jnum(j, "gamma", c.gamma);
  c.n_random_worlds = jint(j, "n_random_worlds", c.n_random_worlds);
  c.seed = juint(j, "seed", c.seed);
  if (j.contains("test_tasks")) {
    if (!j.at("test_tasks").is_array() || j.at("test_tasks").empty()) {
      throw std::invalid_argument("multitask: test_tasks must be a non-empty array");
    }
    c.test_tasks.clear();
    for (const auto& t : j.at("test_tasks")) {
      TaskVector w = task_from_json(t);
      c.test_tasks.push_back(std::vector<double>(w.data(), w.data() + w.size()));
    }
  }
  c.validate();
  return c;
}

void MultitaskConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("multitask: gamma in (0,1)");
  if (n_random_worlds < 0) throw std::invalid_argument("multitask: n_random_worlds >= 0");
  if (test_tasks.empty()) throw std::invalid_argument("multitask: need at least one test task");
  for (const auto& t : test_tasks) {
    if (t.size() != 3) throw std::invalid_argument("multitask: test tasks have three features");
  }
}

ordered_json MultitaskConfig::to_json() const {
  ordered_json j;
  j["experiment"] = "multitask";
  j["gamma"] = gamma;
  j["n_random_worlds"] = n_random_worlds;
  j["seed"] = seed;
  j["test_tasks"] = test_tasks;
  return j;
}

ordered_json run_multitask_gpi(const MultitaskConfig& config) {
  config.validate();
  FeatureWorld world = two_step_feature_world(config.gamma);
  const int n = world.mdp.n_states();
  const int n_actions = world.mdp.n_actions();

  std::vector<TaskVector> train = {TaskVector(3), TaskVector(3)};
  train[0] << 1, 0, 0;
  train[1] << 0, 1, 0;

  std::vector<PolicyMatrix> policies;
  std::vector<SFTensor> library;
  for (std::size_t i = 0; i < train.size(); ++i) {
    TabularMDP task = world.mdp;
    task.reward = world.features.phi * train[i];
    policies.push_back(value_iteration(task).policy);
    SFTensor sf = sf_closed_form(world.mdp, policies.back(), world.features);
    sf.policy_id = int(i);
    library.push_back(std::move(sf));
  }

  ordered_json rows = ordered_json::array();
  bool dominance_all = true;
  bool any_gap = false;
  bool training_exact = true;
  for (const auto& task_vec : config.test_tasks) {
    TaskVector w(3);
    w << task_vec[0], task_vec[1], task_vec[2];
    TabularMDP task = world.mdp;
    task.reward = world.features.phi * w;

    PolicyMatrix gpi = PolicyMatrix::Zero(n, n_actions);
    for (int s = 0; s < n; ++s) gpi(s, gpi_action(library, w, s).action) = 1.0;
    GpiChoice start_choice = gpi_action(library, w, 0);

    Eigen::VectorXd v_gpi = policy_evaluation_exact(task, gpi);
    Eigen::VectorXd v_opt = value_iteration(task).v;
    double best_library = -std::numeric_limits<double>::infinity();
    for (const PolicyMatrix& pol : policies) {
      best_library = std::max(best_library, policy_evaluation_exact(task, pol)(0));
    }
    double margin = gpi_dominance_margin(world.mdp, library, policies, w, world.features);
    double gap = v_opt(0) - v_gpi(0);
    bool suboptimal = gap > 1e-9;
    any_gap = any_gap || suboptimal;
    dominance_all = dominance_all && margin >= -1e-8;
    for (const auto& tr : train) {
      if ((w - tr).norm() == 0.0 && gap > 1e-9) training_exact = false;
    }

    ordered_json row;
    row["task"] = task_vec;
    row["start_action"] = start_choice.action;
    row["start_policy_index"] = start_choice.policy_index;
    row["gpi_start_value"] = v_gpi(0);
    row["best_library_start_value"] = best_library;
    row["optimal_start_value"] = v_opt(0);
    row["optimality_gap"] = gap;
    row["strictly_suboptimal"] = suboptimal;
    row["dominance_margin"] = margin;
    rows.push_back(row);
  }

  // Random instances of the same reuse theorem: features, training tasks, and
  // the evaluation task are arbitrary as long as rewards are exactly linear.
  Rng rng(config.seed);
  int random_pass = 0;
  for (int k = 0; k < config.n_random_worlds; ++k) {
    int ns = 4 + int(rng.uniform_below(4));
    int na = 2 + int(rng.uniform_below(2));
    TabularMDP base = random_mdp(ns, na, config.gamma, rng);
    base.reward.setZero();
    FeatureMap features;
    features.phi = Eigen::MatrixXd::NullaryExpr(ns, 3, [&rng](Eigen::Index, Eigen::Index) {
      return rng.normal();
    });
    std::vector<PolicyMatrix> pols;
    std::vector<SFTensor> lib;
    std::vector<TaskVector> ws;
    for (int i = 0; i < 3; ++i) {
      TaskVector wt(3);
      wt << rng.normal(), rng.normal(), rng.normal();
      ws.push_back(wt);
      TabularMDP task = base;
      task.reward = features.phi * wt;
      pols.push_back(value_iteration(task).policy);
      SFTensor sf = sf_closed_form(base, pols.back(), features);
      sf.policy_id = i;
      lib.push_back(std::move(sf));
    }
    TaskVector w_new = TaskVector::Zero(3);
    for (const TaskVector& wt : ws) w_new += rng.normal() * wt;
    double margin = gpi_dominance_margin(base, lib, pols, w_new, features);
    if (margin >= -1e-8) ++random_pass;
  }

  ordered_json checks;
  checks["gpi_dominates_library"] = dominance_all;
  checks["transfer_gap_demonstrated"] = any_gap;
  checks["training_task_recovered"] = training_exact;
  checks["random_worlds_dominance"] = random_pass == config.n_random_worlds;

  ordered_json report;
  report["config"] = config.to_json();
  report["version"] = PREDREP_VERSION;
  report["tasks"] = rows;
  report["random_worlds_passed"] = random_pass;
  report["checks"] = checks;
  return report;
}

// ======================== navigation ========================

namespace {

constexpr int kNavSize = 10;
constexpr int kNavStates = kNavSize * kNavSize;
constexpr int kNavStart = (kNavSize - 1) * kNavSize;  // southwest corner
constexpr int kNavGoal = kNavSize - 1;                // northeast corner

int nav_row(int s) { return s / kNavSize; }
int nav_col(int s) { return s % kNavSize; }

constexpr int kDr[4] = {-1, 0, 1, 0};  // N, E, S, W
constexpr int kDc[4] = {0, 1, 0, -1};

int nav_neighbor(const std::vector<bool>& blocked, int s, int a) {
  int r = nav_row(s) + kDr[a];
  int c = nav_col(s) + kDc[a];
  if (r < 0 || r >= kNavSize || c < 0 || c >= kNavSize) return s;
  int s2 = r * kNavSize + c;
  return blocked[std::size_t(s2)] ? s : s2;
}

/// All 100 cells stay in the state space across layouts (blocked cells become
/// unreachable self-loops) so value tables transfer between configurations.
TabularMDP nav_mdp(const std::vector<bool>& blocked, double gamma, double goal_reward,
                   double step_reward) {
  TabularMDP mdp;
  mdp.gamma = gamma;
  mdp.reward = Eigen::VectorXd::Constant(kNavStates, step_reward);
  mdp.reward(kNavGoal) = goal_reward;
  mdp.terminal.assign(kNavStates, false);
  mdp.terminal[kNavGoal] = true;
  mdp.transition.assign(4, Eigen::MatrixXd::Zero(kNavStates, kNavStates));
  for (int s = 0; s < kNavStates; ++s) {
    for (int a = 0; a < 4; ++a) {
      int s2 = (s == kNavGoal || blocked[std::size_t(s)]) ? s : nav_neighbor(blocked, s, a);
      mdp.transition[std::size_t(a)](s, s2) = 1.0;
    }
  }
  mdp.validate();
  return mdp;
}

bool nav_reachable(const std::vector<bool>& blocked) {
  std::vector<bool> seen(kNavStates, false);
  std::queue<int> frontier;
  frontier.push(kNavStart);
  seen[kNavStart] = true;
  while (!frontier.empty()) {
    int s = frontier.front();
    frontier.pop();
    if (s == kNavGoal) return true;
    for (int a = 0; a < 4; ++a) {
      int s2 = nav_neighbor(blocked, s, a);
      if (!seen[std::size_t(s2)]) {
        seen[std::size_t(s2)] = true;
        frontier.push(s2);
      }
    }
  }
  return false;
}

/// Open cells from which the goal can be reached, goal excluded. Moves are
/// symmetric on the grid, so flooding outward from the goal finds them.
std::vector<int> nav_starts(const std::vector<bool>& blocked) {
  std::vector<bool> seen(kNavStates, false);
  std::queue<int> frontier;
  frontier.push(kNavGoal);
  seen[kNavGoal] = true;
  while (!frontier.empty()) {
    int s = frontier.front();
    frontier.pop();
    for (int a = 0; a < 4; ++a) {
      int s2 = nav_neighbor(blocked, s, a);
      if (!seen[std::size_t(s2)]) {
        seen[std::size_t(s2)] = true;
        frontier.push(s2);
      }
    }
  }
  std::vector<int> starts;
  for (int s = 0; s < kNavStates; ++s) {
    if (s != kNavGoal && !blocked[std::size_t(s)] && seen[std::size_t(s)]) starts.push_back(s);
  }
  return starts;
}

/// Wall segments dropped into the open room; layouts are resampled until the
/// goal stays reachable, and are shared by every agent and seed.
std::vector<std::vector<bool>> nav_layouts(int n_configs, std::uint64_t layout_seed) {
  Rng master(layout_seed);
  std::vector<std::vector<bool>> layouts;
  while (int(layouts.size()) < n_configs) {
    std::vector<bool> blocked(kNavStates, false);
    for (int seg = 0; seg < 6; ++seg) {
      bool horizontal = master.uniform_below(2) == 0;
      int len = 4 + int(master.uniform_below(4));
      int r = int(master.uniform_below(kNavSize));
      int c = int(master.uniform_below(std::uint64_t(kNavSize - len + 1)));
      for (int i = 0; i < len; ++i) {
        int rr = horizontal ? r : c + i;
        int cc = horizontal ? c + i : r;
        int cell = rr * kNavSize + cc;
        if (cell != kNavStart && cell != kNavGoal) blocked[std::size_t(cell)] = true;
      }
    }
    if (nav_reachable(blocked)) layouts.push_back(std::move(blocked));
  }
  return layouts;
}

/// Deterministic move lookup straight from the transition table; returns s
/// itself when the move runs into a wall or the arena edge.
int nav_next(const TabularMDP& mdp, int s, int a) {
  int s2 = 0;
  mdp.transition[std::size_t(a)].row(s).maxCoeff(&s2);
  return s2;
}

/// Barriers are in plain sight: every agent knows which of its four moves are
/// open right now, and never wastes a step walking into a wall.
std::vector<int> nav_moves(const TabularMDP& mdp, int s) {
  std::vector<int> moves;
  for (int a = 0; a < 4; ++a) {
    if (nav_next(mdp, s, a) != s) moves.push_back(a);
  }
  return moves;
}

double max_over(const Eigen::VectorXd& score, const std::vector<int>& moves) {
  double best = std::numeric_limits<double>::lowest();
  for (int a : moves) best = std::max(best, score(a));
  return best;
}

/// Epsilon-greedy over the currently open moves; ties among the best moves
/// break uniformly so a flat stale value surface cannot trap the walk in a
/// deterministic loop.
int eps_greedy_moves(const Eigen::VectorXd& score, const std::vector<int>& moves, double epsilon,
                     Rng& rng) {
  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    return moves[rng.uniform_below(moves.size())];
  }
  double best = max_over(score, moves);
  int picks[4];
  std::uint64_t n = 0;
  for (int a : moves) {
    if (score(a) >= best - 1e-12) picks[n++] = a;
  }
  return picks[rng.uniform_below(n)];
}

/// Uniform-cost search (optionally guided by straight-line distance) over the
/// believed grid.  Returns the cell sequence after `from`, ending at `to`;
/// empty when unreachable.
std::vector<int> nav_plan(const std::vector<bool>& blocked, int from, int to, bool manhattan) {
  if (from == to) return {};
  auto h = [&](int s) {
    if (!manhattan) return 0;
    return std::abs(nav_row(s) - nav_row(to)) + std::abs(nav_col(s) - nav_col(to));
  };
  std::vector<int> dist(kNavStates, std::numeric_limits<int>::max());
  std::vector<int> parent(kNavStates, -1);
  using Node = std::tuple<int, int, int>;  // f, g, cell
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
  dist[std::size_t(from)] = 0;
  open.emplace(h(from), 0, from);
  while (!open.empty()) {
    auto [f, g, s] = open.top();
    open.pop();
    if (g > dist[std::size_t(s)]) continue;
    if (s == to) break;
    for (int a = 0; a < 4; ++a) {
      int s2 = nav_neighbor(blocked, s, a);
      if (s2 == s) continue;
      int ng = g + 1;
      if (ng < dist[std::size_t(s2)]) {
        dist[std::size_t(s2)] = ng;
        parent[std::size_t(s2)] = s;
        open.emplace(ng + h(s2), ng, s2);
      }
    }
  }
  if (parent[std::size_t(to)] < 0) return {};
  std::vector<int> path;
  for (int s = to; s != from; s = parent[std::size_t(s)]) path.push_back(s);
  std::reverse(path.begin(), path.end());
  return path;
}

struct NavMf {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(kNavStates, 4);
  Eigen::MatrixXd trace = Eigen::MatrixXd::Zero(kNavStates, 4);
  Rng rng{0};

  int trial(const TabularMDP& mdp, const NavigationConfig& cfg, bool learn, int start) {
    trace.setZero();
    int s = start;
    int steps = 0;
    while (steps < cfg.max_steps) {
      std::vector<int> moves = nav_moves(mdp, s);
      Eigen::VectorXd row = q.row(s).transpose();
      int a = eps_greedy_moves(row, moves, learn ? cfg.epsilon : 0.0, rng);
      bool was_greedy = q(s, a) >= max_over(row, moves) - 1e-12;
      int s2 = nav_next(mdp, s, a);
      ++steps;
      bool done = mdp.terminal[std::size_t(s2)];
      if (learn) {
        // the bootstrap ranges over open moves only; a walled-off action's
        // untouched zero entry must not prop up the state's value
        double boot =
            done ? 0.0 : max_over(q.row(s2).transpose(), nav_moves(mdp, s2));
        double delta = mdp.reward(s2) + mdp.gamma * boot - q(s, a);
        trace(s, a) = 1.0;
        q += (cfg.mf_eta * delta) * trace;
        if (was_greedy) {
          trace *= mdp.gamma * cfg.mf_lambda;
        } else {
          trace.setZero();  // exploratory move cuts the eligibility chain
        }
      }
      if (done) return steps;
      s = s2;
    }
    return steps;
  }
};

/// Expected-occupancy learner: keeps one row of discounted future state
/// occupancies per cell plus a reward vector, and steps toward whichever open
/// neighbor predicts the best return.  A layout change leaves the reward
/// vector valid; only the occupancy rows near the change need repair, and
/// each TD update rewrites a whole row at once.
struct NavSr {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(kNavStates, kNavStates);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(kNavStates);
  std::vector<std::pair<int, double>> trace;  // recently departed cells
  Rng rng{0};

  NavSr() { m(kNavGoal, kNavGoal) = 1.0; }  // the goal occupies itself, once

  double value(int s) const { return m.row(s).dot(w); }

  void mark(int s) {
    for (auto& [ts, e] : trace) {
      if (ts == s) {
        e = 1.0;
        return;
      }
    }
    trace.emplace_back(s, 1.0);
  }

  int trial(const TabularMDP& mdp, const NavigationConfig& cfg, bool learn, int start) {
    trace.clear();
    int s = start;
    int steps = 0;
    while (steps < cfg.max_steps) {
      std::vector<int> moves = nav_moves(mdp, s);
      Eigen::VectorXd score = Eigen::VectorXd::Zero(4);
      for (int a : moves) score(a) = value(nav_next(mdp, s, a));
      int a = eps_greedy_moves(score, moves, learn ? cfg.epsilon : 0.0, rng);
      bool was_greedy = score(a) >= max_over(score, moves) - 1e-12;
      int s2 = nav_next(mdp, s, a);
      ++steps;
      bool done = mdp.terminal[std::size_t(s2)];
      if (learn) {
        w(s2) += cfg.sr_w_eta * (mdp.reward(s2) - w(s2));
        Eigen::RowVectorXd target = Eigen::RowVectorXd::Zero(kNavStates);
        target(s) = 1.0;
        target += mdp.gamma * m.row(s2);  // the goal row stays frozen at self
        mark(s);
        Eigen::RowVectorXd delta = target - m.row(s);
        for (const auto& [ts, e] : trace) {
          m.row(ts) += (cfg.sr_eta * e) * delta;
        }
        if (was_greedy) {
          double decay = mdp.gamma * cfg.sr_lambda;
          for (auto& [ts, e] : trace) e *= decay;
          std::erase_if(trace, [](const auto& t) { return t.second < 1e-6; });
        } else {
          trace.clear();
        }
      }
      if (done) return steps;
      s = s2;
    }
    return steps;
  }
};

/// The planner searches the arena as it currently stands and walks the
/// shortest route; it is the fully model-based extreme of the trio, limited
/// only by the quality of the search, not by any learning.
int nav_mb_trial(const std::vector<bool>& blocked, const NavigationConfig& cfg, int start) {
  std::vector<int> path = nav_plan(blocked, start, kNavGoal, cfg.manhattan_heuristic);
  if (path.empty()) return cfg.max_steps;
  return int(path.size());
}

}  // namespace

NavigationConfig NavigationConfig::from_json(const json& j) {
  require_keys(j, "navigation",
               {"experiment", "seeds", "n_seeds", "n_configs", "n_trials", "max_steps",
                "pretrain_episodes", "gamma", "goal_reward", "step_reward", "epsilon", "mf_eta",
                "mf_lambda", "sr_eta", "sr_lambda", "sr_w_eta", "manhattan_heuristic",
                "layout_seed"});
  NavigationConfig c;
  c.seeds = jseeds(j, 20);
  c.n_configs = jint(j, "n_configs", c.n_configs);
  c.n_trials = jint(j, "n_trials", c.n_trials);
  c.max_steps = jint(j, "max_steps", c.max_steps);
  c.pretrain_episodes = jint(j, "pretrain_episodes", c.pretrain_episodes);
  c.gamma = jnum(j, "gamma", c.gamma);
  c.goal_reward = jnum(j, "goal_reward", c.goal_reward);
  c.step_reward = jnum(j, "step_reward", c.step_reward);
  c.epsilon = jnum(j, "epsilon", c.epsilon);
  c.mf_eta = jnum(j, "mf_eta", c.mf_eta);
  c.mf_lambda = jnum(j, "mf_lambda", c.mf_lambda);
  c.sr_eta = jnum(j, "sr_eta", c.sr_eta);
  c.sr_lambda = jnum(j, "sr_lambda", c.sr_lambda);
  c.sr_w_eta = jnum(j, "sr_w_eta", c.sr_w_eta);
  if (j.contains("manhattan_heuristic")) {
    if (!j.at("manhattan_heuristic").is_boolean()) {
      throw std::invalid_argument("navigation: manhattan_heuristic must be a boolean");
    }
    c.manhattan_heuristic = j.at("manhattan_heuristic").get<bool>();
  }
  c.layout_seed = juint(j, "layout_seed", c.layout_seed);
  c.validate();
  return c;
}

void NavigationConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("navigation: seeds must be non-empty");
  if (n_configs <= 0 || n_trials <= 0) {
    throw std::invalid_argument("navigation: n_configs and n_trials must be positive");
  }
  if (max_steps <= 0 || pretrain_episodes <= 0) {
    throw std::invalid_argument("navigation: max_steps and pretrain_episodes must be positive");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("navigation: gamma in (0,1)");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("navigation: epsilon in [0,1]");
  }
  if (mf_eta <= 0.0 || sr_eta <= 0.0 || sr_w_eta <= 0.0) {
    throw std::invalid_argument("navigation: learning rates must be positive");
  }
  if (!(mf_lambda >= 0.0 && mf_lambda < 1.0) || !(sr_lambda >= 0.0 && sr_lambda < 1.0)) {
    throw std::invalid_argument("navigation: trace decays must lie in [0,1)");
  }
}

ordered_json NavigationConfig::to_json() const {
  ordered_json j;
  j["experiment"] = "navigation";
  j["seeds"] = seeds_json(seeds);
  j["n_configs"] = n_configs;
  j["n_trials"] = n_trials;
  j["max_steps"] = max_steps;
  j["pretrain_episodes"] = pretrain_episodes;
  j["gamma"] = gamma;
  j["goal_reward"] = goal_reward;
  j["step_reward"] = step_reward;
  j["epsilon"] = epsilon;
  j["mf_eta"] = mf_eta;
  j["mf_lambda"] = mf_lambda;
  j["sr_eta"] = sr_eta;
  j["sr_lambda"] = sr_lambda;
  j["sr_w_eta"] = sr_w_eta;
  j["manhattan_heuristic"] = manhattan_heuristic;
  j["layout_seed"] = layout_seed;
  return j;
}

ordered_json run_navigation(const NavigationConfig& config) {
  config.validate();
  std::vector<bool> open_cells(kNavStates, false);
  TabularMDP open_mdp = nav_mdp(open_cells, config.gamma, config.goal_reward, config.step_reward);
  std::vector<std::vector<bool>> layouts = nav_layouts(config.n_configs, config.layout_seed);
  std::vector<TabularMDP> layout_mdps;
  std::vector<std::vector<int>> starts_by_layout;
  layout_mdps.reserve(layouts.size());
  starts_by_layout.reserve(layouts.size());
  for (const auto& blocked : layouts) {
    layout_mdps.push_back(nav_mdp(blocked, config.gamma, config.goal_reward, config.step_reward));
    starts_by_layout.push_back(nav_starts(blocked));
  }
  std::vector<int> open_starts = nav_starts(open_cells);

  const char* agent_names[] = {"mf", "mb", "sr"};
  std::vector<double> first[3], auc[3];
  std::vector<std::vector<double>> curve(3, std::vector<double>(std::size_t(config.n_trials), 0.0));
  ordered_json records = ordered_json::array();

  for (std::uint64_t seed : config.seeds) {
    Rng base(seed);
    NavMf mf;
    mf.rng = base.split(21);
    NavSr sr;
    sr.rng = base.split(22);
    Rng start_rng = base.split(24);
    // Pretraining runs at high exploration from scattered starts so the
    // learned values and occupancies cover the whole room, not just one
    // greedy corridor; the barrier phase then measures how fast stale
    // estimates get repaired, not how long first visits take.
    NavigationConfig pretrain = config;
    pretrain.epsilon = 0.5;
    for (int e = 0; e < config.pretrain_episodes; ++e) {
      int s0 = open_starts[start_rng.uniform_below(open_starts.size())];
      mf.trial(open_mdp, pretrain, true, s0);
      sr.trial(open_mdp, pretrain, true, s0);
    }

    ordered_json rec;
    rec["seed"] = seed;
    ordered_json per_agent[3];
    // Wall configurations arrive one after another and the incremental
    // learners are never reset: their estimates carry whatever the previous
    // walls did to them. Each trial starts from a random goal-reachable
    // cell, shared by all three agents, so a slow agent is one that fails
    // to move value toward starts it has not visited lately.
    for (int c = 0; c < config.n_configs; ++c) {
      const TabularMDP& world = layout_mdps[std::size_t(c)];
      const std::vector<bool>& blocked = layouts[std::size_t(c)];
      const std::vector<int>& starts = starts_by_layout[std::size_t(c)];
      std::vector<double> steps[3];
      for (int t = 0; t < config.n_trials; ++t) {
        int s0 = starts[start_rng.uniform_below(starts.size())];
        steps[0].push_back(double(mf.trial(world, config, true, s0)));
        steps[1].push_back(double(nav_mb_trial(blocked, config, s0)));
        steps[2].push_back(double(sr.trial(world, config, true, s0)));
      }
      for (int a = 0; a < 3; ++a) {
        first[a].push_back(steps[a].front());
        double total = 0.0;
        for (int t = 0; t < config.n_trials; ++t) {
          total += steps[a][std::size_t(t)];
          curve[std::size_t(a)][std::size_t(t)] += steps[a][std::size_t(t)];
        }
        auc[a].push_back(total);
        per_agent[a]["first"].push_back(steps[a].front());
        per_agent[a]["auc"].push_back(total);
      }
    }
    for (int a = 0; a < 3; ++a) rec[agent_names[a]] = per_agent[a];
    records.push_back(rec);
  }

  double denom = double(config.seeds.size() * std::size_t(config.n_configs));
  for (auto& c : curve) {
    for (double& v : c) v /= denom;
  }

  double med_first[3], mean_auc[3];
  for (int a = 0; a < 3; ++a) {
    med_first[a] = median(first[a]);
    mean_auc[a] = mean(auc[a]);
  }
  double p_mb_sr = wilcoxon_less(auc[1], auc[2]);
  double p_sr_mf = wilcoxon_less(auc[2], auc[0]);

  ordered_json checks;
  checks["first_trial_order"] = med_first[1] <= med_first[2] && med_first[2] <= med_first[0];
  checks["auc_order"] = mean_auc[1] < mean_auc[2] && mean_auc[2] < mean_auc[0];
  checks["wilcoxon_mb_lt_sr"] = p_mb_sr < 0.05;
  checks["wilcoxon_sr_lt_mf"] = p_sr_mf < 0.05;

  ordered_json layouts_json = ordered_json::array();
  for (const auto& blocked : layouts) {
    ordered_json cells = ordered_json::array();
    for (int s = 0; s < kNavStates; ++s) {
      if (blocked[std::size_t(s)]) cells.push_back(s);
    }
    layouts_json.push_back(cells);
  }

  ordered_json report;
  report["config"] = config.to_json();
  report["version"] = PREDREP_VERSION;
  report["layouts"] = layouts_json;
  ordered_json agg;
  for (int a = 0; a < 3; ++a) {
    ordered_json row;
    row["median_first_trial"] = med_first[a];
    row["mean_auc"] = mean_auc[a];
    row["mean_curve"] = curve[std::size_t(a)];
    agg[agent_names[a]] = row;
  }
  agg["wilcoxon_p_mb_lt_sr"] = p_mb_sr;
  agg["wilcoxon_p_sr_lt_mf"] = p_sr_mf;
  report["aggregate"] = agg;
  report["records"] = records;
  report["checks"] = checks;
  return report;
}

// ======================== replay demo ========================

ReplayDemoConfig ReplayDemoConfig::from_json(const json& j) {
  require_keys(j, "replay", {"experiment", "track_length", "gamma", "threshold",
                             "forward_min_gain"});
  ReplayDemoConfig c;
  c.track_length = jint(j, "track_length", c.track_length);
  c.gamma = jnum(j, "gamma", c.gamma);
  c.threshold = jnum(j, "threshold", c.threshold);
  c.forward_min_gain = jnum(j, "forward_min_gain", c.forward_min_gain);
  c.validate();
  return c;
}

void ReplayDemoConfig::validate() const {
  if (track_length < 3) throw std::invalid_argument("replay: track_length >= 3");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("replay: gamma in (0,1)");
  if (threshold <= 0.0) throw std::invalid_argument("replay: threshold must be positive");
  if (forward_min_gain <= 0.0) {
    throw std::invalid_argument("replay: forward_min_gain must be positive");
  }
}

ordered_json ReplayDemoConfig::to_json() const {
  ordered_json j;
  j["experiment"] = "replay";
  j["track_length"] = track_length;
  j["gamma"] = gamma;
  j["threshold"] = threshold;
  j["forward_min_gain"] = forward_min_gain;
  return j;
}

namespace {

struct ReplayTrack {
  TabularMDP episodic;  // east/west track, rewarded terminal at the east end
  SRMatrix need;        // eastbound behavior with trial restarts
};

ReplayTrack replay_track(int n, double gamma) {
  std::vector<std::vector<int>> next(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    next[std::size_t(s)] = {std::min(s + 1, n - 1), std::max(s - 1, 0)};
  }
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  r(n - 1) = 1.0;
  std::vector<bool> term(std::size_t(n), false);
  term[std::size_t(n - 1)] = true;
  ReplayTrack track;
  track.episodic = chain_mdp(gamma, next, r, term);

  // Behavior across trials: run east, then restart at the west end.  The
  // resulting loop is what gives every state positive expected need.
  std::vector<std::vector<int>> loop_next = next;
  loop_next[std::size_t(n - 1)] = {0, n - 2};
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  TabularMDP loop = chain_mdp(gamma, loop_next, zero, std::vector<bool>(std::size_t(n), false));
  track.need = sr_closed_form(loop, constant_policy(n, 2, 0));
  return track;
}

}  // namespace

ordered_json run_replay_demo(const ReplayDemoConfig& config) {
  config.validate();
  int n = config.track_length;
  ReplayTrack track = replay_track(n, config.gamma);

  std::vector<std::pair<int, int>> candidates;
  for (int s = 0; s < n - 1; ++s) {
    candidates.emplace_back(s, 0);
    candidates.emplace_back(s, 1);
  }

  // Reverse sweep: the agent has just found the reward at the east end and
  // all values are still flat.
  Eigen::MatrixXd q0 = Eigen::MatrixXd::Zero(n, 2);
  ReplayConfig reverse_cfg;
  reverse_cfg.threshold = config.threshold;
  ReplayTrace reverse = replay_simulate(track.need, q0, track.episodic, n - 1, candidates,
                                        reverse_cfg);
  bool reverse_ok = int(reverse.executed.size()) == n - 1;
  for (int i = 0; i < int(reverse.executed.size()) && reverse_ok; ++i) {
    reverse_ok = reverse.executed[std::size_t(i)].state == n - 2 - i &&
                 reverse.executed[std::size_t(i)].action == 0;
  }

  // Forward sweep: values converged (every backup is exact), a gain floor on,
  // the agent back at the west end.  Order is now carried by need alone.
  Eigen::MatrixXd q_star = Eigen::MatrixXd::Zero(n, 2);
  for (int sweep = 0; sweep < 4 * n; ++sweep) {
    for (int s = 0; s < n - 1; ++s) {
      for (int a = 0; a < 2; ++a) {
        int s2 = a == 0 ? std::min(s + 1, n - 1) : std::max(s - 1, 0);
        double cont = s2 == n - 1 ? 0.0 : q_star.row(s2).maxCoeff();
        q_star(s, a) = track.episodic.reward(s2) + config.gamma * cont;
      }
    }
  }
  std::vector<std::pair<int, int>> east_only;
  for (int s = 0; s < n - 1; ++s) east_only.emplace_back(s, 0);
  ReplayConfig forward_cfg;
  forward_cfg.min_gain = config.forward_min_gain;
  // Every backup is already exact, so re-ranking the full pool would pick the
  // same winner forever; here each event fires once and leaves the pool.
  ReplayTrace forward;
  forward.q_final = q_star;
  while (!east_only.empty()) {
    ReplayCandidate best = replay_priorities(track.need, forward.q_final, track.episodic, 0,
                                             east_only, forward_cfg)
                               .front();
    forward.executed.push_back(best);
    east_only.erase(std::remove(east_only.begin(), east_only.end(),
                                std::make_pair(best.state, best.action)),
                    east_only.end());
  }
  std::vector<int> expected_forward;
  for (int s = 1; s <= n - 2; ++s) expected_forward.push_back(s);
  expected_forward.push_back(0);
  bool forward_ok = int(forward.executed.size()) == n - 1;
  for (int i = 0; i < int(forward.executed.size()) && forward_ok; ++i) {
    forward_ok = forward.executed[std::size_t(i)].state == expected_forward[std::size_t(i)];
  }

  auto trace_json = [](const ReplayTrace& trace) {
    ordered_json a = ordered_json::array();
    for (const ReplayCandidate& c : trace.executed) {
      ordered_json e;
      e["state"] = c.state;
      e["action"] = c.action;
      e["need"] = c.need;
      e["gain"] = c.gain;
      e["evb"] = c.evb;
      a.push_back(e);
    }
    return a;
  };

  ordered_json checks;
  checks["reverse_chain_exact"] = reverse_ok;
  checks["forward_need_order"] = forward_ok;

  ordered_json report;
  report["config"] = config.to_json();
  report["version"] = PREDREP_VERSION;
  report["reverse"] = trace_json(reverse);
  report["forward"] = trace_json(forward);
  report["checks"] = checks;
  return report;
}

// ======================== receptive-field maps ========================

NeuroMapsConfig NeuroMapsConfig::from_json(const json& j) {
  require_keys(j, "neuro", {"experiment", "room_size", "n_eigenmaps", "track_length", "gamma",
                            "out_dir"});
  NeuroMapsConfig c;
  c.room_size = jint(j, "room_size", c.room_size);
  c.n_eigenmaps = jint(j, "n_eigenmaps", c.n_eigenmaps);
  c.track_length = jint(j, "track_length", c.track_length);
  c.gamma = jnum(j, "gamma", c.gamma);
  c.out_dir = jstr(j, "out_dir", c.out_dir);
  c.validate();
  return c;
}

void NeuroMapsConfig::validate() const {
  if (room_size < 4) throw std::invalid_argument("neuro: room_size >= 4");
  if (n_eigenmaps < 1) throw std::invalid_argument("neuro: n_eigenmaps >= 1");
  if (track_length < 4) throw std::invalid_argument("neuro: track_length >= 4");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("neuro: gamma in (0,1)");
}

ordered_json NeuroMapsConfig::to_json() const {
  ordered_json j;
  j["experiment"] = "neuro";
  j["room_size"] = room_size;
  j["n_eigenmaps"] = n_eigenmaps;
  j["track_length"] = track_length;
  j["gamma"] = gamma;
  j["out_dir"] = out_dir;
  return j;
}

ordered_json run_neuro_maps(const NeuroMapsConfig& config) {
  config.validate();
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  auto save = [&](const std::string& name, const Eigen::MatrixXd& m) {
    if (config.out_dir.empty()) return;
    fs::create_directories(config.out_dir);
    std::string path = (fs::path(config.out_dir) / name).string();
    write_csv_matrix(path, m);
    files.push_back(name);
  };

  ordered_json report;
  report["config"] = config.to_json();
  report["version"] = PREDREP_VERSION;

  // Open square room under a uniform walk.
  GridWorld square = square_room(config.room_size);
  TabularMDP mdp = gridworld_mdp(square, config.gamma);
  SRMatrix m = sr_closed_form(mdp, uniform_policy(mdp.n_states(), mdp.n_actions()));
  int k = std::min(config.n_eigenmaps, mdp.n_states());
  std::vector<FieldMap> maps = grid_fields(m, square, k);
  EigenBasis basis = eigen_decompose_sr(m, k);
  for (int i = 0; i < k; ++i) save("square_eigenmap_" + std::to_string(i) + ".csv", maps[std::size_t(i)].values);
  int center = square.state_at(config.room_size / 2, config.room_size / 2);
  save("square_place_field.csv", place_field(m, square, center).values);
  save("square_population.csv", population_vector(m, square, center).values);
  int ac_index = std::min(2, k - 1);
  Eigen::MatrixXd ac = autocorrelation(maps[std::size_t(ac_index)], square);
  save("square_autocorr.csv", ac);
  auto peaks = autocorr_peaks(ac, 0.1);
  report["square"]["eigenvalues"] = std::vector<double>(basis.values.data(),
                                                        basis.values.data() + basis.values.size());
  report["square"]["autocorr_peaks"] = int(peaks.size());

  // Trapezoidal room: same analysis on a distorted boundary.
  GridWorld trap = trapezoid_room(config.room_size, std::max(4, config.room_size / 2));
  TabularMDP trap_mdp = gridworld_mdp(trap, config.gamma);
  SRMatrix trap_m = sr_closed_form(trap_mdp, uniform_policy(trap_mdp.n_states(), trap_mdp.n_actions()));
  int k_trap = std::min(config.n_eigenmaps, trap_mdp.n_states());
  std::vector<FieldMap> trap_maps = grid_fields(trap_m, trap, k_trap);
  for (int i = 0; i < k_trap; ++i) {
    save("trapezoid_eigenmap_" + std::to_string(i) + ".csv", trap_maps[std::size_t(i)].values);
  }
  EigenBasis trap_basis = eigen_decompose_sr(trap_m, k_trap);
  report["trapezoid"]["eigenvalues"] = std::vector<double>(
      trap_basis.values.data(), trap_basis.values.data() + trap_basis.values.size());

  // Linear track under one-way travel: fields should lean backward.  The
  // state one step past the start is excluded: its field is a single cell
  // (exactly one predecessor), so its skew is identically zero rather than a
  // measurement.  Checked fields are those peaking strictly inside the track.
  GridWorld trackw = linear_track(config.track_length);
  TabularMDP track_mdp = gridworld_mdp(trackw, config.gamma);
  SRMatrix track_m = sr_closed_form(track_mdp, constant_policy(track_mdp.n_states(),
                                                               track_mdp.n_actions(), 1));
  std::vector<double> skews;
  bool all_negative = true;
  Eigen::MatrixXd track_fields(config.track_length - 3, config.track_length);
  for (int s = 2; s + 1 < config.track_length; ++s) {
    FieldMap field = place_field(track_m, trackw, s);
    track_fields.row(s - 2) = field.values.row(0);
    SkewResult skew = skew_metric(field, 1);
    skews.push_back(skew.value);
    all_negative = all_negative && !skew.flat && skew.value < 0.0;
  }
  save("track_fields.csv", track_fields);
  report["track"]["skew"] = skews;

  bool finite = m.m.allFinite() && trap_m.m.allFinite() && track_m.m.allFinite();
  ordered_json checks;
  checks["track_skew_negative"] = all_negative;
  checks["fields_finite"] = finite;
  report["files"] = files;
  report["checks"] = checks;
  return report;
}

// ======================== CLI tool runners ========================

namespace {

GridWorld world_from_json(const json& cfg) {
  if (!cfg.contains("world")) return serpentine_maze();
  const json& w = cfg.at("world");
  if (w.is_string()) return parse_gridworld(w.get<std::string>());
  require_keys(w, "world", {"type", "size", "length", "width", "height", "text"});
  std::string type = jstr(w, "type", "");
  if (type == "square") return square_room(jint(w, "size", 8));
  if (type == "four_rooms") return four_rooms();
  if (type == "two_room") return two_room_map();
  if (type == "track") return linear_track(jint(w, "length", 10));
  if (type == "trapezoid") return trapezoid_room(jint(w, "width", 16), jint(w, "height", 8));
  if (type == "serpentine") return serpentine_maze();
  if (type == "text") {
    if (!w.contains("text") || !w.at("text").is_array()) {
      throw std::invalid_argument("world: type \"text\" needs a \"text\" array of rows");
    }
    std::string joined;
    for (const auto& row : w.at("text")) {
      if (!row.is_string()) throw std::invalid_argument("world: text rows must be strings");
      joined += row.get<std::string>();
      joined += '\n';
    }
    return parse_gridworld(joined);
  }
  throw std::invalid_argument("world: unknown type \"" + type + "\"");
}

TabularMDP tool_mdp(const json& cfg, const GridWorld& world, double default_gamma,
                    const GridRewards& default_rewards) {
  GridRewards rewards;
  rewards.goal = jnum(cfg, "goal_reward", default_rewards.goal);
  rewards.step = jnum(cfg, "step_reward", default_rewards.step);
  double gamma = jnum(cfg, "gamma", default_gamma);
  double slip = jnum(cfg, "slip", 0.0);
  return gridworld_mdp(world, gamma, rewards, slip);
}

std::string out_path(const std::string& out_dir, const std::string& name) {
  std::filesystem::create_directories(out_dir);
  return (std::filesystem::path(out_dir) / name).string();
}

}  // namespace

ordered_json run_sr_tool(const json& config, const std::string& out_dir,
                         const std::string& format) {
  require_keys(config, "sr", {"world", "gamma", "slip", "goal_reward", "step_reward", "policy"});
  GridWorld world = world_from_json(config);
  bool is_default_world = !config.contains("world");
  TabularMDP mdp = tool_mdp(config, world,
                            is_default_world ? serpentine_gamma() : 0.95,
                            is_default_world ? serpentine_rewards() : GridRewards{});
  std::string policy_kind = jstr(config, "policy", "uniform");
  PolicyMatrix policy;
  if (policy_kind == "uniform") {
    policy = uniform_policy(mdp.n_states(), mdp.n_actions());
  } else if (policy_kind == "optimal") {
    policy = value_iteration(mdp).policy;
  } else {
    throw std::invalid_argument("sr: policy must be \"uniform\" or \"optimal\"");
  }

  SRMatrix m = sr_closed_form(mdp, policy);
  SuccessorModel sm = successor_model(m);
  Eigen::VectorXd v = value_from_sr(m, mdp.reward);

  Eigen::MatrixXd t = policy_transition_matrix(mdp, policy);
  double bellman = (m.m - t * (Eigen::MatrixXd::Identity(mdp.n_states(), mdp.n_states()) +
                               mdp.gamma * m.m))
                       .cwiseAbs()
                       .maxCoeff();
  double row_err = (sm.mu.rowwise().sum().array() - 1.0).abs().maxCoeff();
  double value_err = (v - policy_evaluation_exact(mdp, policy)).cwiseAbs().maxCoeff();

  std::vector<std::string> files;
  if (!out_dir.empty() && format == "csv") {
    write_csv_matrix(out_path(out_dir, "sr_matrix.csv"), m.m);
    write_csv_matrix(out_path(out_dir, "successor_model.csv"), sm.mu);
    write_csv_matrix(out_path(out_dir, "values.csv"), v);
    files = {"sr_matrix.csv", "successor_model.csv", "values.csv"};
  }

  ordered_json report;
  report["tool"] = "sr";
  report["world"] = world.text;
  report["n_states"] = mdp.n_states();
  report["gamma"] = mdp.gamma;
  report["policy"] = policy_kind;
  if (format == "json") {
    report["sr_matrix"] = matrix_to_json(m.m);
    report["successor_model"] = matrix_to_json(sm.mu);
    report["values"] = vector_to_json(v);
  }
  report["files"] = files;
  ordered_json checks;
  checks["bellman_residual_ok"] = bellman <= 1e-8;
  checks["row_sums_ok"] = row_err <= 1e-8;
  checks["values_match_exact"] = value_err <= 1e-8;
  report["residuals"] = {{"bellman", bellman}, {"row_sum", row_err}, {"value", value_err}};
  report["checks"] = checks;
  return report;
}

ordered_json run_sf_tool(const json& config, const std::string& out_dir,
                         const std::string& format) {
  require_keys(config, "sf", {"world", "gamma", "slip", "goal_reward", "step_reward",
                              "goal_cells", "test_goal_cells"});
  GridWorld world = config.contains("world") ? world_from_json(config) : four_rooms();
  TabularMDP base = tool_mdp(config, world, 0.95, GridRewards{});
  base.reward.setZero();
  int n = base.n_states();
  FeatureMap features = FeatureMap::one_hot(n);

  auto cells_to_states = [&](const json& arr, const char* key) {
    std::vector<int> states;
    for (const auto& cell : arr) {
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number_integer() ||
          !cell[1].is_number_integer()) {
        throw std::invalid_argument(std::string("sf: ") + key + " entries must be [row, col]");
      }
      int r = cell[0].get<int>(), c = cell[1].get<int>();
      if (r < 0 || r >= world.rows || c < 0 || c >= world.cols || world.state_at(r, c) < 0) {
        throw std::invalid_argument(std::string("sf: ") + key + " cell is outside the map");
      }
      states.push_back(world.state_at(r, c));
    }
    return states;
  };

  std::vector<int> goals;
  if (config.contains("goal_cells")) {
    goals = cells_to_states(config.at("goal_cells"), "goal_cells");
  } else {
    goals = {world.state_at(1, 1), world.state_at(world.rows - 2, world.cols - 2)};
  }
  if (goals.empty()) throw std::invalid_argument("sf: need at least one goal cell");

  std::vector<PolicyMatrix> policies;
  std::vector<SFTensor> library;
  std::vector<TaskVector> tasks;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    TaskVector w = TaskVector::Zero(n);
    w(goals[i]) = 1.0;
    tasks.push_back(w);
    TabularMDP task = base;
    task.reward = w;
    policies.push_back(value_iteration(task).policy);
    SFTensor sf = sf_closed_form(base, policies.back(), features);
    sf.policy_id = int(i);
    library.push_back(std::move(sf));
  }

  TaskVector w_test = TaskVector::Zero(n);
  if (config.contains("test_goal_cells")) {
    for (int s : cells_to_states(config.at("test_goal_cells"), "test_goal_cells")) {
      w_test(s) = 1.0;
    }
  } else {
    for (const TaskVector& w : tasks) w_test += w;
  }

  Eigen::MatrixXd gpi_table(n, 2);
  PolicyMatrix gpi = PolicyMatrix::Zero(n, base.n_actions());
  for (int s = 0; s < n; ++s) {
    GpiChoice choice = gpi_action(library, w_test, s);
    gpi(s, choice.action) = 1.0;
    gpi_table(s, 0) = choice.action;
    gpi_table(s, 1) = choice.policy_index;
  }
  TabularMDP test_task = base;
  test_task.reward = w_test;
  Eigen::VectorXd v_gpi = policy_evaluation_exact(test_task, gpi);
  Eigen::VectorXd v_opt = value_iteration(test_task).v;

  Eigen::MatrixXd q_gpi = q_from_action_sr(sr_action_closed_form(test_task, gpi),
                                           test_task.reward);
  double margin = std::numeric_limits<double>::infinity();
  for (const PolicyMatrix& pol : policies) {
    Eigen::MatrixXd q = q_from_action_sr(sr_action_closed_form(test_task, pol), test_task.reward);
    margin = std::min(margin, (q_gpi - q).minCoeff());
  }

  std::vector<std::string> files;
  if (!out_dir.empty() && format == "csv") {
    write_csv_matrix(out_path(out_dir, "gpi_policy.csv"), gpi_table,
                     {"column 0: action", "column 1: library policy index"});
    write_csv_matrix(out_path(out_dir, "gpi_values.csv"), v_gpi);
    files = {"gpi_policy.csv", "gpi_values.csv"};
  }

  ordered_json report;
  report["tool"] = "sf";
  report["world"] = world.text;
  report["n_states"] = n;
  report["gamma"] = base.gamma;
  report["library_goals"] = goals;
  if (format == "json") {
    report["gpi_table"] = matrix_to_json(gpi_table);
    report["gpi_values"] = vector_to_json(v_gpi);
  }
  report["start_value"] = world.start_state >= 0 ? v_gpi(world.start_state) : v_gpi(0);
  report["optimality_gap_max"] = (v_opt - v_gpi).maxCoeff();
  report["files"] = files;
  ordered_json checks;
  checks["gpi_dominates_library"] = margin >= -1e-8;
  report["checks"] = checks;
  return report;
}

ordered_json run_explore_tool(const json& config, const std::string& out_dir,
                              const std::string& format) {
  require_keys(config, "explore",
               {"world", "gamma", "slip", "goal_reward", "step_reward", "n_options",
                "walk_steps", "seed"});
  GridWorld world = config.contains("world") ? world_from_json(config) : four_rooms();
  TabularMDP mdp = tool_mdp(config, world, 0.95, GridRewards{});
  int n_options = jint(config, "n_options", 4);
  int walk_steps = jint(config, "walk_steps", 4000);
  std::uint64_t seed = juint(config, "seed", 1);
  if (n_options < 1) throw std::invalid_argument("explore: n_options >= 1");
  if (walk_steps < 1) throw std::invalid_argument("explore: walk_steps >= 1");

  int n = mdp.n_states();
  PolicyMatrix uniform = uniform_policy(n, mdp.n_actions());
  SRMatrix m = sr_closed_form(mdp, uniform);
  int k = std::min(n_options + 1, n);
  EigenBasis basis = eigen_decompose_sr(m, k);

  ordered_json options_json = ordered_json::array();
  bool options_ok = true;
  std::vector<std::string> files;
  for (int i = 1; i < k; ++i) {
    OptionDef option = eigenoption_from_vector(mdp, basis.vectors.col(i), i);
    int init = 0, term = 0;
    for (int s = 0; s < n; ++s) {
      init += option.initiation[std::size_t(s)] ? 1 : 0;
      term += option.termination[std::size_t(s)] ? 1 : 0;
    }
    options_ok = options_ok && init > 0 && term > 0;
    ordered_json o;
    o["eigenvector_index"] = i;
    o["initiation_size"] = init;
    o["termination_size"] = term;
    options_json.push_back(o);
    if (!out_dir.empty() && format == "csv") {
      FieldMap fieldmap;
      fieldmap.values = Eigen::MatrixXd::Zero(world.rows, world.cols);
      for (int s = 0; s < n; ++s) {
        auto [r, c] = world.cell_of_state[std::size_t(s)];
        fieldmap.values(r, c) = basis.vectors(s, i);
      }
      std::string name = "eigenvector_" + std::to_string(i) + ".csv";
      write_csv_matrix(out_path(out_dir, name), fieldmap.values);
      files.push_back(name);
    }
  }

  // Landmark map from a uniform walk: states join the graph when they look
  // unlike every stored landmark; consecutive localizations get connected.
  SFTensor sf = sf_closed_form(mdp, uniform, FeatureMap::one_hot(n));
  LandmarkGraph graph;
  Rng rng(seed);
  int s = int(rng.uniform_below(std::uint64_t(n)));
  int previous = -1;
  for (int step = 0; step < walk_steps; ++step) {
    landmark_maybe_add(graph, sf, s);
    int at = landmark_localize(graph, sf, s);
    if (previous >= 0 && at >= 0 && at != previous) landmark_connect(graph, previous, at);
    previous = at;
    int a = int(rng.uniform_below(std::uint64_t(mdp.n_actions())));
    s = sample_next(mdp, s, a, rng);
  }

  std::vector<int> route;
  if (graph.size() >= 2) route = landmark_path(graph, 0, graph.size() - 1);

  ordered_json report;
  report["tool"] = "explore";
  report["world"] = world.text;
  report["n_states"] = n;
  report["eigenvalues"] = std::vector<double>(basis.values.data(),
                                              basis.values.data() + basis.values.size());
  report["options"] = options_json;
  report["landmarks"] = graph.landmarks;
  ordered_json adjacency = ordered_json::array();
  for (const auto& edges : graph.adjacency) adjacency.push_back(edges);
  report["landmark_adjacency"] = adjacency;
  report["landmark_route"] = route;
  report["files"] = files;
  ordered_json checks;
  checks["options_well_formed"] = options_ok;
  checks["landmarks_found"] = graph.size() >= 1;
  checks["landmarks_connected"] = graph.size() < 2 || !route.empty();
  report["checks"] = checks;
  return report;
}

bool all_checks_pass(const json& report) {
  if (!report.contains("checks")) return true;
  for (const auto& item : report.at("checks").items()) {
    if (!item.value().is_boolean() || !item.value().get<bool>()) return false;
  }
  return true;
}

}  // namespace predrep
