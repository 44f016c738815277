#include "doctest.h"

#include <stdexcept>

#include "predrep/envs.hpp"
#include "predrep/rng.hpp"
#include "predrep/sr.hpp"
#include "predrep/tcm.hpp"

using namespace predrep;

namespace {

bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

TEST_SUITE("tcm") {

TEST_CASE("context drifts as a convex blend of stimuli") {
  ContextVector ctx = make_context(3, 0.25);
  CHECK(ctx.c.isZero());
  context_update(ctx, Eigen::VectorXd::Ones(3));
  CHECK(ctx.c(0) == doctest::Approx(0.25));
  context_update(ctx, Eigen::VectorXd::Unit(3, 0));
  CHECK(ctx.c(0) == doctest::Approx(0.75 * 0.25 + 0.25));
  CHECK(ctx.c(1) == doctest::Approx(0.75 * 0.25));

  CHECK_THROWS_AS(make_context(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_context(3, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(context_update(ctx, Eigen::VectorXd::Ones(2)), std::invalid_argument);
}

TEST_CASE("binding is a scaled outer product") {
  AssociationMatrix assoc = make_association(2, 3, AssocMode::hebbian);
  ContextVector ctx = make_context(3, 1.0);
  context_update(ctx, (Eigen::VectorXd(3) << 0.5, 0.0, 1.0).finished());
  Eigen::VectorXd phi(2);
  phi << 1.0, 2.0;
  tcm_hebbian_update(assoc, phi, ctx, 2.0);
  Eigen::MatrixXd expected(2, 3);
  expected << 1.0, 0.0, 2.0, 2.0, 0.0, 4.0;
  CHECK((assoc.m - expected).lpNorm<Eigen::Infinity>() == 0.0);

  // repeated pairings accumulate without correction
  tcm_hebbian_update(assoc, phi, ctx, 2.0);
  CHECK(assoc.m(1, 2) == doctest::Approx(8.0));
}

TEST_CASE("modes are enforced and TD associations must be square") {
  CHECK_THROWS_AS(make_association(2, 3, AssocMode::td), std::invalid_argument);
  AssociationMatrix hebb = make_association(2, 2, AssocMode::hebbian);
  AssociationMatrix td = make_association(2, 2, AssocMode::td, 0.5);
  ContextVector ctx = make_context(2, 1.0);
  CHECK_THROWS_AS(tcm_td_update(hebb, 0, 1, ctx, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(tcm_hebbian_update(td, Eigen::VectorXd::Ones(2), ctx, 0.1),
                  std::invalid_argument);
}

TEST_CASE("one-hot contexts reproduce the occupancy TD learner bit for bit") {
  Rng rng(71);
  TabularMDP mdp = random_mdp(5, 2, 0.8, rng);
  PolicyMatrix pi = random_policy(5, 2, rng);
  AssociationMatrix assoc = make_association(5, 5, AssocMode::td, 0.8);
  SRMatrix plain = sr_td_init(5, 0.8);
  ContextVector ctx = make_context(5, 1.0);
  int s = 0;
  for (int t = 0; t < 400; ++t) {
    context_update(ctx, Eigen::VectorXd::Unit(5, s));
    int a = rng.categorical(pi.row(s).transpose());
    int s2 = rng.categorical(mdp.transition[a].row(s).transpose());
    double eta = 0.1 / (1.0 + t / 100.0);
    tcm_td_update(assoc, s, s2, ctx, eta);
    sr_td_step(plain, s, s2, eta);
    s = s2;
  }
  CHECK(bitwise_equal(assoc.m, plain.m));
}

TEST_CASE("lingering context spreads the update over predecessors") {
  AssociationMatrix assoc = make_association(3, 3, AssocMode::td, 0.5);
  ContextVector ctx = make_context(3, 0.5);
  context_update(ctx, Eigen::VectorXd::Unit(3, 0));
  context_update(ctx, Eigen::VectorXd::Unit(3, 1));  // c = [0.25, 0.5, 0]
  tcm_td_update(assoc, 1, 2, ctx, 0.4);
  // delta = e_2 (gamma row of successor still zero), rows get credit * eta
  CHECK(assoc.m(0, 2) == doctest::Approx(0.4 * 0.25));
  CHECK(assoc.m(1, 2) == doctest::Approx(0.4 * 0.5));
  CHECK(assoc.m(2, 2) == doctest::Approx(0.0));
}

TEST_CASE("salient arrivals imprint faster") {
  AssociationMatrix tagged = make_association(3, 3, AssocMode::td, 0.5);
  AssociationMatrix plain = make_association(3, 3, AssocMode::td, 0.5);
  ContextVector ctx = make_context(3, 1.0);
  context_update(ctx, Eigen::VectorXd::Unit(3, 0));
  Eigen::VectorXd salience(3);
  salience << 1.0, 1.0, 2.0;
  tcm_td_update(tagged, 0, 2, ctx, 0.125, salience);
  tcm_td_update(plain, 0, 2, ctx, 0.25);
  CHECK(bitwise_equal(tagged.m, plain.m));
}

TEST_CASE("frozen-context evaluation reads the association row") {
  // With omega = 0 the context stays at the query, draws are i.i.d. from the
  // query's row, and the retrieved mass rescales the per-draw reward average:
  // for an exact occupancy matrix the score estimates the value 4/3.
  TabularMDP mdp = make_swap_chain(0.5);
  SRMatrix sr = sr_closed_form(mdp, uniform_policy(2, 2));
  AssociationMatrix assoc = make_association(2, 2, AssocMode::td, 0.5);
  assoc.m = sr.m;
  Rng rng(72);
  TcmEstimate est = tcm_sr_evaluate(assoc, mdp.reward, 0, 0.0, 0.5, 4000, 1, rng);
  CHECK(est.clamped == 0);
  CHECK(est.uniform_fallbacks == 0);
  CHECK(std::abs(est.mean - 4.0 / 3.0) < 3.5 * est.std_error + 1e-9);
}

TEST_CASE("drifting-context evaluation rolls out the one-step associations") {
  // omega = 1 on a deterministic chain: every run is the same alternating
  // rollout, and the truncation rescale is exact because the cycle period
  // divides the depth, so the estimate is exactly 4/3 with zero spread.
  AssociationMatrix assoc = make_association(2, 2, AssocMode::td, 0.0);
  assoc.m << 0.0, 1.0, 1.0, 0.0;
  Eigen::VectorXd reward(2);
  reward << 0.0, 1.0;
  Rng rng(73);
  TcmEstimate est = tcm_sr_evaluate(assoc, reward, 0, 1.0, 0.5, 32, 6, rng);
  CHECK(est.mean == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(est.std_error == doctest::Approx(0.0));
}

TEST_CASE("bound stimulus pairs support the same rollout") {
  // Square Hebbian matrix trained on the swap chain: arrivals bound to the
  // context of their predecessor give columns that act like transition rows.
  AssociationMatrix assoc = make_association(2, 2, AssocMode::hebbian);
  ContextVector ctx = make_context(2, 1.0);
  int s = 0;
  for (int t = 0; t < 10; ++t) {
    context_update(ctx, Eigen::VectorXd::Unit(2, s));
    int s2 = 1 - s;
    tcm_hebbian_update(assoc, Eigen::VectorXd::Unit(2, s2), ctx, 1.0);
    s = s2;
  }
  Eigen::VectorXd reward(2);
  reward << 0.0, 1.0;
  Rng rng(74);
  TcmEstimate est = tcm_sr_evaluate(assoc, reward, 0, 1.0, 0.5, 16, 6, rng);
  CHECK(est.mean == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("empty and negative retrievals are accounted, not hidden") {
  AssociationMatrix assoc = make_association(2, 2, AssocMode::td, 0.5);
  Eigen::VectorXd reward(2);
  reward << 1.0, 1.0;
  Rng rng(75);
  TcmEstimate empty = tcm_sr_evaluate(assoc, reward, 0, 0.0, 0.5, 8, 3, rng);
  CHECK(empty.uniform_fallbacks == 8 * 3);
  CHECK(empty.mean == doctest::Approx(0.0));  // no retrieved mass, no value

  assoc.m << 0.5, -0.25, 0.5, 0.5;
  TcmEstimate clamped = tcm_sr_evaluate(assoc, reward, 0, 0.0, 0.5, 8, 1, rng);
  CHECK(clamped.clamped == 8);
  CHECK(clamped.mean == doctest::Approx(0.5));  // clamped row mass times reward
}

TEST_CASE("evaluator input validation") {
  AssociationMatrix rect = make_association(2, 3, AssocMode::hebbian);
  AssociationMatrix assoc = make_association(2, 2, AssocMode::td, 0.5);
  Eigen::VectorXd reward(2);
  reward << 0.0, 1.0;
  Rng rng(76);
  CHECK_THROWS_AS(tcm_sr_evaluate(rect, reward, 0, 0.5, 0.5, 4, 2, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(tcm_sr_evaluate(assoc, reward, 5, 0.5, 0.5, 4, 2, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(tcm_sr_evaluate(assoc, reward, 0, 1.5, 0.5, 4, 2, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(tcm_sr_evaluate(assoc, reward, 0, 0.5, 1.0, 4, 2, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(tcm_sr_evaluate(assoc, reward, 0, 0.5, 0.5, 0, 2, rng),
                  std::invalid_argument);
}

TEST_CASE("a retrieval cue distinct from the query biases the first draw") {
  // Cue fully on state 1 with a frozen context reads row 1 instead of row 0.
  AssociationMatrix assoc = make_association(2, 2, AssocMode::td, 0.0);
  assoc.m << 0.0, 1.0, 1.0, 0.0;
  Eigen::VectorXd reward(2);
  reward << 0.0, 1.0;
  Eigen::VectorXd cue = Eigen::VectorXd::Unit(2, 1);
  Rng rng(77);
  TcmEstimate est = tcm_sr_evaluate(assoc, reward, 0, 0.0, 0.5, 8, 1, rng, &cue);
  CHECK(est.mean == doctest::Approx(0.0));  // row 1 retrieves only state 0
}

}  // TEST_SUITE("tcm")
