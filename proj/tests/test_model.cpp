#include "negdro/model.hpp"
#include "negdro/simulate.hpp"

#include "catch_amalgamated.hpp"

using namespace negdro;
using Catch::Approx;

namespace {

SemModel example1_sem() {
  SemModel sem;
  sem.beta_star = Vec::Zero(2);
  sem.beta_star(0) = 1.0;
  sem.b_yx = Vec::Zero(2);
  sem.b_yx(1) = 1.0;
  sem.b_xx = Mat::Zero(2, 2);
  sem.eta_cov = Mat::Identity(3, 3);
  return sem;
}

}  // namespace

TEST_CASE("acyclicity check", "[model]") {
  CHECK_NOTHROW(validate_acyclic(example1_sem()));

  SemModel empty = example1_sem();
  empty.beta_star.setZero();
  empty.b_yx.setZero();
  CHECK_NOTHROW(validate_acyclic(empty));

  SemModel loop;
  loop.beta_star = Vec::Ones(1);
  loop.b_yx = Vec::Ones(1);
  loop.b_xx = Mat::Zero(1, 1);
  loop.eta_cov = Mat::Identity(2, 2);
  try {
    validate_acyclic(loop);
    FAIL("two-cycle accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CyclicGraph);
  }

  SemModel xx_loop = example1_sem();
  xx_loop.b_yx.setZero();
  xx_loop.b_xx(0, 1) = 0.5;
  xx_loop.b_xx(1, 0) = 0.5;
  CHECK_THROWS_AS(validate_acyclic(xx_loop), Error);
}

TEST_CASE("near-singular structural matrix is rejected", "[model]") {
  SemModel sem = example1_sem();
  sem.b_yx.setZero();
  sem.b_xx(1, 0) = 1e12;
  try {
    validate_acyclic(sem);
    FAIL("huge edge accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NearSingular);
  }
}

TEST_CASE("shape and noise checks", "[model]") {
  SemModel sem = example1_sem();
  sem.b_yx = Vec::Zero(3);
  CHECK_THROWS_AS(sem.check_shapes(), Error);

  SemModel bad = example1_sem();
  bad.eta_cov(0, 0) = -1.0;
  try {
    bad.check_shapes();
    FAIL("indefinite noise accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("example 1 population moments", "[model]") {
  const auto m = population_moments(example1_sem(), InterventionSpec::none(2));
  CHECK(m.ysq() == Approx(2.0));
  CHECK(m.gram()(0, 0) == Approx(1.0));
  CHECK(m.gram()(1, 1) == Approx(3.0));
  CHECK(m.cross()(1) / m.gram()(1, 1) == Approx(2.0 / 3.0));

  const SemModel sem = example1_sem();
  const Mat ib = Mat::Identity(3, 3) - sem.structural_matrix();
  const Mat inv = ib.inverse();
  CHECK((m.matrix - inv * inv.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("builtin example1 second environment scales covariate noise", "[model]") {
  const Scenario sc = builtin_scenario("example1", {});
  REQUIRE(sc.environments.size() == 2);
  const auto m2 = population_moments(sc.sem, sc.environments[1].intervention);
  // sigma = 2: Var X1 = 4, Var Y = 5, Var X2 = 9.
  CHECK(m2.gram()(0, 0) == Approx(4.0));
  CHECK(m2.ysq() == Approx(5.0));
  CHECK(m2.gram()(1, 1) == Approx(9.0));
  CHECK(sc.sem.sigma_y_sq() == Approx(1.0));
}

TEST_CASE("fixed shift propagates to the mean", "[model]") {
  SemModel sem = example1_sem();
  Vec shift(2);
  shift << 2.0, 0.0;
  const Vec mean = population_mean(sem, InterventionSpec::fixed(shift));
  // Y = X1 + eps, X2 = Y + eps.
  CHECK(mean(0) == Approx(2.0));
  CHECK(mean(1) == Approx(2.0));
  CHECK(mean(2) == Approx(2.0));
}

TEST_CASE("outcome children and causal parents", "[model]") {
  CHECK(children_of_outcome(example1_sem()) == IndexSet{1});
  CHECK(causal_parents(example1_sem()) == IndexSet{0});
  SemModel none = example1_sem();
  none.b_yx.setZero();
  CHECK(children_of_outcome(none).empty());
  const Scenario ex2 = builtin_scenario("example2_limited", {});
  CHECK(children_of_outcome(ex2.sem) == IndexSet{2});
}

TEST_CASE("intervention kinds and moments", "[model]") {
  CHECK(InterventionSpec::none(3).kind() == InterventionKind::None);
  CHECK(InterventionSpec::none(3).second_moment().isZero());

  Vec a(2);
  a << 3.0, 0.0;
  const auto u = InterventionSpec::uniform(a);
  CHECK(u.kind() == InterventionKind::Uniform);
  CHECK(u.cov()(0, 0) == Approx(3.0));

  Vec m(2);
  m << 1.0, 2.0;
  const auto f = InterventionSpec::fixed(m);
  CHECK(f.kind() == InterventionKind::Fixed);
  CHECK(f.second_moment()(0, 1) == Approx(2.0));

  const auto g = InterventionSpec::gaussian(Vec::Zero(2), Mat::Identity(2, 2));
  CHECK(g.kind() == InterventionKind::Gaussian);
  CHECK(InterventionSpec::general(m, Mat::Identity(2, 2), a).kind() == InterventionKind::Mixed);

  CHECK_THROWS_AS(InterventionSpec::uniform(-a), Error);
  CHECK_THROWS_AS(InterventionSpec::gaussian(Vec::Zero(2), -Mat::Identity(2, 2)), Error);

  Vec head(2), tail(2);
  head << 1.0, 0.0;
  tail << 0.0, 1.0;
  auto block = InterventionSpec::fixed(head);
  block.combine(InterventionSpec::uniform(tail));
  CHECK(block.kind() == InterventionKind::Mixed);
  auto clash = InterventionSpec::fixed(head);
  CHECK_THROWS_AS(clash.combine(InterventionSpec::fixed(head)), Error);
}

TEST_CASE("builtin moments are PSD with invariant causal risk", "[model]") {
  for (const auto& name : builtin_scenario_names()) {
    const Scenario sc = builtin_scenario(name, {});
    CAPTURE(name);
    for (const auto& env : sc.environments) {
      const auto m = population_moments(sc.sem, env.intervention);
      CHECK(min_eigenvalue(m.matrix) > -1e-9);
      CHECK(is_symmetric(env.intervention.second_moment()));
      const Vec b = sc.sem.beta_star;
      const double r = m.ysq() - 2.0 * b.dot(m.cross()) + b.dot(m.gram() * b);
      CHECK(r == Approx(sc.sem.sigma_y_sq()).margin(1e-9));
    }
  }
}
