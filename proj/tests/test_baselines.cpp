#include "negdro/baselines.hpp"

#include "catch_amalgamated.hpp"

#include <random>

using namespace negdro;
using Catch::Approx;

namespace {

std::vector<EnvMoments> sampled(const std::string& name, std::size_t n, std::uint64_t seed, int p = 5) {
  ScenarioParams params;
  params.n = n;
  params.seed = seed;
  params.p = p;
  return env_moments(sample_scenario(builtin_scenario(name, params)));
}

double error(const BaselineResult& r, const Vec& beta) {
  REQUIRE(r.b_hat);
  return (*r.b_hat - beta).norm();
}

EnvMoments random_env(int p, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Mat x(200, p);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = normal(rng);
  }
  Vec y = x.rowwise().sum();
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += normal(rng);
  return env_moments<double>(x, y);
}

}  // namespace

TEST_CASE("ERM", "[baselines]") {
  Mat x(4, 1);
  x << 1, 2, 3, 4;
  const Vec y = 2.0 * x.col(0);
  const std::vector<EnvMoments> one{env_moments<double>(x, y)};
  auto r = erm(one);
  CHECK(r.status == BaselineStatus::Ok);
  CHECK((*r.b_hat)(0) == Approx(2.0));

  const std::vector<EnvMoments> twice{one[0], one[0]};
  CHECK((*erm(twice).b_hat)(0) == Approx(2.0));

  const Scenario s6 = builtin_scenario("section6", {});
  CHECK(error(erm(sampled("section6", 10000, 1)), s6.sem.beta_star) > 0.3);

  EnvMoments flat = one[0];
  flat.gram.setZero();
  r = erm(std::vector<EnvMoments>{flat});
  CHECK(r.status == BaselineStatus::Singular);
  CHECK_FALSE(r.b_hat);
}

TEST_CASE("causal Dantzig", "[baselines]") {
  const Scenario lim = builtin_scenario("example2_limited", {});
  CHECK(causal_dantzig(population_env_moments(lim)).status == BaselineStatus::Singular);

  const Scenario strong = builtin_scenario("example2_strong", {});
  const auto pop = causal_dantzig(population_env_moments(strong));
  CHECK(error(pop, strong.sem.beta_star) < 1e-8);
  CHECK(error(causal_dantzig(sampled("example2_strong", 10000, 2)), strong.sem.beta_star) <= 0.15);

  std::mt19937_64 rng(3);
  const auto env = random_env(3, rng);
  CHECK(causal_dantzig(std::vector<EnvMoments>{env, env}).status == BaselineStatus::Singular);

  const Scenario s6 = builtin_scenario("section6", {});
  const auto ms = population_env_moments(s6);
  CHECK(error(causal_dantzig(ms, DantzigPairing::pair(0, 1)), s6.sem.beta_star) < 1e-8);
  CHECK_THROWS_AS(causal_dantzig(ms, DantzigPairing::pair(0, 0)), Error);
  CHECK_THROWS_AS(causal_dantzig(ms, DantzigPairing::pair(0, 7)), Error);
}

TEST_CASE("DRIG", "[baselines]") {
  const auto ms = sampled("example2_strong", 10000, 4);
  DrigOptions opts;
  auto r = drig(ms, opts);
  CHECK(r.b_hat->isApprox(ols(ms[0]), 1e-10));

  opts.ref_env = 1;
  CHECK(drig(ms, opts).b_hat->isApprox(ols(ms[1]), 1e-10));

  const Scenario strong = builtin_scenario("example2_strong", {});
  opts.ref_env = 0;
  opts.gamma = 60.0;
  CHECK(error(drig(ms, opts), strong.sem.beta_star) <= 0.15);

  // Population: the intervention only moves the outcome's child, so larger
  // gamma shrinks its coefficient and the error falls.
  const Scenario lim = builtin_scenario("example2_limited", {});
  const auto pop = population_env_moments(lim);
  double last = INFINITY;
  for (double g : {0.0, 10.0, 30.0, 60.0}) {
    opts.gamma = g;
    const double err = error(drig(pop, opts), lim.sem.beta_star);
    CHECK(err < last);
    last = err;
  }

  // Finite samples: gamma amplifies the noise in the Gram difference.
  const auto lim_ms = sampled("example2_limited", 10000, 7);
  opts.gamma = 0.0;
  const double at0 = error(drig(lim_ms, opts), lim.sem.beta_star);
  opts.gamma = 60.0;
  const auto at60 = drig(lim_ms, opts);
  CHECK((!at60.b_hat || (*at60.b_hat - lim.sem.beta_star).norm() > at0));

  opts.gamma = 1000.0;
  opts.ref_env = 1;
  const auto flipped = drig(pop, opts);
  CHECK(flipped.status == BaselineStatus::NonConvex);
  CHECK_FALSE(flipped.b_hat);

  opts.gamma = 1.0;
  opts.ref_env = 5;
  CHECK_THROWS_AS(drig(pop, opts), Error);
}

TEST_CASE("exhaustive invariance search", "[baselines]") {
  ScenarioParams params;
  params.n = 100000;
  params.seed = 5;
  const auto ms = env_moments(sample_scenario(builtin_scenario("example1", params)));
  ExhaustiveOptions opts;
  opts.threshold = 0.05;
  auto r = exhaustive_invariance_search(ms, opts);
  CHECK(r.status == BaselineStatus::Ok);
  CHECK(r.selected_subset == IndexSet{0});
  CHECK((*r.b_hat)(0) == Approx(1.0).margin(0.02));
  CHECK((*r.b_hat)(1) == 0.0);

  std::mt19937_64 rng(6);
  const std::vector<EnvMoments> single{random_env(3, rng)};
  r = exhaustive_invariance_search(single, {});
  CHECK(r.selected_subset == IndexSet{0, 1, 2});

  opts.threshold = 0.0;
  try {
    exhaustive_invariance_search(ms, opts);
    FAIL("sampled risks matched exactly");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoInvariantSubset);
  }
  opts.threshold = -1.0;
  CHECK_THROWS_AS(exhaustive_invariance_search(ms, opts), Error);

  opts.threshold = 0.05;
  opts.max_p = 1;
  try {
    exhaustive_invariance_search(ms, opts);
    FAIL("dimension above max_p accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionTooLarge);
  }

  opts.max_p = 20;
  opts.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
  CHECK(exhaustive_invariance_search(ms, opts).status == BaselineStatus::Timeout);
}
