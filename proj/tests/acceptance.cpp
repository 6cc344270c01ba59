// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.
//
// Usage: acceptance [criterion numbers...]   (default: all)

#include "negdro/baselines.hpp"
#include "negdro/harness/experiment.hpp"
#include "negdro/identify.hpp"
#include "negdro/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace negdro;
using namespace negdro::harness;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Vec random_vec(int p, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vec v(p);
  for (int j = 0; j < p; ++j) v(j) = normal(rng);
  return v;
}

std::vector<EnvMoments> section6_sample(std::size_t n, std::uint64_t seed, int p = 5) {
  ScenarioParams params;
  params.n = n;
  params.p = p;
  params.seed = seed;
  return env_moments(sample_scenario(builtin_scenario("section6", params)));
}

// Mean l2 error per (method, sweep value); rows without an estimate count as +inf.
std::map<std::pair<std::string, double>, double> mean_errors(const ResultTable& t, bool by_n) {
  std::map<std::pair<std::string, double>, std::pair<double, int>> acc;
  for (const auto& r : t.rows) {
    auto& cell = acc[{r.method, by_n ? static_cast<double>(r.n) : r.gamma}];
    cell.first += r.l2_error ? *r.l2_error : INFINITY;
    ++cell.second;
  }
  std::map<std::pair<std::string, double>, double> out;
  for (const auto& [k, v] : acc) out[k] = v.first / v.second;
  return out;
}

ExperimentConfig sweep_config(const std::string& scenario, std::size_t n, std::vector<Method> methods) {
  ExperimentConfig cfg;
  cfg.scenario.builtin = scenario;
  cfg.scenario.params.n = n;
  cfg.methods = std::move(methods);
  cfg.replicates = 20;
  cfg.seed = 2024;
  cfg.solver.step_rule = StepRule::PieceSmoothness;
  cfg.solver.mu = 1e-3;
  cfg.solver.T = 50000;
  cfg.solver.keep_trace = false;
  return cfg;
}

Outcome table_reproduction() {
  ScenarioParams params;
  params.sigma = {1.0, 2.0};
  const Scenario sc = builtin_scenario("example1", params);
  std::vector<InterventionSpec> ivs;
  for (const auto& env : sc.environments) ivs.push_back(env.intervention);
  const auto rows = invariance_probe(sc.sem, ivs);
  if (rows.size() != 4) return {false, "expected 4 subsets"};

  double worst = 0.0;
  auto cell = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
  for (int e = 0; e < 2; ++e) {
    const double s2 = params.sigma[e] * params.sigma[e];
    cell(rows[0].risks(e), s2 + 1);
    cell(rows[1].risks(e), 1.0);
    cell(rows[2].risks(e), (s2 * s2 + s2) / (2 * s2 + 1));
    cell(rows[3].risks(e), s2 / (s2 + 1));
    cell(rows[0].coefficients[e].norm(), 0.0);
    cell(rows[1].coefficients[e](0), 1.0);
    cell(rows[1].coefficients[e](1), 0.0);
    cell(rows[2].coefficients[e](0), 0.0);
    cell(rows[2].coefficients[e](1), (s2 + 1) / (2 * s2 + 1));
    cell(rows[3].coefficients[e](0), s2 / (s2 + 1));
    cell(rows[3].coefficients[e](1), 1 / (s2 + 1));
  }
  const bool flags = rows[1].invariant && !rows[0].invariant && !rows[2].invariant && !rows[3].invariant;
  return {worst <= 1e-9 && flags, "max cell error " + fmt("%.2e", worst) + (flags ? "" : ", invariance flags wrong")};
}

Outcome identification_counterexample() {
  auto diag3 = [](double a, double b, double c) {
    Mat m = Mat::Zero(3, 3);
    m.diagonal() << a, b, c;
    return m;
  };
  const InterventionMoments ex3{{diag3(1, 0, 0), diag3(0, 1, 0), diag3(0, 0, 1)}};
  const InterventionMoments s3{{diag3(3, 3, 0), diag3(0, 0, 3), diag3(1, 1, 1)}};
  const auto t0 = Clock::now();
  const auto a = check_condition_heterogeneity(ex3);
  const double ta = seconds_since(t0);
  const auto t1 = Clock::now();
  const auto b = check_condition_heterogeneity(s3);
  const double tb = seconds_since(t1);
  const bool ok = !a.feasible && a.lambda_hat <= 1e-6 && b.feasible && b.lambda_hat >= 1.0 / 6.0 - 1e-4 &&
                  ta < 1.0 && tb < 1.0;
  return {ok, "counterexample lambda " + fmt("%.3g", a.lambda_hat) + ", heterogeneous lambda " +
                  fmt("%.6f", b.lambda_hat)};
}

Outcome gamma_trend() {
  ExperimentConfig cfg = sweep_config("section6", 20000, {Method::NegdroPenalized});
  cfg.sweep = Sweep{SweepParam::Gamma, {0, 1, 2, 5, 10, 25}};
  const auto t0 = Clock::now();
  const auto errs = mean_errors(run(cfg), false);
  const double secs = seconds_since(t0);
  bool monotone = true;
  std::string curve;
  double prev = INFINITY;
  for (double g : cfg.sweep->values) {
    const double e = errs.at({"negdro_penalized", g});
    monotone = monotone && e <= prev + 0.01;
    prev = e;
    curve += (curve.empty() ? "" : " ") + fmt("%.3f", e);
  }
  const bool ok = monotone && prev <= 0.15 && secs < 600;
  return {ok, "mean errors " + curve + ", " + fmt("%.0f s", secs)};
}

Outcome n_trend() {
  ExperimentConfig cfg = sweep_config("section6", 500, {Method::NegdroPenalized});
  cfg.solver.gamma = 20.0;
  cfg.sweep = Sweep{SweepParam::N, {500, 2000, 8000, 20000}};
  const auto t0 = Clock::now();
  const auto errs = mean_errors(run(cfg), true);
  const double secs = seconds_since(t0);
  std::vector<double> lx, ly;
  std::string curve;
  for (double n : cfg.sweep->values) {
    const double e = errs.at({"negdro_penalized", n});
    lx.push_back(std::log(n));
    ly.push_back(std::log(e));
    curve += (curve.empty() ? "" : " ") + fmt("%.3f", e);
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  const bool ok = slope >= -0.35 && slope <= -0.15 && secs < 600;
  return {ok, "slope " + fmt("%.3f", slope) + " (mean errors " + curve + "), " + fmt("%.0f s", secs)};
}

Outcome limited_weak_strong() {
  const auto t0 = Clock::now();
  std::map<std::string, std::map<std::pair<std::string, double>, double>> errs;
  std::map<std::string, std::size_t> dantzig_singular;
  for (const std::string variant : {"limited", "weak", "strong"}) {
    ExperimentConfig cfg =
        sweep_config("example2_" + variant, 10000, {Method::NegdroPenalized, Method::CausalDantzig, Method::Drig});
    cfg.sweep = Sweep{SweepParam::Gamma, {0, 10, 30, 60}};
    const ResultTable t = run(cfg);
    errs[variant] = mean_errors(t, false);
    for (const auto& r : t.rows) {
      if (r.method == "causal_dantzig" && r.gamma == 0.0 && r.status == "singular") ++dantzig_singular[variant];
    }
  }
  const double secs = seconds_since(t0);

  auto& lim = errs["limited"];
  auto& str = errs["strong"];
  const bool a_cd = dantzig_singular["limited"] == 20 || lim.at({"causal_dantzig", 0.0}) > 0.5;
  const bool a_drig = lim.at({"drig", 60.0}) > lim.at({"drig", 0.0});
  const bool a_neg = lim.at({"negdro_penalized", 60.0}) <= 0.2;
  const bool b_cd = str.at({"causal_dantzig", 0.0}) <= 0.15;
  const bool b_drig = str.at({"drig", 60.0}) <= 0.15;
  const bool b_neg = str.at({"negdro_penalized", 60.0}) <= 0.15;

  std::string d = "limited: dantzig " + fmt("%.3f", lim.at({"causal_dantzig", 0.0})) + (a_cd ? "" : " [x]") +
                  ", drig 0/60 " + fmt("%.3f", lim.at({"drig", 0.0})) + "/" + fmt("%.3f", lim.at({"drig", 60.0})) +
                  (a_drig ? "" : " [x]") + ", negdro@60 " + fmt("%.3f", lim.at({"negdro_penalized", 60.0})) +
                  (a_neg ? "" : " [x]") + "; weak: negdro@60 " +
                  fmt("%.3f", errs["weak"].at({"negdro_penalized", 60.0})) + "; strong: dantzig " +
                  fmt("%.3f", str.at({"causal_dantzig", 0.0})) + (b_cd ? "" : " [x]") + ", drig@60 " +
                  fmt("%.3f", str.at({"drig", 60.0})) + (b_drig ? "" : " [x]") + ", negdro@60 " +
                  fmt("%.3f", str.at({"negdro_penalized", 60.0})) + (b_neg ? "" : " [x]") + "; " +
                  fmt("%.0f s", secs);
  return {a_cd && a_drig && a_neg && b_cd && b_drig && b_neg && secs < 900, d};
}

Outcome objective_forms() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec r = random_vec(2 + k % 9, rng, 3.0).cwiseAbs();
    const double gamma = 100.0 * unif(rng) * unif(rng);
    const auto f = objective_forms_agree(r, gamma);
    worst = std::max(worst, std::abs(f.minimax - f.penalty_form) / std::max(1e-300, std::abs(f.minimax)));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && secs < 1.0, "max relative gap " + fmt("%.2e", worst)};
}

Outcome danskin() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto t0 = Clock::now();
  double worst = 0.0;
  int done = 0;
  const double h = 1e-6;
  while (done < 50) {
    const int k = 2 + done % 3;
    const int p = 2 + done % 4;
    std::vector<EnvMoments> ms;
    for (int e = 0; e < k; ++e) {
      Mat x(40, p);
      for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) = random_vec(p, rng, 1.0 + e).transpose();
      const Vec y = x * random_vec(p, rng) + random_vec(40, rng);
      ms.push_back(env_moments<double>(x, y));
    }
    const Vec b = random_vec(p, rng);
    const double gamma = 10.0 * unif(rng);
    const double mu = 0.05 + unif(rng);

    // Skip points whose weight support changes inside the stencil.
    auto support = [&](const Vec& z) {
      const Vec w = inner_max_penalized(risks(std::span<const EnvMoments>(ms), z), gamma, mu).w;
      return (w.array() > 0.0).eval();
    };
    const auto s0 = support(b);
    bool stable = true;
    for (int j = 0; j < p && stable; ++j) {
      for (double sgn : {-2.0, 2.0}) {
        Vec z = b;
        z(j) += sgn * h;
        stable = stable && (support(z) == s0).all();
      }
    }
    if (!stable) continue;

    const Vec g = phi_mu_gradient(ms, b, gamma, mu);
    Vec fd(p);
    for (int j = 0; j < p; ++j) {
      Vec up = b, dn = b;
      up(j) += h;
      dn(j) -= h;
      fd(j) = (phi_mu(ms, up, gamma, mu) - phi_mu(ms, dn, gamma, mu)) / (2 * h);
    }
    worst = std::max(worst, (fd - g).norm() / std::max(1.0, g.norm()));
    ++done;
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-5 && secs < 5.0, "max relative error " + fmt("%.2e", worst)};
}

Outcome stationary_rate() {
  const auto ms = section6_sample(2000, 8);
  const auto t0 = Clock::now();
  bool ok = true;
  std::string d;
  for (double gamma : {0.0, 5.0, 20.0}) {
    for (std::size_t T : {100, 1000, 10000}) {
      SolverConfig cfg;
      cfg.gamma = gamma;
      cfg.T = T;
      const auto res = solve_penalized(ms, cfg);
      double best = INFINITY;
      for (const auto& rec : res.trace) best = std::min(best, rec.stat);
      const double big_m = res.smoothness;
      // Initial gap against the lower bound -mu of the penalized objective.
      const double gap0 = res.trace.front().objective + res.mu;
      const double bound = std::sqrt(4.0 * (big_m + big_m * big_m / res.mu) * gap0 / static_cast<double>(T));
      const bool hit = best <= bound;
      ok = ok && hit;
      if (!hit || T == 10000) {
        d += (d.empty() ? "" : ", ") + std::string("gamma ") + fmt("%g", gamma) + " T " + fmt("%g", double(T)) +
             ": " + fmt("%.3g", best) + " <= " + fmt("%.3g", bound) + (hit ? "" : " [x]");
      }
    }
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 120, d};
}

Outcome cross_algorithm() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string d;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto ms = section6_sample(20000, seed);
    SolverConfig pen;
    pen.gamma = 20.0;
    pen.T = 1000000;
    pen.step_rule = StepRule::PieceSmoothness;
    pen.stat_tol = 1e-7;
    pen.keep_trace = false;
    const auto a = solve_penalized(ms, pen);

    SolverConfig sub;
    sub.gamma = 20.0;
    sub.T = 20000;
    sub.step_rule = StepRule::PieceSmoothness;
    sub.keep_trace = false;
    const auto b = solve_subgradient(ms, sub);
    const double diff = (a.b_hat - b.b_hat).norm();
    worst = std::max(worst, diff);
    d += (d.empty() ? "" : ", ") + fmt("%.3f", diff);
  }
  const double secs = seconds_since(t0);
  return {worst <= 0.1 && secs < 300, "distance per seed " + d + ", " + fmt("%.0f s", secs)};
}

Outcome population_invariance() {
  const Scenario sc = builtin_scenario("section6", {});
  const auto ms = population_env_moments(sc);
  SolverConfig cfg;
  cfg.gamma = 1000.0;
  cfg.T = 100000;
  cfg.mu = 1e-4;
  cfg.step_rule = StepRule::PieceSmoothness;
  cfg.keep_trace = false;
  const auto res = solve_penalized(ms, cfg);
  const Vec r = risks(std::span<const EnvMoments>(ms), res.b_hat);
  const double gap = r.maxCoeff() - r.minCoeff();
  const double err = (res.b_hat - sc.sem.beta_star).norm();
  return {gap <= 1e-2 && err <= 1e-2, "risk gap " + fmt("%.2e", gap) + ", error " + fmt("%.2e", err)};
}

Outcome limited_identification() {
  const Scenario sc = builtin_scenario("example2_limited", {});
  const auto ms = population_env_moments(sc);
  SolverConfig cfg;
  cfg.gamma = 1000.0;
  cfg.T = 100000;
  cfg.mu = 1e-4;
  cfg.step_rule = StepRule::PieceSmoothness;
  cfg.keep_trace = false;
  const auto res = solve_penalized(ms, cfg);
  const double err = (res.b_hat - sc.sem.beta_star).norm();

  std::vector<InterventionSpec> ivs;
  for (const auto& env : sc.environments) ivs.push_back(env.intervention);
  std::size_t invariant = 0;
  for (const auto& row : invariance_probe(sc.sem, ivs)) invariant += row.invariant ? 1 : 0;
  return {err <= 5e-2 && invariant > 1,
          "error " + fmt("%.2e", err) + ", risk-invariant subsets " + fmt("%g", double(invariant))};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

Outcome scaling() {
  auto negdro_ms = [](int p) {
    ScenarioParams params;
    params.p = p;
    params.n = 5000;
    params.seed = 12;
    const auto data = sample_scenario(builtin_scenario("section6", params));
    SolverConfig cfg;
    cfg.gamma = 20.0;
    cfg.T = 5000;
    cfg.keep_trace = false;
    std::vector<double> times;
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = Clock::now();
      solve_penalized(data, cfg);
      times.push_back(seconds_since(t0) * 1e3);
    }
    return median(times);
  };
  const double small = negdro_ms(5);
  const double large = negdro_ms(120);
  const double ratio = large / small;

  const auto deadline = Clock::now() + std::chrono::minutes(5);
  auto exhaustive_ms = [&](int p, bool& timed_out) {
    const auto ms = section6_sample(5000, 13, p);
    ExhaustiveOptions opts;
    opts.deadline = deadline;
    const auto t0 = Clock::now();
    const auto r = exhaustive_invariance_search(ms, opts);
    timed_out = r.status == BaselineStatus::Timeout;
    return seconds_since(t0) * 1e3;
  };
  bool to10 = false, to20 = false;
  std::vector<double> t10s;
  for (int rep = 0; rep < 3; ++rep) t10s.push_back(exhaustive_ms(10, to10));
  const double t10 = median(t10s);
  const double t20 = exhaustive_ms(20, to20);
  const double eratio = t20 / t10;

  const bool ok = ratio <= 50.0 && !to10 && eratio > 100.0;
  return {ok, "negdro p=120/p=5 " + fmt("%.1f", large) + "/" + fmt("%.2f", small) + " ms = " + fmt("%.1fx", ratio) +
                  "; exhaustive p=20/p=10 " + fmt("%.0f", t20) + "/" + fmt("%.2f", t10) + " ms = " +
                  fmt("%.0fx", eratio) + (to20 ? " (p=20 hit the 5 min cap)" : "")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"example 1 risk table", table_reproduction},
      {"identification counterexample", identification_counterexample},
      {"error decreases in gamma", gamma_trend},
      {"error rate in n", n_trend},
      {"limited / weak / strong interventions", limited_weak_strong},
      {"objective form equivalence", objective_forms},
      {"Danskin gradient", danskin},
      {"stationarity rate bound", stationary_rate},
      {"penalized and subgradient solvers agree", cross_algorithm},
      {"risk invariance at large gamma", population_invariance},
      {"limited-intervention identification", limited_identification},
      {"runtime scaling", scaling},
  };

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!wanted.empty() && !wanted.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s criterion %2d: %s -- %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
