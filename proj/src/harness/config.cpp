#include "negdro/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>

namespace negdro::harness {

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::NegdroPenalized: return "negdro_penalized";
    case Method::NegdroSubgradient: return "negdro_subgradient";
    case Method::Erm: return "erm";
    case Method::CausalDantzig: return "causal_dantzig";
    case Method::Drig: return "drig";
    case Method::Exhaustive: return "exhaustive";
  }
  return "unknown";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::NegdroPenalized, Method::NegdroSubgradient, Method::Erm,
                                           Method::CausalDantzig,   Method::Drig,              Method::Exhaustive};
  return methods;
}

std::optional<Method> method_from_string(const std::string& name) {
  for (Method m : all_methods()) {
    if (name == to_string(m)) return m;
  }
  return std::nullopt;
}

bool uses_gamma(Method method) {
  return method == Method::NegdroPenalized || method == Method::NegdroSubgradient || method == Method::Drig;
}

const char* to_string(SweepParam param) noexcept {
  switch (param) {
    case SweepParam::Gamma: return "gamma";
    case SweepParam::N: return "n";
    case SweepParam::P: return "p";
  }
  return "unknown";
}

std::optional<SweepParam> sweep_param_from_string(const std::string& name) {
  if (name == "gamma") return SweepParam::Gamma;
  if (name == "n") return SweepParam::N;
  if (name == "p") return SweepParam::P;
  return std::nullopt;
}

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) invalid(path, "expected an object");
}

void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) invalid(join(path, key), "unknown field");
  }
}

double get_double(const Json& j, const std::string& path) {
  if (!j.is_number()) invalid(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) invalid(path, "expected a finite number");
  return v;
}

std::uint64_t get_uint(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  invalid(path, "expected a non-negative integer");
}

int get_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) invalid(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) invalid(path, "out of range");
  return static_cast<int>(v);
}

std::string get_string(const Json& j, const std::string& path) {
  if (!j.is_string()) invalid(path, "expected a string");
  return j.get<std::string>();
}

bool get_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) invalid(path, "expected true or false");
  return j.get<bool>();
}

Vec get_vec(const Json& j, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = get_double(j[i], index_path(path, i));
  return v;
}

Mat get_mat(const Json& j, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected a nested array (row-major)");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Mat(0, 0);
  if (!j[0].is_array()) invalid(index_path(path, 0), "expected an array");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vec row = get_vec(j[static_cast<std::size_t>(r)], index_path(path, static_cast<std::size_t>(r)));
    if (row.size() != cols) invalid(index_path(path, static_cast<std::size_t>(r)), "ragged matrix row");
    m.row(r) = row.transpose();
  }
  return m;
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json mat_json(const Mat& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

InterventionSpec intervention_from_json(const Json& j, int p, const std::string& path) {
  check_keys(j, path, {"mean", "gaussian_cov", "half_widths"});
  Vec mean = Vec::Zero(p);
  Mat cov = Mat::Zero(p, p);
  Vec widths = Vec::Zero(p);
  if (j.contains("mean")) mean = get_vec(j["mean"], join(path, "mean"));
  if (j.contains("gaussian_cov")) cov = get_mat(j["gaussian_cov"], join(path, "gaussian_cov"));
  if (j.contains("half_widths")) widths = get_vec(j["half_widths"], join(path, "half_widths"));
  if (mean.size() != p) invalid(join(path, "mean"), "expected length " + std::to_string(p));
  if (cov.rows() != p || cov.cols() != p) invalid(join(path, "gaussian_cov"), "expected a p x p matrix");
  if (widths.size() != p) invalid(join(path, "half_widths"), "expected length " + std::to_string(p));
  try {
    return InterventionSpec::general(mean, cov, widths);
  } catch (const Error& e) {
    invalid(path, e.what());
  }
}

Json intervention_json(const InterventionSpec& iv) {
  Json j = Json::object();
  if (!iv.mean().isZero(0.0)) j["mean"] = vec_json(iv.mean());
  if (!iv.gaussian_cov().isZero(0.0)) j["gaussian_cov"] = mat_json(iv.gaussian_cov());
  if (!iv.half_widths().isZero(0.0)) j["half_widths"] = vec_json(iv.half_widths());
  return j;
}

ScenarioParams params_from_json(const Json& j, const std::string& path) {
  check_keys(j, path, {"p", "n", "sigma"});
  ScenarioParams params;
  if (j.contains("p")) params.p = get_int(j["p"], join(path, "p"));
  if (j.contains("n")) params.n = get_uint(j["n"], join(path, "n"));
  if (j.contains("sigma")) {
    const Vec s = get_vec(j["sigma"], join(path, "sigma"));
    params.sigma.assign(s.data(), s.data() + s.size());
  }
  return params;
}

StepRule step_rule_from_string(const std::string& s, const std::string& path) {
  for (StepRule r : {StepRule::Theoretical, StepRule::Constant, StepRule::PieceSmoothness}) {
    if (s == to_string(r)) return r;
  }
  invalid(path, "unknown step rule '" + s + "' (theoretical, constant, piece_smoothness)");
}

const char* init_name(InitRule r) {
  switch (r) {
    case InitRule::PooledOls: return "pooled_ols";
    case InitRule::Zero: return "zero";
    case InitRule::Given: return "given";
  }
  return "unknown";
}

SolverConfig solver_from_json(const Json& j, const std::string& path) {
  check_keys(j, path,
             {"gamma", "mu", "T", "step_rule", "step_size", "upsilon", "c_step", "prox_inner_iters", "prox_tol", "init",
              "b0", "stat_tol"});
  SolverConfig cfg;
  cfg.keep_trace = false;
  if (j.contains("gamma")) cfg.gamma = get_double(j["gamma"], join(path, "gamma"));
  if (j.contains("mu")) cfg.mu = get_double(j["mu"], join(path, "mu"));
  if (j.contains("T")) cfg.T = get_uint(j["T"], join(path, "T"));
  if (j.contains("step_rule")) {
    cfg.step_rule = step_rule_from_string(get_string(j["step_rule"], join(path, "step_rule")), join(path, "step_rule"));
  }
  if (j.contains("step_size")) cfg.step_size = get_double(j["step_size"], join(path, "step_size"));
  if (j.contains("upsilon")) cfg.upsilon = get_double(j["upsilon"], join(path, "upsilon"));
  if (j.contains("c_step")) cfg.c_step = get_double(j["c_step"], join(path, "c_step"));
  if (j.contains("prox_inner_iters")) cfg.prox_inner_iters = get_uint(j["prox_inner_iters"], join(path, "prox_inner_iters"));
  if (j.contains("prox_tol")) cfg.prox_tol = get_double(j["prox_tol"], join(path, "prox_tol"));
  if (j.contains("stat_tol")) cfg.stat_tol = get_double(j["stat_tol"], join(path, "stat_tol"));
  if (j.contains("init")) {
    const std::string s = get_string(j["init"], join(path, "init"));
    if (s == "pooled_ols") {
      cfg.init = InitRule::PooledOls;
    } else if (s == "zero") {
      cfg.init = InitRule::Zero;
    } else if (s == "given") {
      cfg.init = InitRule::Given;
    } else {
      invalid(join(path, "init"), "unknown init rule '" + s + "' (pooled_ols, zero, given)");
    }
  }
  if (j.contains("b0")) cfg.b0 = get_vec(j["b0"], join(path, "b0"));
  if (cfg.init == InitRule::Given && cfg.b0.size() == 0) invalid(join(path, "b0"), "required when init is 'given'");
  return cfg;
}

BaselineConfig baselines_from_json(const Json& j, const std::string& path) {
  check_keys(j, path,
             {"drig_gamma", "drig_ref_env", "drig_weights", "dantzig_pair", "exhaustive_threshold", "exhaustive_max_p"});
  BaselineConfig b;
  if (j.contains("drig_gamma")) b.drig_gamma = get_double(j["drig_gamma"], join(path, "drig_gamma"));
  if (j.contains("drig_ref_env")) b.drig_ref_env = get_int(j["drig_ref_env"], join(path, "drig_ref_env")) - 1;
  if (j.contains("drig_weights")) {
    const Vec w = get_vec(j["drig_weights"], join(path, "drig_weights"));
    b.drig_weights = std::vector<double>(w.data(), w.data() + w.size());
  }
  if (j.contains("dantzig_pair")) {
    const Json& pj = j["dantzig_pair"];
    const std::string pp = join(path, "dantzig_pair");
    if (!pj.is_array() || pj.size() != 2) invalid(pp, "expected two environment labels");
    b.dantzig_pair = std::make_pair(get_int(pj[0], index_path(pp, 0)) - 1, get_int(pj[1], index_path(pp, 1)) - 1);
  }
  if (j.contains("exhaustive_threshold")) {
    const Json& t = j["exhaustive_threshold"];
    b.exhaustive_threshold = t.is_null() ? std::numeric_limits<double>::infinity()
                                         : get_double(t, join(path, "exhaustive_threshold"));
  }
  if (j.contains("exhaustive_max_p")) b.exhaustive_max_p = get_int(j["exhaustive_max_p"], join(path, "exhaustive_max_p"));
  return b;
}

}  // namespace

ScenarioSource scenario_source_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  ScenarioSource src;
  if (j.contains("builtin")) {
    check_keys(j, path, {"builtin", "params"});
    src.builtin = get_string(j["builtin"], join(path, "builtin"));
    const auto& names = builtin_scenario_names();
    if (std::find(names.begin(), names.end(), *src.builtin) == names.end()) {
      invalid(join(path, "builtin"), "unknown builtin scenario '" + *src.builtin + "'");
    }
    if (j.contains("params")) src.params = params_from_json(j["params"], join(path, "params"));
  } else {
    src.inline_scenario = scenario_from_json(j, path);
  }
  return src;
}

namespace {

bool is_section6_family(const std::optional<std::string>& builtin) {
  return builtin && (*builtin == "section6" || *builtin == "section6_limited");
}

}  // namespace

Scenario ScenarioSource::materialize(std::optional<std::size_t> n, std::optional<int> p) const {
  if (builtin) {
    ScenarioParams ps = params;
    if (n) ps.n = *n;
    if (p) ps.p = *p;
    return builtin_scenario(*builtin, ps);
  }
  if (!inline_scenario) throw Error(ErrorCode::ConfigInvalid, "scenario: neither builtin nor inline");
  if (p) throw Error(ErrorCode::ConfigInvalid, "sweep.param: p sweeps need a section6-family builtin scenario");
  Scenario sc = *inline_scenario;
  if (n) {
    for (auto& env : sc.environments) env.n = *n;
  }
  return sc;
}

Scenario scenario_from_json(const Json& j, const std::string& path) {
  check_keys(j, path, {"name", "seed", "sem", "environments"});
  Scenario sc;
  sc.name = j.contains("name") ? get_string(j["name"], join(path, "name")) : "inline";
  if (j.contains("seed")) sc.seed = get_uint(j["seed"], join(path, "seed"));
  if (!j.contains("sem")) invalid(join(path, "sem"), "required");
  const std::string sp = join(path, "sem");
  const Json& s = j["sem"];
  check_keys(s, sp, {"beta_star", "b_yx", "b_xx", "eta_cov"});
  for (const char* key : {"beta_star", "b_yx", "b_xx", "eta_cov"}) {
    if (!s.contains(key)) invalid(join(sp, key), "required");
  }
  sc.sem.beta_star = get_vec(s["beta_star"], join(sp, "beta_star"));
  sc.sem.b_yx = get_vec(s["b_yx"], join(sp, "b_yx"));
  sc.sem.b_xx = get_mat(s["b_xx"], join(sp, "b_xx"));
  sc.sem.eta_cov = get_mat(s["eta_cov"], join(sp, "eta_cov"));
  const int p = sc.sem.p();

  const std::string ep = join(path, "environments");
  if (!j.contains("environments") || !j["environments"].is_array()) invalid(ep, "expected an array");
  const Json& envs = j["environments"];
  for (std::size_t e = 0; e < envs.size(); ++e) {
    const std::string epe = index_path(ep, e);
    check_keys(envs[e], epe, {"n", "intervention"});
    EnvironmentSpec env;
    if (!envs[e].contains("n")) invalid(join(epe, "n"), "required");
    env.n = get_uint(envs[e]["n"], join(epe, "n"));
    env.intervention = envs[e].contains("intervention")
                           ? intervention_from_json(envs[e]["intervention"], p, join(epe, "intervention"))
                           : InterventionSpec::none(p);
    sc.environments.push_back(std::move(env));
  }
  try {
    sc.validate();
  } catch (const Error& e) {
    invalid(path, e.what());
  }
  return sc;
}

Json to_json(const Scenario& scenario) {
  Json j;
  j["name"] = scenario.name;
  j["seed"] = scenario.seed;
  j["sem"] = {{"beta_star", vec_json(scenario.sem.beta_star)},
              {"b_yx", vec_json(scenario.sem.b_yx)},
              {"b_xx", mat_json(scenario.sem.b_xx)},
              {"eta_cov", mat_json(scenario.sem.eta_cov)}};
  Json envs = Json::array();
  for (const auto& env : scenario.environments) {
    envs.push_back({{"n", env.n}, {"intervention", intervention_json(env.intervention)}});
  }
  j["environments"] = envs;
  return j;
}

Json to_json(const SolverConfig& cfg) {
  Json j;
  j["gamma"] = cfg.gamma;
  if (cfg.mu) j["mu"] = *cfg.mu;
  j["T"] = cfg.T;
  j["step_rule"] = to_string(cfg.step_rule);
  if (cfg.step_rule == StepRule::Constant) j["step_size"] = cfg.step_size;
  if (cfg.upsilon) j["upsilon"] = *cfg.upsilon;
  if (cfg.c_step) j["c_step"] = *cfg.c_step;
  j["prox_inner_iters"] = cfg.prox_inner_iters;
  j["prox_tol"] = cfg.prox_tol;
  j["init"] = init_name(cfg.init);
  if (cfg.init == InitRule::Given) j["b0"] = vec_json(cfg.b0);
  j["stat_tol"] = cfg.stat_tol;
  return j;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) invalid("methods", "at least one method is required");
  std::set<Method> seen;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (!seen.insert(methods[i]).second) invalid(index_path("methods", i), "duplicate method");
  }
  if (replicates < 1) invalid("replicates", "must be >= 1");
  if (time_limit_secs && !(*time_limit_secs > 0.0)) invalid("time_limit_secs", "must be > 0");
  try {
    solver.validate();
  } catch (const Error& e) {
    invalid("solver", e.what());
  }

  if (sweep) {
    if (sweep->values.empty()) invalid("sweep.values", "at least one value is required");
    for (std::size_t i = 0; i < sweep->values.size(); ++i) {
      const double v = sweep->values[i];
      const std::string vp = index_path("sweep.values", i);
      if (i > 0 && !(v > sweep->values[i - 1])) invalid(vp, "values must be strictly increasing");
      switch (sweep->param) {
        case SweepParam::Gamma:
          if (!(v >= 0.0)) invalid(vp, "gamma must be >= 0");
          break;
        case SweepParam::N:
          if (!(v >= 1.0) || v != std::floor(v)) invalid(vp, "n must be a positive integer");
          break;
        case SweepParam::P:
          if (!(v >= 5.0) || v != std::floor(v)) invalid(vp, "p must be an integer >= 5");
          break;
      }
    }
    if (sweep->param == SweepParam::P && !is_section6_family(scenario.builtin)) {
      invalid("sweep.param", "p sweeps need a section6-family builtin scenario");
    }
  }
  if (oracle_select && (!sweep || sweep->param != SweepParam::Gamma)) {
    invalid("oracle_select", "oracle selection picks among gamma values and needs a gamma sweep");
  }

  Scenario sc;
  try {
    sc = scenario.materialize();
  } catch (const Error& e) {
    invalid("scenario", e.what());
  }
  const auto k = static_cast<int>(sc.environments.size());
  if (baselines.drig_gamma && !(*baselines.drig_gamma >= 0.0)) invalid("baselines.drig_gamma", "must be >= 0");
  if (baselines.drig_ref_env < 0 || baselines.drig_ref_env >= k) {
    invalid("baselines.drig_ref_env", "must be an environment label in 1.." + std::to_string(k));
  }
  if (baselines.drig_weights) {
    const auto& w = *baselines.drig_weights;
    if (static_cast<int>(w.size()) != k - 1) {
      invalid("baselines.drig_weights", "expected one weight per non-reference environment (" + std::to_string(k - 1) + ")");
    }
    try {
      SimplexWeight(Eigen::Map<const Vec>(w.data(), static_cast<Eigen::Index>(w.size())));
    } catch (const Error& e) {
      invalid("baselines.drig_weights", e.what());
    }
  }
  if (baselines.dantzig_pair) {
    const auto [a, b] = *baselines.dantzig_pair;
    if (a < 0 || a >= k || b < 0 || b >= k || a == b) {
      invalid("baselines.dantzig_pair", "expected two distinct environment labels in 1.." + std::to_string(k));
    }
  }
  if (!(baselines.exhaustive_threshold >= 0.0)) invalid("baselines.exhaustive_threshold", "must be >= 0");
  if (baselines.exhaustive_max_p < 0 || baselines.exhaustive_max_p > 30) {
    invalid("baselines.exhaustive_max_p", "must lie in 0..30");
  }
}

ExperimentConfig config_from_json(const Json& j) {
  check_keys(j, "",
             {"schema_version", "scenario", "methods", "solver", "baselines", "sweep", "replicates", "seed",
              "time_limit_secs", "oracle_select"});
  if (!j.contains("schema_version")) invalid("schema_version", "required");
  if (get_int(j["schema_version"], "schema_version") != kSchemaVersion) {
    invalid("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
  }
  ExperimentConfig cfg;
  cfg.solver.keep_trace = false;
  if (!j.contains("scenario")) invalid("scenario", "required");
  cfg.scenario = scenario_source_from_json(j["scenario"], "scenario");

  if (!j.contains("methods") || !j["methods"].is_array()) invalid("methods", "expected an array of method names");
  for (std::size_t i = 0; i < j["methods"].size(); ++i) {
    const std::string name = get_string(j["methods"][i], index_path("methods", i));
    const auto m = method_from_string(name);
    if (!m) invalid(index_path("methods", i), "unknown method '" + name + "'");
    cfg.methods.push_back(*m);
  }
  if (j.contains("solver")) cfg.solver = solver_from_json(j["solver"], "solver");
  if (j.contains("baselines")) cfg.baselines = baselines_from_json(j["baselines"], "baselines");
  if (j.contains("sweep")) {
    const Json& s = j["sweep"];
    check_keys(s, "sweep", {"param", "values"});
    if (!s.contains("param")) invalid("sweep.param", "required");
    const std::string name = get_string(s["param"], "sweep.param");
    const auto param = sweep_param_from_string(name);
    if (!param) invalid("sweep.param", "unknown sweep parameter '" + name + "' (gamma, n, p)");
    if (!s.contains("values")) invalid("sweep.values", "required");
    const Vec v = get_vec(s["values"], "sweep.values");
    cfg.sweep = Sweep{*param, std::vector<double>(v.data(), v.data() + v.size())};
  }
  if (j.contains("replicates")) cfg.replicates = get_uint(j["replicates"], "replicates");
  if (j.contains("seed")) cfg.seed = get_uint(j["seed"], "seed");
  if (j.contains("time_limit_secs") && !j["time_limit_secs"].is_null()) {
    cfg.time_limit_secs = get_double(j["time_limit_secs"], "time_limit_secs");
  }
  if (j.contains("oracle_select")) cfg.oracle_select = get_bool(j["oracle_select"], "oracle_select");
  cfg.validate();
  return cfg;
}

Json to_json(const ExperimentConfig& cfg) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  if (cfg.scenario.builtin) {
    const auto& ps = cfg.scenario.params;
    j["scenario"] = {{"builtin", *cfg.scenario.builtin}, {"params", {{"p", ps.p}, {"n", ps.n}, {"sigma", ps.sigma}}}};
  } else if (cfg.scenario.inline_scenario) {
    j["scenario"] = to_json(*cfg.scenario.inline_scenario);
  }
  Json methods = Json::array();
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["solver"] = to_json(cfg.solver);

  const auto& b = cfg.baselines;
  Json bj;
  if (b.drig_gamma) bj["drig_gamma"] = *b.drig_gamma;
  bj["drig_ref_env"] = b.drig_ref_env + 1;
  if (b.drig_weights) bj["drig_weights"] = *b.drig_weights;
  if (b.dantzig_pair) bj["dantzig_pair"] = {b.dantzig_pair->first + 1, b.dantzig_pair->second + 1};
  bj["exhaustive_threshold"] = std::isfinite(b.exhaustive_threshold) ? Json(b.exhaustive_threshold) : Json(nullptr);
  bj["exhaustive_max_p"] = b.exhaustive_max_p;
  j["baselines"] = bj;

  if (cfg.sweep) j["sweep"] = {{"param", to_string(cfg.sweep->param)}, {"values", cfg.sweep->values}};
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.seed;
  if (cfg.time_limit_secs) j["time_limit_secs"] = *cfg.time_limit_secs;
  j["oracle_select"] = cfg.oracle_select;
  return j;
}

namespace {

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, path.string() + ": cannot open config file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, path.string() + ": " + e.what());
  }
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json(path)); }

ScenarioSource load_scenario(const std::filesystem::path& path) {
  const Json j = read_json(path);
  require_object(j, "");
  if (!j.contains("schema_version")) invalid("schema_version", "required");
  if (get_int(j["schema_version"], "schema_version") != kSchemaVersion) {
    invalid("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
  }
  if (!j.contains("scenario")) invalid("scenario", "required");
  ScenarioSource src = scenario_source_from_json(j["scenario"], "scenario");
  try {
    src.materialize();
  } catch (const Error& e) {
    invalid("scenario", e.what());
  }
  return src;
}

}  // namespace negdro::harness
