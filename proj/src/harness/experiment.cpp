#include "negdro/harness/experiment.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

namespace negdro::harness {

std::string status_name(ErrorCode code) {
  const std::string camel = to_string(code);
  std::string out;
  for (std::size_t i = 0; i < camel.size(); ++i) {
    const auto c = static_cast<unsigned char>(camel[i]);
    if (std::isupper(c) && i > 0) out.push_back('_');
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::uint64_t replicate_seed(const ExperimentConfig& cfg, std::size_t sweep_index, std::size_t replicate) {
  const bool shared = !cfg.sweep || cfg.sweep->param == SweepParam::Gamma;
  return mix_seed(cfg.seed, shared ? 0 : sweep_index, replicate);
}

namespace {

using Clock = std::chrono::steady_clock;

MethodOutcome from_baseline(const BaselineResult& r) {
  MethodOutcome out;
  out.b_hat = r.b_hat;
  out.status = to_string(r.status);
  out.selected_subset = r.selected_subset;
  return out;
}

MethodOutcome dispatch(Method method, std::span<const EnvMoments> ms, double gamma, const ExperimentConfig& cfg,
                       std::optional<Deadline> deadline) {
  const auto& bc = cfg.baselines;
  switch (method) {
    case Method::NegdroPenalized:
    case Method::NegdroSubgradient: {
      SolverConfig sc = cfg.solver;
      sc.gamma = gamma;
      sc.keep_trace = false;
      const SolveResult r = method == Method::NegdroPenalized ? solve_penalized(ms, sc) : solve_subgradient(ms, sc);
      MethodOutcome out;
      out.b_hat = r.b_hat;
      return out;
    }
    case Method::Erm: return from_baseline(erm(ms));
    case Method::CausalDantzig: {
      const DantzigPairing pairing = bc.dantzig_pair ? DantzigPairing::pair(bc.dantzig_pair->first, bc.dantzig_pair->second)
                                                     : DantzigPairing::first_vs_rest();
      return from_baseline(causal_dantzig(ms, pairing));
    }
    case Method::Drig: {
      DrigOptions opts;
      opts.gamma = bc.drig_gamma.value_or(gamma);
      opts.ref_env = bc.drig_ref_env;
      if (bc.drig_weights) {
        opts.weights = SimplexWeight(
            Eigen::Map<const Vec>(bc.drig_weights->data(), static_cast<Eigen::Index>(bc.drig_weights->size())));
      }
      return from_baseline(drig(ms, opts));
    }
    case Method::Exhaustive: {
      ExhaustiveOptions opts;
      opts.threshold = bc.exhaustive_threshold;
      opts.max_p = bc.exhaustive_max_p;
      opts.deadline = deadline;
      return from_baseline(exhaustive_invariance_search(ms, opts));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

}  // namespace

MethodOutcome run_method(Method method, std::span<const EnvMoments> ms, double gamma, const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  std::optional<Deadline> deadline;
  if (cfg.time_limit_secs) {
    deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*cfg.time_limit_secs));
  }
  MethodOutcome out;
  try {
    out = dispatch(method, ms, gamma, cfg, deadline);
  } catch (const Error& e) {
    out = MethodOutcome{};
    out.status = status_name(e.code());
  } catch (const std::exception&) {
    out = MethodOutcome{};
    out.status = "error";
  }
  const auto stop = Clock::now();
  out.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  // Methods without a deadline poll are judged after the fact.
  if (deadline && stop > *deadline) out.status = "timeout";
  if (out.status != "ok") out.b_hat.reset();
  return out;
}

unsigned worker_count(std::size_t tasks) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NEGDRO_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
  }
  if (tasks < n) n = static_cast<unsigned>(std::max<std::size_t>(tasks, 1));
  return n;
}

namespace {

struct Task {
  std::size_t sweep_index;
  std::size_t replicate;
};

std::vector<ResultRow> run_task(const ExperimentConfig& cfg, const Task& task) {
  double gamma = cfg.solver.gamma;
  std::optional<std::size_t> n;
  std::optional<int> p;
  if (cfg.sweep) {
    const double v = cfg.sweep->values[task.sweep_index];
    switch (cfg.sweep->param) {
      case SweepParam::Gamma: gamma = v; break;
      case SweepParam::N: n = static_cast<std::size_t>(v); break;
      case SweepParam::P: p = static_cast<int>(v); break;
    }
  }
  Scenario sc = cfg.scenario.materialize(n, p);
  sc.seed = replicate_seed(cfg, task.sweep_index, task.replicate);
  const MultiEnvData data = sample_scenario(sc);
  const std::vector<EnvMoments> ms = env_moments(data);

  std::vector<ResultRow> rows;
  for (Method m : cfg.methods) {
    const MethodOutcome o = run_method(m, ms, gamma, cfg);
    ResultRow row;
    row.method = to_string(m);
    row.replicate = task.replicate + 1;
    row.gamma = gamma;
    row.n = sc.environments.front().n;
    row.p = sc.sem.p();
    if (o.b_hat) row.l2_error = (*o.b_hat - sc.sem.beta_star).norm();
    row.runtime_ms = o.runtime_ms;
    row.status = o.status;
    row.selected_subset = o.selected_subset;
    rows.push_back(std::move(row));
  }
  return rows;
}

void add_oracle_rows(const ExperimentConfig& cfg, ResultTable& table) {
  using Key = std::tuple<std::string, std::size_t, std::size_t, int>;
  std::map<Key, ResultRow> best;
  std::map<Key, double> total_ms;
  for (Method m : cfg.methods) {
    if (!uses_gamma(m)) continue;
    const std::string name = to_string(m);
    for (const auto& r : table.rows) {
      if (r.method != name) continue;
      const Key key{name, r.replicate, r.n, r.p};
      total_ms[key] += r.runtime_ms;
      auto it = best.find(key);
      if (it == best.end()) {
        ResultRow seed = r;
        seed.method = name + "+oracle";
        if (!r.l2_error) seed.status = "not_applicable";
        best.emplace(key, seed);
        continue;
      }
      // Rows arrive in increasing gamma, so ties keep the smaller gamma.
      if (r.l2_error && (!it->second.l2_error || *r.l2_error < *it->second.l2_error)) {
        it->second.gamma = r.gamma;
        it->second.l2_error = r.l2_error;
        it->second.status = r.status;
        it->second.selected_subset = r.selected_subset;
      }
    }
  }
  for (auto& [key, row] : best) {
    row.runtime_ms = total_ms[key];
    table.rows.push_back(row);
  }
}

}  // namespace

ResultTable run(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Task> tasks;
  const std::size_t points = cfg.sweep ? cfg.sweep->values.size() : 1;
  for (std::size_t s = 0; s < points; ++s) {
    for (std::size_t r = 0; r < cfg.replicates; ++r) tasks.push_back({s, r});
  }

  std::vector<std::vector<ResultRow>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        results[i] = run_task(cfg, tasks[i]);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  const unsigned workers = worker_count(tasks.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  ResultTable table;
  for (auto& rows : results) {
    for (auto& r : rows) table.rows.push_back(std::move(r));
  }
  table.sort();
  if (cfg.oracle_select) {
    add_oracle_rows(cfg, table);
    table.sort();
  }
  return table;
}

}  // namespace negdro::harness
