#include "negdro/solver.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace negdro {

namespace {

constexpr double kDivergenceNorm = 1e8;

// All environments' statistics stacked so one product gives every gram * b.
struct Stacked {
  Mat grams;   // (|E| p) x p
  Mat crosses; // p x |E|
  Vec ysq;

  explicit Stacked(std::span<const EnvMoments> ms) {
    const auto k = static_cast<Eigen::Index>(ms.size());
    const int p = ms.front().p();
    grams.resize(k * p, p);
    crosses.resize(p, k);
    ysq.resize(k);
    for (Eigen::Index e = 0; e < k; ++e) {
      const auto& m = ms[static_cast<std::size_t>(e)];
      grams.middleRows(e * p, p) = m.gram;
      crosses.col(e) = m.cross;
      ysq(e) = m.ysq;
    }
  }
};

// Risks and gradients of every environment.
struct Evaluation {
  Vec risks;
  Mat grads;  // p x |E|

  void update(const Stacked& st, const Vec& b) {
    const auto k = st.ysq.size();
    const auto p = b.size();
    grads.resize(p, k);
    Eigen::Map<Vec>(grads.data(), k * p).noalias() = st.grams * b;
    risks = st.ysq;
    risks.noalias() -= 2.0 * st.crosses.transpose() * b;
    risks.noalias() += grads.transpose() * b;
    grads -= st.crosses;
    grads *= 2.0;
  }
};

Evaluation evaluate(const Stacked& st, const Vec& b) {
  Evaluation ev;
  ev.update(st, b);
  return ev;
}

void check_moments(std::span<const EnvMoments> ms) {
  if (ms.size() < 1) throw Error(ErrorCode::InvalidArgument, "no environments given");
  const int p = ms.front().p();
  for (const auto& m : ms) {
    require_dims(m.p() == p && m.gram.rows() == p && m.gram.cols() == p,
                 "environment moments must share the dimension");
  }
}

void check_iterate(const Vec& b, std::size_t t) {
  if (!b.allFinite() || b.norm() > kDivergenceNorm) {
    throw Error(ErrorCode::NonFinite,
                "iterate diverged at t = " + std::to_string(t) + "; the step size is too large");
  }
}

}  // namespace

const char* to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max_iters";
  }
  return "unknown";
}

const char* to_string(StepRule rule) noexcept {
  switch (rule) {
    case StepRule::Theoretical: return "theoretical";
    case StepRule::Constant: return "constant";
    case StepRule::PieceSmoothness: return "piece_smoothness";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be >= 0");
  if (mu && !(*mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "mu must be > 0");
  if (T < 1) throw Error(ErrorCode::InvalidArgument, "T must be >= 1");
  if (step_rule == StepRule::Constant && !(step_size > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "a constant step size must be > 0");
  }
  if (upsilon && !(*upsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "upsilon must be > 0");
  if (c_step && !(*c_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "c_step must be > 0");
  if (prox_inner_iters < 1) throw Error(ErrorCode::InvalidArgument, "prox_inner_iters must be >= 1");
  if (!(prox_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "prox_tol must be > 0");
  if (stat_tol < 0.0) throw Error(ErrorCode::InvalidArgument, "stat_tol must be >= 0");
}

Vec initial_point(std::span<const EnvMoments> ms, const SolverConfig& cfg) {
  const int p = ms.front().p();
  switch (cfg.init) {
    case InitRule::Zero: return Vec::Zero(p);
    case InitRule::Given:
      require_dims(cfg.b0.size() == p, "b0 has the wrong length");
      return cfg.b0;
    case InitRule::PooledOls: {
      const EnvMoments pooled = pooled_moments(ms);
      // A rank-deficient pooled Gram still has a minimum-norm least-squares point.
      return pooled.gram.completeOrthogonalDecomposition().solve(pooled.cross);
    }
  }
  return Vec::Zero(p);
}

SolveResult solve_penalized(std::span<const EnvMoments> ms, const SolverConfig& cfg) {
  cfg.validate();
  check_moments(ms);
  const auto k = static_cast<Eigen::Index>(ms.size());
  const double c = negative_weight_shift(cfg.gamma, k);

  SolveResult out;
  out.smoothness = smoothness_constant(ms);
  if (!(out.smoothness > 0.0)) throw Error(ErrorCode::InvalidArgument, "all Gram matrices are zero");
  const double m_smooth = out.smoothness;
  out.mu = cfg.mu.value_or(m_smooth / std::sqrt(static_cast<double>(cfg.T)));
  switch (cfg.step_rule) {
    case StepRule::Theoretical: out.step = 1.0 / (2.0 * m_smooth + 2.0 * m_smooth * m_smooth / out.mu); break;
    case StepRule::Constant: out.step = cfg.step_size; break;
    case StepRule::PieceSmoothness: out.step = 1.0 / piece_smoothness(ms, cfg.gamma); break;
  }

  Vec b = initial_point(ms, cfg);
  if (cfg.keep_trace) out.trace.reserve(cfg.T + 1);
  double best = std::numeric_limits<double>::infinity();

  const Stacked st(ms);
  Evaluation ev;
  Vec grad(b.size());
  for (std::size_t t = 0; t <= cfg.T; ++t) {
    ev.update(st, b);
    const auto inner = inner_max_penalized(ev.risks, cfg.gamma, out.mu);
    grad.noalias() = ev.grads * (inner.w.array() - c).matrix();
    const double gnorm = grad.norm();
    if (cfg.keep_trace) out.trace.push_back({inner.value, gnorm, inner.w});

    if (t >= 1 && gnorm < best) {
      best = gnorm;
      out.b_hat = b;
      out.selected_iter = t;
    }
    if (t >= 1 && cfg.stat_tol > 0.0 && gnorm <= cfg.stat_tol) {
      out.status = SolveStatus::Converged;
      break;
    }
    if (t == cfg.T) break;
    b -= out.step * grad;
    check_iterate(b, t + 1);
  }
  out.selected_stat = best;
  return out;
}

SolveResult solve_penalized(const MultiEnvData& data, const SolverConfig& cfg) {
  const auto ms = env_moments(data);
  return solve_penalized(std::span<const EnvMoments>(ms), cfg);
}

double weak_convexity_bound(std::span<const EnvMoments> ms, double gamma) {
  check_moments(ms);
  Mat total = Mat::Zero(ms.front().p(), ms.front().p());
  for (const auto& m : ms) total += m.gram;
  return 2.0 * negative_weight_shift(gamma, static_cast<Eigen::Index>(ms.size())) * max_eigenvalue(total);
}

double piece_smoothness(std::span<const EnvMoments> ms, double gamma) {
  check_moments(ms);
  const double c = negative_weight_shift(gamma, static_cast<Eigen::Index>(ms.size()));
  Mat total = Mat::Zero(ms.front().p(), ms.front().p());
  for (const auto& m : ms) total += m.gram;
  double out = 0.0;
  for (const auto& m : ms) {
    const Mat piece = m.gram - c * total;
    out = std::max(out, std::max(max_eigenvalue(piece), -min_eigenvalue(piece)));
  }
  if (!(out > 0.0)) throw Error(ErrorCode::InvalidArgument, "every smooth piece of the objective is flat");
  return 2.0 * out;
}

namespace {

// Inner state of the prox dual at a simplex weight w.
struct DualPoint {
  Vec zeta;
  double value = 0.0;  // d(w) = L(zeta(w), w)
  Evaluation ev;       // risks and gradients at zeta
  Eigen::LLT<Mat> hess;
};

DualPoint dual_point(const Stacked& st, const Vec& b, double upsilon, double c, const Vec& w) {
  const auto p = b.size();
  Mat h = Mat::Identity(p, p) / upsilon;
  Vec rhs = b / upsilon;
  for (Eigen::Index e = 0; e < st.ysq.size(); ++e) {
    const double a = w(e) - c;
    h += 2.0 * a * st.grams.middleRows(e * p, p);
    rhs += 2.0 * a * st.crosses.col(e);
  }
  DualPoint dp;
  dp.hess.compute(h);
  if (dp.hess.info() != Eigen::Success) {
    throw Error(ErrorCode::UpsilonTooLarge, "prox subproblem is not strongly convex");
  }
  dp.zeta = dp.hess.solve(rhs);
  dp.ev.update(st, dp.zeta);
  dp.value = (w.array() - c).matrix().dot(dp.ev.risks) + (dp.zeta - b).squaredNorm() / (2.0 * upsilon);
  return dp;
}

double primal_value(const Evaluation& ev, const Vec& zeta, const Vec& b, double upsilon, double c) {
  return ev.risks.maxCoeff() - c * ev.risks.sum() + (zeta - b).squaredNorm() / (2.0 * upsilon);
}

// argmax_{v in simplex} g^T (v - w) - 0.5 (v - w)^T Q (v - w). Small |E|:
// exact, by checking the KKT system of every support. Otherwise projected
// gradient.
Vec newton_target(const Vec& w, const Vec& g, const Mat& q) {
  const Eigen::Index k = w.size();
  const Vec h = g + q * w;  // the problem is min 0.5 v^T Q v - h^T v over the simplex
  auto model = [&](const Vec& v) { return h.dot(v) - 0.5 * v.dot(q * v); };
  const double scale = std::max({1.0, q.cwiseAbs().maxCoeff(), h.cwiseAbs().maxCoeff()});

  if (k <= 10) {
    std::optional<Vec> best;
    double best_val = -std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> idx;
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      idx.clear();
      for (Eigen::Index e = 0; e < k; ++e) {
        if (mask & (1u << e)) idx.push_back(e);
      }
      const auto m = static_cast<Eigen::Index>(idx.size());
      Mat kkt = Mat::Zero(m + 1, m + 1);
      Vec rhs(m + 1);
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) kkt(i, j) = q(idx[i], idx[j]);
        kkt(i, m) = kkt(m, i) = 1.0;
        rhs(i) = h(idx[i]);
      }
      rhs(m) = 1.0;
      const Eigen::FullPivLU<Mat> lu(kkt);
      if (!lu.isInvertible()) continue;
      const Vec sol = lu.solve(rhs);
      if (sol.head(m).minCoeff() < -1e-12) continue;
      Vec v = Vec::Zero(k);
      for (Eigen::Index i = 0; i < m; ++i) v(idx[i]) = std::max(0.0, sol(i));
      v /= v.sum();
      // Multipliers of the inactive coordinates must be nonnegative.
      const Vec slack = q * v - h + Vec::Constant(k, sol(m));
      bool ok = true;
      for (Eigen::Index e = 0; e < k && ok; ++e) {
        if (!(mask & (1u << e)) && slack(e) < -1e-10 * scale) ok = false;
      }
      if (!ok) continue;
      const double val = model(v);
      if (val > best_val) {
        best_val = val;
        best = std::move(v);
      }
    }
    if (best) return *best;
  }

  const double lip = std::max(max_eigenvalue(q), 1e-300);
  Vec v = w;
  for (int it = 0; it < 2000; ++it) {
    const Vec next = project_simplex((v + (h - q * v) / lip).eval());
    const double moved = (next - v).lpNorm<Eigen::Infinity>();
    v = next;
    if (moved < 1e-15) break;
  }
  return v;
}

ProxResult prox_impl(const Vec& b, double upsilon, const Stacked& st, double gamma,
                     std::size_t max_iters, double tol, Vec w) {
  const auto k = st.ysq.size();
  const double c = negative_weight_shift(gamma, k);

  DualPoint dp = dual_point(st, b, upsilon, c, w);
  ProxResult out;
  int stalls = 0;
  for (std::size_t it = 0;; ++it) {
    const double primal = primal_value(dp.ev, dp.zeta, b, upsilon, c);
    out.point = dp.zeta;
    out.weight = w;
    out.objective = primal;
    out.gap = std::max(0.0, primal - dp.value);
    out.iterations = it;
    if (out.gap <= tol * std::max(1.0, std::abs(primal))) {
      out.converged = true;
      return out;
    }
    if (it >= max_iters) return out;

    // Dual gradient is the risk vector; dual Hessian is -J H^{-1} J^T.
    const Vec& g = dp.ev.risks;
    const Mat& jt = dp.ev.grads;  // p x |E|
    Mat q = jt.transpose() * dp.hess.solve(jt);
    q = 0.5 * (q + q.transpose());
    q.diagonal().array() += 1e-14 * std::max(1.0, q.diagonal().maxCoeff());

    const Vec v = newton_target(w, g, q);
    const Vec dir = v - w;
    const double slope = g.dot(dir);
    if (!(slope > 0.0)) {
      // No ascent direction left: w is dual optimal up to rounding.
      out.converged = out.gap <= std::sqrt(tol) * std::max(1.0, std::abs(primal));
      return out;
    }
    double s = 1.0;
    DualPoint trial;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, s *= 0.5) {
      trial = dual_point(st, b, upsilon, c, (w + s * dir).eval());
      if (trial.value >= dp.value + 1e-4 * s * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.converged = out.gap <= std::sqrt(tol) * std::max(1.0, std::abs(primal));
      return out;
    }
    w = project_simplex((w + s * dir).eval());
    // Dual ascent that no longer moves the value past rounding cannot close the gap.
    stalls = trial.value - dp.value <= 1e-15 * std::max(1.0, std::abs(dp.value)) ? stalls + 1 : 0;
    dp = std::move(trial);
    if (stalls >= 5) {
      out.converged = false;
      return out;
    }
  }
}

}  // namespace

ProxResult prox(const Vec& b, double upsilon, std::span<const EnvMoments> ms, double gamma,
                std::size_t max_iters, double tol) {
  check_moments(ms);
  require_dims(b.size() == ms.front().p(), "prox center has the wrong length");
  if (!(upsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "upsilon must be > 0");
  const double rho = weak_convexity_bound(ms, gamma);
  if (!(upsilon * rho < 1.0)) {
    throw Error(ErrorCode::UpsilonTooLarge, "upsilon must be below 1/rho = " + std::to_string(1.0 / rho));
  }
  const auto k = static_cast<Eigen::Index>(ms.size());
  const Stacked st(ms);
  const Vec start = SimplexWeight::vertex(k, inner_max(evaluate(st, b).risks, gamma).vertex).values();
  return prox_impl(b, upsilon, st, gamma, max_iters, tol, start);
}

SolveResult solve_subgradient(std::span<const EnvMoments> ms, const SolverConfig& cfg) {
  cfg.validate();
  check_moments(ms);
  const auto k = static_cast<Eigen::Index>(ms.size());
  const double c = negative_weight_shift(cfg.gamma, k);

  SolveResult out;
  out.smoothness = smoothness_constant(ms);
  if (!(out.smoothness > 0.0)) throw Error(ErrorCode::InvalidArgument, "all Gram matrices are zero");
  const double rho = weak_convexity_bound(ms, cfg.gamma);
  out.upsilon = cfg.upsilon.value_or(rho > 0.0 ? 0.5 / rho : 1.0 / out.smoothness);
  if (!(out.upsilon * rho < 1.0)) {
    throw Error(ErrorCode::UpsilonTooLarge, "upsilon must be below 1/rho = " + std::to_string(1.0 / rho));
  }
  const double c_step = cfg.c_step.value_or(1.0 / out.smoothness);
  switch (cfg.step_rule) {
    case StepRule::Theoretical: out.step = c_step / std::sqrt(static_cast<double>(cfg.T) + 1.0); break;
    case StepRule::Constant: out.step = cfg.step_size; break;
    case StepRule::PieceSmoothness: out.step = 1.0 / piece_smoothness(ms, cfg.gamma); break;
  }

  Vec b = initial_point(ms, cfg);
  if (cfg.keep_trace) out.trace.reserve(cfg.T + 1);
  double best = std::numeric_limits<double>::infinity();
  Vec warm = SimplexWeight::uniform(k).values();
  const Stacked st(ms);
  Evaluation ev;

  for (std::size_t t = 0; t <= cfg.T; ++t) {
    ev.update(st, b);
    const auto inner = inner_max(ev.risks, cfg.gamma);

    const ProxResult px = prox_impl(b, out.upsilon, st, cfg.gamma, cfg.prox_inner_iters, cfg.prox_tol, warm);
    if (!px.converged) ++out.prox_unconverged;
    warm = px.weight;
    const double dist = (px.point - b).norm();
    if (cfg.keep_trace) {
      out.trace.push_back({inner.value, dist, SimplexWeight::vertex(k, inner.vertex).values()});
    }
    if (t >= 1 && dist < best) {
      best = dist;
      out.b_hat = b;
      out.selected_iter = t;
    }
    if (t >= 1 && cfg.stat_tol > 0.0 && dist <= cfg.stat_tol) {
      out.status = SolveStatus::Converged;
      break;
    }
    if (t == cfg.T) break;

    Vec coef = Vec::Constant(k, -c);
    coef(inner.vertex) += 1.0;
    b -= out.step * (ev.grads * coef);
    check_iterate(b, t + 1);
  }
  out.selected_stat = best;
  return out;
}

SolveResult solve_subgradient(const MultiEnvData& data, const SolverConfig& cfg) {
  const auto ms = env_moments(data);
  return solve_subgradient(std::span<const EnvMoments>(ms), cfg);
}

}  // namespace negdro
