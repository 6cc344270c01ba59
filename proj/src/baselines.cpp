#include "negdro/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace negdro {

const char* to_string(BaselineStatus status) noexcept {
  switch (status) {
    case BaselineStatus::Ok: return "ok";
    case BaselineStatus::Singular: return "singular";
    case BaselineStatus::NonConvex: return "non_convex";
    case BaselineStatus::NotApplicable: return "not_applicable";
    case BaselineStatus::Timeout: return "timeout";
  }
  return "unknown";
}

namespace {

void check_envs(std::span<const EnvMoments> ms, std::size_t min_envs) {
  if (ms.size() < min_envs) {
    throw Error(ErrorCode::InvalidArgument, "need at least " + std::to_string(min_envs) + " environments");
  }
  for (const auto& m : ms) require_dims(m.p() == ms.front().p(), "environment moments must share the dimension");
}

void check_env_index(int e, std::size_t k, const char* what) {
  if (e < 0 || static_cast<std::size_t>(e) >= k) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " is out of range");
  }
}

}  // namespace

BaselineResult erm(std::span<const EnvMoments> ms) {
  check_envs(ms, 1);
  const EnvMoments pooled = pooled_moments(ms);
  BaselineResult out;
  const double lo = min_eigenvalue(pooled.gram);
  const double hi = max_eigenvalue(pooled.gram);
  out.diagnostics["lambda_min_gram"] = lo;
  out.diagnostics["lambda_max_gram"] = hi;
  if (lo < 1e-10 * std::max(1.0, hi)) {
    out.status = BaselineStatus::Singular;
    return out;
  }
  out.b_hat = pooled.gram.ldlt().solve(pooled.cross);
  out.status = BaselineStatus::Ok;
  return out;
}

BaselineResult erm(const MultiEnvData& data) {
  const auto ms = env_moments(data);
  return erm(std::span<const EnvMoments>(ms));
}

BaselineResult causal_dantzig(std::span<const EnvMoments> ms, DantzigPairing pairing) {
  check_envs(ms, 2);
  EnvMoments a;
  EnvMoments b;
  if (pairing.first && pairing.second) {
    check_env_index(*pairing.first, ms.size(), "first environment");
    check_env_index(*pairing.second, ms.size(), "second environment");
    if (*pairing.first == *pairing.second) throw Error(ErrorCode::InvalidArgument, "pair needs two distinct environments");
    a = ms[static_cast<std::size_t>(*pairing.first)];
    b = ms[static_cast<std::size_t>(*pairing.second)];
  } else if (!pairing.first && !pairing.second) {
    a = ms.front();
    b = pooled_moments(ms.subspan(1));
  } else {
    throw Error(ErrorCode::InvalidArgument, "pairing must name both environments or neither");
  }

  const Mat dg = a.gram - b.gram;
  const Vec dz = a.cross - b.cross;
  Eigen::JacobiSVD<Mat> svd(dg, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  BaselineResult out;
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double smin = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
  out.diagnostics["sigma_min"] = smin;
  out.diagnostics["sigma_max"] = smax;
  out.diagnostics["first_vs_rest"] = pairing.first ? 0.0 : 1.0;
  if (!(smax > 0.0) || smin < 1e-8 * smax) {
    out.status = BaselineStatus::Singular;
    return out;
  }
  out.diagnostics["condition_number"] = smax / smin;
  out.b_hat = svd.solve(dz);
  out.status = BaselineStatus::Ok;
  return out;
}

BaselineResult causal_dantzig(const MultiEnvData& data, DantzigPairing pairing) {
  const auto ms = env_moments(data);
  return causal_dantzig(std::span<const EnvMoments>(ms), pairing);
}

BaselineResult drig(std::span<const EnvMoments> ms, const DrigOptions& opts) {
  check_envs(ms, 2);
  if (!(opts.gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be >= 0");
  check_env_index(opts.ref_env, ms.size(), "reference environment");
  const auto others = static_cast<Eigen::Index>(ms.size() - 1);
  const SimplexWeight w = opts.weights ? *opts.weights : SimplexWeight::uniform(others);
  require_dims(w.size() == others, "DRIG weights cover the non-reference environments");

  const EnvMoments& ref = ms[static_cast<std::size_t>(opts.ref_env)];
  Mat h = ref.gram;
  Vec rhs = ref.cross;
  Eigen::Index j = 0;
  for (std::size_t e = 0; e < ms.size(); ++e) {
    if (static_cast<int>(e) == opts.ref_env) continue;
    h += opts.gamma * w(j) * (ms[e].gram - ref.gram);
    rhs += opts.gamma * w(j) * (ms[e].cross - ref.cross);
    ++j;
  }

  BaselineResult out;
  const double lo = min_eigenvalue(h);
  out.diagnostics["lambda_min_hessian"] = lo;
  if (lo <= 1e-10) {
    out.status = BaselineStatus::NonConvex;
    return out;
  }
  out.b_hat = h.ldlt().solve(rhs);
  out.status = BaselineStatus::Ok;
  return out;
}

BaselineResult drig(const MultiEnvData& data, const DrigOptions& opts) {
  const auto ms = env_moments(data);
  return drig(std::span<const EnvMoments>(ms), opts);
}

BaselineResult exhaustive_invariance_search(std::span<const EnvMoments> ms, const ExhaustiveOptions& opts) {
  check_envs(ms, 1);
  const int p = ms.front().p();
  if (opts.max_p > 30) throw Error(ErrorCode::InvalidArgument, "max_p above 30 is not supported");
  if (p > opts.max_p) {
    throw Error(ErrorCode::DimensionTooLarge,
                "exhaustive search over 2^" + std::to_string(p) + " subsets exceeds max_p = " + std::to_string(opts.max_p));
  }
  if (!(opts.threshold >= 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be >= 0");
  const EnvMoments pooled = pooled_moments(ms);

  struct Best {
    bool found = false;
    double pooled_risk = 0.0;
    IndexSet subset;
    Vec b;
    double gap = 0.0;
  } best;

  BaselineResult out;
  std::size_t skipped = 0;
  std::size_t visited = 0;
  const std::uint32_t count = 1u << p;
  IndexSet s;
  s.reserve(static_cast<std::size_t>(p));
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    if (opts.deadline && (mask & 63u) == 0 && std::chrono::steady_clock::now() > *opts.deadline) {
      out.status = BaselineStatus::Timeout;
      out.diagnostics["subsets_visited"] = static_cast<double>(visited);
      return out;
    }
    ++visited;
    s.clear();
    for (int j = 0; j < p; ++j) {
      if (mask & (1u << j)) s.push_back(j);
    }
    const auto d = static_cast<Eigen::Index>(s.size());
    Vec b = Vec::Zero(p);
    if (d > 0) {
      Mat g(d, d);
      Vec z(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        z(i) = pooled.cross(s[i]);
        for (Eigen::Index k = 0; k < d; ++k) g(i, k) = pooled.gram(s[i], s[k]);
      }
      Eigen::LLT<Mat> llt(g);
      if (llt.info() != Eigen::Success) {
        ++skipped;
        continue;
      }
      const Vec bs = llt.solve(z);
      for (Eigen::Index i = 0; i < d; ++i) b(s[i]) = bs(i);
    }
    const Vec r = risks(ms, b);
    const double gap = r.maxCoeff() - r.minCoeff();
    if (!(gap <= opts.threshold)) continue;
    const double pr = risk(pooled, b);
    const double tie = 1e-12 * std::max(1.0, std::abs(pr));
    bool better = !best.found || pr < best.pooled_risk - tie;
    if (!better && std::abs(pr - best.pooled_risk) <= tie) {
      better = s.size() < best.subset.size() || (s.size() == best.subset.size() && s < best.subset);
    }
    if (better) {
      best.found = true;
      best.pooled_risk = pr;
      best.subset = s;
      best.b = b;
      best.gap = gap;
    }
  }
  if (!best.found) {
    throw Error(ErrorCode::NoInvariantSubset, "no subset has a risk gap within the threshold");
  }
  out.status = BaselineStatus::Ok;
  out.b_hat = best.b;
  out.selected_subset = best.subset;
  out.diagnostics["pooled_risk"] = best.pooled_risk;
  out.diagnostics["risk_gap"] = best.gap;
  out.diagnostics["subsets_visited"] = static_cast<double>(visited);
  out.diagnostics["subsets_singular"] = static_cast<double>(skipped);
  return out;
}

BaselineResult exhaustive_invariance_search(const MultiEnvData& data, const ExhaustiveOptions& opts) {
  const auto ms = env_moments(data);
  return exhaustive_invariance_search(std::span<const EnvMoments>(ms), opts);
}

}  // namespace negdro
