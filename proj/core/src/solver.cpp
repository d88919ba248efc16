#include "klcert/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "klcert/errors.hpp"
#include "klcert/sets.hpp"
#include "klcert/subdiff.hpp"

namespace klcert {

namespace {

Vec clamp_nonneg(std::span<const double> u) { return project_nonneg(u); }

double half_sq_dist(std::span<const double> x, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - u[i]) * (x[i] - u[i]);
  return 0.5 * s;
}

// min_k  -||u_{J_k}|| + t nu k  over prefixes J_k of the magnitude order.
Vec sphere_zero_norm_prox(std::span<const double> u, double t, double nu) {
  if (norm2(u) == 0.0) throw DegenerateInputError("sphere prox of the zero vector is multivalued");
  const std::size_t p = u.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 1;
  for (std::size_t k = 1; k <= p; ++k) {
    const SupportSet j = top_k_indices(u, k);
    const double val = -norm2(restrict_to(u, j)) + t * nu * static_cast<double>(k);
    if (val < best) {
      best = val;
      best_k = k;
    }
  }
  return project_sparse_sphere(u, best_k);
}

// For each size k the best support holds the k largest entries; compare sizes
// on the actual objective of the resulting point.
Vec simplex_zero_norm_prox(std::span<const double> u, double t, double nu) {
  double best = std::numeric_limits<double>::infinity();
  Vec best_x;
  for (std::size_t k = 1; k <= u.size(); ++k) {
    Vec x = project_sparse_simplex(u, k);
    const double val = half_sq_dist(x, u) + t * nu * static_cast<double>(zero_norm(x));
    if (val < best) {
      best = val;
      best_x = std::move(x);
    }
  }
  return best_x;
}

}  // namespace

Vec hard_threshold(std::span<const double> u, double t, double nu) {
  const double thr = std::sqrt(2.0 * nu * t);
  Vec x(u.begin(), u.end());
  for (double& v : x) {
    if (!(std::abs(v) > thr)) v = 0.0;
  }
  return x;
}

Vec prox_theta_h(ThetaKind theta, const HKind& h, std::span<const double> u, double t) {
  if (!(t > 0.0)) throw ArgumentError("prox parameter t must be positive");
  const auto* zn = std::get_if<ZeroNorm>(&h);
  const auto* ball = std::get_if<SparsityBall>(&h);
  if (ball && (ball->kappa < 1 || ball->kappa > u.size())) {
    throw ArgumentError("sparsity level out of range for the input vector");
  }
  switch (theta) {
    case ThetaKind::Zero:
      return zn ? hard_threshold(u, t, zn->nu) : project_sparsity(u, ball->kappa);
    case ThetaKind::NonnegOrthant: {
      const Vec c = clamp_nonneg(u);
      return zn ? hard_threshold(c, t, zn->nu) : project_sparsity(c, ball->kappa);
    }
    case ThetaKind::Sphere:
      return zn ? sphere_zero_norm_prox(u, t, zn->nu) : project_sparse_sphere(u, ball->kappa);
    case ThetaKind::Simplex:
      return zn ? simplex_zero_norm_prox(u, t, zn->nu) : project_sparse_simplex(u, ball->kappa);
    case ThetaKind::SphereNonneg: {
      if (ball) return project_sparse_sphere_nonneg(u, ball->kappa);
      const Vec c = clamp_nonneg(u);
      if (norm2(c) > 0.0) return sphere_zero_norm_prox(c, t, zn->nu);
      return project_sparse_sphere_nonneg(u, 1);
    }
  }
  return {};
}

double resolve_step(const ProblemSpec& problem, const SolverConfig& config) {
  const double lip = 2.0 * spectral_norm(problem.A());
  if (!config.step) return 1.0 / (lip + 1e-8);
  const double s = *config.step;
  if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("step must be positive and finite");
  if (!(s * lip < 1.0)) {
    throw ConfigError("step " + std::to_string(s) + " violates step * 2||A|| < 1 (2||A|| = " +
                      std::to_string(lip) + ")");
  }
  return s;
}

Vec initial_point(const ProblemSpec& problem, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vec g(problem.dim());
  for (double& v : g) v = normal(rng);
  return prox_theta_h(problem.theta(), problem.h(), g, 1.0);
}

IterateTrace proximal_gradient(const ProblemSpec& problem, std::optional<Vec> x0,
                               const SolverConfig& config) {
  if (!(config.tol > 0.0)) throw ConfigError("tol must be positive");
  if (config.max_iters == 0) throw ConfigError("max_iters must be at least 1");
  IterateTrace trace;
  trace.step = resolve_step(problem, config);
  Vec x = x0 ? std::move(*x0) : initial_point(problem, config.seed);
  if (x.size() != problem.dim()) throw ArgumentError("initial point has the wrong dimension");

  trace.iterates.push_back({0, x, objective(problem, x), SupportSet::of(x), 0.0});
  for (std::size_t k = 1; k <= config.max_iters; ++k) {
    Vec u = problem.A().apply(x);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = x[i] - trace.step * 2.0 * u[i];
    Vec next = prox_theta_h(problem.theta(), problem.h(), u, trace.step);
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sq += (next[i] - x[i]) * (next[i] - x[i]);
    x = std::move(next);
    const double step_norm = std::sqrt(sq);
    trace.iterates.push_back({k, x, objective(problem, x), SupportSet::of(x), step_norm});
    if (k >= config.min_iters && step_norm <= config.tol) break;
  }
  const auto& its = trace.iterates;
  std::size_t from = its.size() - 1;
  while (from > 0 && its[from - 1].support == its.back().support) --from;
  trace.support_stable_from = from;
  return trace;
}

std::string_view to_string(RateStatus status) {
  return status == RateStatus::Fitted ? "FITTED" : "GAP_EXHAUSTED";
}

RateReport estimate_linear_rate(std::span<const double> values, std::size_t stable_from,
                                double theta_star) {
  if (values.empty()) throw ArgumentError("empty trace");
  const double vmin = *std::min_element(values.begin(), values.end());
  if (theta_star > vmin + 1e-12) {
    throw ArgumentError("theta_star exceeds the smallest trace value");
  }
  Vec ks, ys;
  for (std::size_t k = stable_from; k < values.size(); ++k) {
    const double gap = values[k] - theta_star;
    if (gap > kGapFloor && std::isfinite(gap)) {
      ks.push_back(static_cast<double>(k));
      ys.push_back(std::log(gap));
    }
  }
  RateReport report;
  if (ks.size() < 3) return report;
  const std::size_t tail = values.size() > stable_from ? values.size() - stable_from : 0;
  if (tail < kMinRateTail) {
    throw EstimationError("post-stabilization tail has " + std::to_string(tail) +
                              " iterations, need " + std::to_string(kMinRateTail),
                          0.0);
  }
  const double n = static_cast<double>(ks.size());
  const double mk = std::accumulate(ks.begin(), ks.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    sxy += (ks[i] - mk) * (ys[i] - my);
    sxx += (ks[i] - mk) * (ks[i] - mk);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  report.status = RateStatus::Fitted;
  report.slope = sxy / sxx;
  report.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  report.tail_length = ks.size();
  return report;
}

RateReport estimate_linear_rate(const IterateTrace& trace, double theta_star) {
  Vec values;
  for (const auto& it : trace.iterates) values.push_back(it.theta);
  return estimate_linear_rate(values, trace.support_stable_from, theta_star);
}

}  // namespace klcert
