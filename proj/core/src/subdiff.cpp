#include "klcert/subdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hinge_quadratic.hpp"
#include "klcert/errors.hpp"
#include "klcert/sets.hpp"

namespace klcert {

namespace {

void require_dim(const ProblemSpec& problem, std::span<const double> x) {
  if (x.size() != problem.dim()) {
    throw ArgumentError("point has dimension " + std::to_string(x.size()) + ", problem has " +
                        std::to_string(problem.dim()));
  }
}

std::string domain_violation(const ProblemSpec& problem, std::span<const double> x) {
  if (!in_theta_domain(problem.theta(), x)) {
    return "point violates the " + std::string(to_string(problem.theta())) + " constraint";
  }
  if (const auto* s = problem.sparsity(); s && zero_norm(x) > s->kappa) {
    return "point has " + std::to_string(zero_norm(x)) + " nonzeros, sparsity level is " +
           std::to_string(s->kappa);
  }
  return {};
}

// Slope of the theta multiplier on support coordinate i.
double multiplier_slope(ThetaKind kind, double xi) {
  switch (kind) {
    case ThetaKind::Sphere:
    case ThetaKind::SphereNonneg: return xi;
    case ThetaKind::Simplex: return 1.0;
    default: return 0.0;
  }
}

// Best residual on an off-support coordinate that h forces to be matched.
// The theta normal cone allows zeta_i free (zero, sphere), zeta_i <= 0
// (orthant kinds) or zeta_i <= omega (simplex).
double offblock_residual(ThetaKind kind, double gi, double omega) {
  switch (kind) {
    case ThetaKind::Zero:
    case ThetaKind::Sphere: return std::abs(gi);
    case ThetaKind::NonnegOrthant:
    case ThetaKind::SphereNonneg: return std::max(0.0, -gi);
    case ThetaKind::Simplex: return std::max(0.0, -(gi + omega));
  }
  return 0.0;
}

// k entries of `pool` with the smallest key, ties to the smaller index.
SupportSet smallest_k(const std::vector<std::size_t>& pool, const Vec& key, std::size_t k,
                      std::size_t dim) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  std::vector<std::size_t> pick;
  for (std::size_t r = 0; r < k; ++r) pick.push_back(pool[order[r]]);
  std::sort(pick.begin(), pick.end());
  return SupportSet(std::move(pick), dim);
}

}  // namespace

bool in_theta_domain(ThetaKind kind, std::span<const double> x) {
  switch (kind) {
    case ThetaKind::Zero: return true;
    case ThetaKind::Sphere: return on_sphere(x);
    case ThetaKind::Simplex: return in_simplex(x);
    case ThetaKind::NonnegOrthant: return is_nonneg(x);
    case ThetaKind::SphereNonneg: return is_nonneg(x) && on_sphere(x);
  }
  return false;
}

bool in_domain(const ProblemSpec& problem, std::span<const double> x) {
  return x.size() == problem.dim() && domain_violation(problem, x).empty();
}

double objective(const ProblemSpec& problem, std::span<const double> x) {
  require_dim(problem, x);
  if (!domain_violation(problem, x).empty()) return std::numeric_limits<double>::infinity();
  double value = problem.A().quadratic_form(x);
  if (const auto* z = problem.zero_norm()) value += z->nu * static_cast<double>(zero_norm(x));
  return value;
}

SubdiffResult subdiff_distance(const ProblemSpec& problem, std::span<const double> x) {
  require_dim(problem, x);
  if (auto why = domain_violation(problem, x); !why.empty()) throw ArgumentError(why);

  const std::size_t p = problem.dim();
  const ThetaKind kind = problem.theta();
  Vec g = problem.A().apply(x);
  for (double& gi : g) gi *= 2.0;
  const SupportSet J = SupportSet::of(x);

  std::vector<detail::LinearTerm> block;
  for (std::size_t i : J) block.push_back({g[i], multiplier_slope(kind, x[i])});
  const auto reduced = detail::minimize_hinge_quadratic(block, {});

  SubdiffResult out;
  out.reduced_distance = std::sqrt(std::max(0.0, reduced.value));
  const bool with_omega = has_multiplier(kind) && !J.empty();

  const auto* ball = problem.sparsity();
  if (ball == nullptr || J.size() == ball->kappa) {
    if (with_omega) out.omega = reduced.omega;
  } else {
    const std::size_t m = ball->kappa - J.size();
    const std::vector<std::size_t> off = J.complement().indices();
    if (kind == ThetaKind::Simplex) {
      // For every omega the m largest g_i give the m smallest hinge residuals.
      Vec key;
      for (std::size_t i : off) key.push_back(-g[i]);
      out.branch = smallest_k(off, key, m, p);
      Vec hinges;
      for (std::size_t i : *out.branch) hinges.push_back(g[i]);
      out.omega = detail::minimize_hinge_quadratic(block, hinges).omega;
    } else {
      Vec key;
      for (std::size_t i : off) key.push_back(offblock_residual(kind, g[i], 0.0));
      out.branch = smallest_k(off, key, m, p);
      if (with_omega) out.omega = reduced.omega;
    }
    out.lower_bound = true;
  }
  out.distance = witness_distance(problem, x, out.omega, out.branch);
  return out;
}

double witness_distance(const ProblemSpec& problem, std::span<const double> x,
                        std::optional<double> omega, const std::optional<SupportSet>& branch) {
  require_dim(problem, x);
  const ThetaKind kind = problem.theta();
  const double w = omega.value_or(0.0);
  const Vec ax = problem.A().apply(x);
  double sq = 0.0;
  for (std::size_t i : SupportSet::of(x)) {
    const double r = 2.0 * ax[i] + w * multiplier_slope(kind, x[i]);
    sq += r * r;
  }
  if (branch) {
    for (std::size_t i : *branch) {
      const double r = offblock_residual(kind, 2.0 * ax[i], w);
      sq += r * r;
    }
  }
  return std::sqrt(sq);
}

bool check_critical(const ProblemSpec& problem, std::span<const double> x, double tol) {
  return subdiff_distance(problem, x).distance <= tol;
}

AssumptionVReport assumption_v_check(const ProblemSpec& problem, std::span<const double> x) {
  require_dim(problem, x);
  if (!in_theta_domain(problem.theta(), x)) {
    throw ArgumentError("point violates the " + std::string(to_string(problem.theta())) +
                        " constraint");
  }
  AssumptionVReport report;
  report.support = SupportSet::of(x);
  const auto& J = report.support;
  if (J.empty()) {
    report.holds = true;
    return report;
  }
  const Vec xj = restrict_to(x, J);
  const SymMatrix ajj = problem.A().principal(J);
  Vec gj = ajj.apply(xj);
  for (double& v : gj) v *= 2.0;

  // Closed-form projections of the block gradient off the multiplier direction.
  Vec r = gj;
  switch (problem.theta()) {
    case ThetaKind::Sphere:
    case ThetaKind::SphereNonneg: {
      const double c = dot(gj, xj) / dot(xj, xj);
      for (std::size_t k = 0; k < r.size(); ++k) r[k] -= c * xj[k];
      break;
    }
    case ThetaKind::Simplex: {
      const double mean = std::accumulate(gj.begin(), gj.end(), 0.0) / static_cast<double>(gj.size());
      for (double& v : r) v -= mean;
      break;
    }
    default: break;
  }
  report.block_side = norm2(r);

  const ProblemSpec restricted(ajj, problem.theta(), ZeroNorm{1.0});
  report.restricted_side = subdiff_distance(restricted, xj).distance;
  report.holds = report.block_side >= report.restricted_side - 1e-10;
  return report;
}

}  // namespace klcert
