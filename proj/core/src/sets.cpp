#include "klcert/sets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "hinge_quadratic.hpp"
#include "klcert/errors.hpp"

namespace klcert {

namespace {

void require_kappa(std::size_t kappa, std::size_t p) {
  if (kappa == 0 || kappa > p) {
    std::ostringstream msg;
    msg << "sparsity level kappa=" << kappa << " outside [1, " << p << "]";
    throw ArgumentError(msg.str());
  }
}

void require_simplex(std::span<const double> x) {
  if (!in_simplex(x)) throw ArgumentError("point is not in the simplex");
}

Vec normalized(Vec x) {
  const double n = norm2(x);
  for (double& v : x) v /= n;
  return x;
}

}  // namespace

bool on_sphere(std::span<const double> x) { return std::abs(norm2(x) - 1.0) <= kFeasTol; }

bool is_nonneg(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0; });
}

bool in_simplex(std::span<const double> x) {
  if (!is_nonneg(x)) return false;
  const double s = std::accumulate(x.begin(), x.end(), 0.0);
  return std::abs(s - 1.0) <= kFeasTol;
}

Vec project_sparsity(std::span<const double> u, std::size_t kappa) {
  require_kappa(kappa, u.size());
  const SupportSet keep = top_k_indices(u, kappa);
  Vec x(u.size(), 0.0);
  for (std::size_t i : keep) x[i] = u[i];
  return x;
}

Vec project_sphere(std::span<const double> u) {
  if (norm2(u) == 0.0) throw DegenerateInputError("project_sphere: u = 0 has no unique projection");
  return normalized(Vec(u.begin(), u.end()));
}

Vec project_simplex(std::span<const double> u) {
  if (u.empty()) throw ArgumentError("project_simplex: empty vector");
  Vec sorted(u.begin(), u.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumsum += sorted[j];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) tau = candidate;
  }
  Vec x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) x[i] = std::max(u[i] - tau, 0.0);
  return x;
}

Vec project_nonneg(std::span<const double> u) {
  Vec x(u.begin(), u.end());
  for (double& v : x) v = std::max(v, 0.0);
  return x;
}

Vec project_sparse_sphere(std::span<const double> u, std::size_t kappa) {
  Vec x = project_sparsity(u, kappa);
  if (norm2(x) == 0.0)
    throw DegenerateInputError("project_sparse_sphere: top-kappa block of u is zero");
  return normalized(std::move(x));
}

Vec project_sparse_simplex(std::span<const double> u, std::size_t kappa) {
  require_kappa(kappa, u.size());
  const SupportSet keep = top_k_values(u, kappa);
  const Vec block = project_simplex(restrict_to(u, keep));
  return embed(block, keep);
}

Vec project_sparse_sphere_nonneg(std::span<const double> u, std::size_t kappa) {
  require_kappa(kappa, u.size());
  const Vec plus = project_nonneg(u);
  if (norm2(plus) > 0.0) return project_sparse_sphere(plus, kappa);
  if (norm2(u) == 0.0)
    throw DegenerateInputError("project_sparse_sphere_nonneg: u = 0 has no unique projection");
  const auto it = std::max_element(u.begin(), u.end());
  Vec x(u.size(), 0.0);
  x[static_cast<std::size_t>(it - u.begin())] = 1.0;
  return x;
}

ConeQueryResult normal_cone_sparsity_contains(std::span<const double> xbar, std::size_t kappa,
                                              std::span<const double> v) {
  const std::size_t p = xbar.size();
  if (v.size() != p) throw ArgumentError("normal_cone_sparsity_contains: dimension mismatch");
  require_kappa(kappa, p);
  const SupportSet J = SupportSet::of(xbar);
  if (J.size() > kappa) throw ArgumentError("normal_cone_sparsity_contains: xbar outside the sparsity ball");

  auto is_zero = [](double t) { return std::abs(t) <= kFeasTol; };
  const bool vanishes_on_support = std::all_of(J.begin(), J.end(), [&](std::size_t i) { return is_zero(v[i]); });

  ConeQueryResult out;
  if (J.size() == kappa) {
    out.contained = out.regular_contained = vanishes_on_support;
    if (out.contained) out.branch = SupportSet({}, p);
    return out;
  }

  const std::size_t need = kappa - J.size();
  std::vector<std::size_t> completion;
  for (std::size_t i : J.complement()) {
    if (completion.size() == need) break;
    if (is_zero(v[i])) completion.push_back(i);
  }
  out.contained = vanishes_on_support && completion.size() == need;
  out.regular_contained = std::all_of(v.begin(), v.end(), is_zero);
  if (out.contained) out.branch = SupportSet(std::move(completion), p);
  return out;
}

ConeQueryResult normal_cone_simplex_query(std::span<const double> xbar,
                                          std::span<const double> v) {
  if (v.size() != xbar.size()) throw ArgumentError("normal_cone_simplex: dimension mismatch");
  require_simplex(xbar);
  std::vector<detail::LinearTerm> full;
  std::vector<double> hinges;
  for (std::size_t i = 0; i < xbar.size(); ++i) {
    if (xbar[i] != 0.0) {
      full.push_back({-v[i], 1.0});
    } else {
      hinges.push_back(-v[i]);
    }
  }
  const auto best = detail::minimize_hinge_quadratic(full, hinges);
  ConeQueryResult out;
  const double residual = std::sqrt(std::max(best.value, 0.0));
  out.contained = out.regular_contained = residual <= kFeasTol;
  out.omega = best.omega;
  return out;
}

double normal_cone_simplex_residual(std::span<const double> xbar, std::span<const double> v) {
  const auto q = normal_cone_simplex_query(xbar, v);
  double f = 0.0;
  for (std::size_t i = 0; i < xbar.size(); ++i) {
    const double r = xbar[i] != 0.0 ? v[i] - *q.omega : std::max(v[i] - *q.omega, 0.0);
    f += r * r;
  }
  return std::sqrt(f);
}

ConeQueryResult normal_cone_sphere_query(std::span<const double> xbar,
                                         std::span<const double> v) {
  if (v.size() != xbar.size()) throw ArgumentError("normal_cone_sphere: dimension mismatch");
  if (!on_sphere(xbar)) throw ArgumentError("normal_cone_sphere: xbar is not on the sphere");
  const double omega = dot(v, xbar) / dot(xbar, xbar);
  Vec r(v.begin(), v.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= omega * xbar[i];
  ConeQueryResult out;
  out.contained = out.regular_contained = norm2(r) <= kFeasTol;
  out.omega = omega;
  return out;
}

bool tangent_simplex_contains(std::span<const double> xbar, std::span<const double> d) {
  if (d.size() != xbar.size()) throw ArgumentError("tangent_simplex_contains: dimension mismatch");
  require_simplex(xbar);
  const double s = std::accumulate(d.begin(), d.end(), 0.0);
  if (std::abs(s) > 1e-12) return false;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (xbar[i] == 0.0 && d[i] < 0.0) return false;
  return true;
}

}  // namespace klcert
