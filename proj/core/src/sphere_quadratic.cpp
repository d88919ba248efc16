#include "klcert/sphere_quadratic.hpp"

#include <algorithm>
#include <cmath>

#include "klcert/errors.hpp"

namespace klcert {

namespace {

bool same_value(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

void require_unit(std::span<const double> z) {
  if (std::abs(norm2(z) - 1.0) > 1e-10) {
    throw ArgumentError("point is not on the unit sphere (norm " + std::to_string(norm2(z)) + ")");
  }
}

SphereCriticalSet from_spectrum(std::span<const double> values, Matrix basis) {
  SphereCriticalSet out;
  const std::size_t p = values.size();
  std::vector<bool> grouped(p, false);
  for (std::size_t i = 0; i < p; ++i) {
    if (grouped[i]) continue;
    CriticalFamily fam{values[i], {}};
    for (std::size_t j = i; j < p; ++j) {
      if (!grouped[j] && same_value(values[i], values[j])) {
        grouped[j] = true;
        fam.columns.push_back(j);
      }
    }
    out.families.push_back(std::move(fam));
  }
  for (std::size_t k = 0; k < p; ++k) {
    Vec b = basis.column(k);
    out.representatives.push_back(b);
    for (double& v : b) v = -v;
    out.representatives.push_back(std::move(b));
  }
  out.basis = std::move(basis);
  return out;
}

}  // namespace

SphereCriticalSet crit_points_diag(std::span<const double> d) {
  return from_spectrum(d, Matrix::identity(d.size()));
}

SphereCriticalSet crit_points_general(const SymMatrix& h) {
  auto eig = sym_eig(h);
  return from_spectrum(eig.eigenvalues, std::move(eig.basis));
}

double dist_subdiff_sphere_quad(const SymMatrix& h, std::span<const double> z) {
  require_unit(z);
  Vec hz = h.apply(z);
  const double rq = dot(z, hz);
  for (std::size_t i = 0; i < hz.size(); ++i) hz[i] -= rq * z[i];
  return 2.0 * norm2(hz);
}

double riemannian_grad_norm(const SymMatrix& h, std::span<const double> z) {
  require_unit(z);
  const Vec grad = [&] {
    Vec g = h.apply(z);
    for (double& v : g) v *= 2.0;
    return g;
  }();
  const std::size_t p = z.size();
  Vec proj(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      proj[i] += ((i == j ? 1.0 : 0.0) - z[i] * z[j]) * grad[j];
    }
  }
  return norm2(proj);
}

KLConstantReport kl_constant_theoretical(std::span<const double> d, std::span<const double> xbar) {
  if (d.size() != xbar.size()) throw ArgumentError("diagonal and point dimensions differ");
  const SymMatrix dm = SymMatrix::diagonal(d);
  const double res = dist_subdiff_sphere_quad(dm, xbar);
  if (res > 1e-9) {
    throw ArgumentError("point is not critical (residual " + std::to_string(res) + ")");
  }
  KLConstantReport report;
  report.lambda_bar = dm.quadratic_form(xbar);
  const bool all_equal = std::all_of(d.begin(), d.end(), [&](double v) { return same_value(v, d[0]); });

  const SupportSet supp = SupportSet::of(xbar);
  std::vector<std::size_t> j1;
  for (std::size_t j : supp.complement()) {
    if (!same_value(d[j], report.lambda_bar)) j1.push_back(j);
  }
  report.j1bar = SupportSet(j1, d.size());
  if (all_equal || j1.empty()) return report;

  double lo = std::abs(d[j1.front()] - report.lambda_bar);
  double hi = lo;
  for (std::size_t j : j1) {
    const double gap = std::abs(d[j] - report.lambda_bar);
    lo = std::min(lo, gap);
    hi = std::max(hi, gap);
  }
  report.c_theory = lo / std::sqrt(hi);
  return report;
}

bool same_order_sandwich(std::span<const double> d, const KLConstantReport& report,
                         std::span<const double> z) {
  const double rq = SymMatrix::diagonal(d).quadratic_form(z);
  for (std::size_t j : report.j1bar) {
    const double ref = std::abs(d[j] - report.lambda_bar);
    const double cur = std::abs(d[j] - rq);
    if (cur < 0.5 * ref || cur > 1.5 * ref) return false;
  }
  return true;
}

}  // namespace klcert
