#include "klcert/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "klcert/certify.hpp"
#include "klcert/errors.hpp"
#include "klcert/sets.hpp"
#include "klcert/subdiff.hpp"

namespace klcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void guard(std::size_t p, std::size_t limit, const char* what) {
  if (p > limit) {
    throw SizeError(std::string(what) + " supports p <= " + std::to_string(limit) + ", got p = " +
                    std::to_string(p));
  }
}

// Calls f on every subset of `pool` with size in [lo, hi], by size then lexicographically.
void for_each_subset(const std::vector<std::size_t>& pool, std::size_t lo, std::size_t hi,
                     const std::function<void(const std::vector<std::size_t>&)>& f) {
  const std::size_t n = pool.size();
  for (std::size_t s = lo; s <= std::min(hi, n); ++s) {
    std::vector<std::size_t> idx(s);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<std::size_t> pick(s);
      for (std::size_t r = 0; r < s; ++r) pick[r] = pool[idx[r]];
      f(pick);
      std::size_t r = s;
      while (r > 0 && idx[r - 1] == n - s + r - 1) --r;
      if (r == 0) break;
      ++idx[r - 1];
      for (std::size_t q = r; q < s; ++q) idx[q] = idx[q - 1] + 1;
    }
  }
}

std::vector<std::size_t> range(std::size_t p) {
  std::vector<std::size_t> v(p);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

bool improves(double candidate, double best) {
  if (!std::isfinite(best)) return candidate < best;
  return candidate < best - 1e-12 * std::max(1.0, std::abs(best));
}

// Interior critical points of z^T H z over the simplex of the block.
std::optional<Vec> simplex_face_point(const SymMatrix& h) {
  const std::size_t m = h.dim();
  Matrix k(m + 1, m + 1, 0.0);
  Vec rhs(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) k(i, j) = 2.0 * h(i, j);
    k(i, m) = 1.0;
    k(m, i) = 1.0;
  }
  rhs[m] = 1.0;
  auto sol = solve_linear(std::move(k), std::move(rhs));
  if (!sol) return std::nullopt;
  sol->resize(m);
  if (std::any_of(sol->begin(), sol->end(), [](double v) { return !(v > 0.0); })) return std::nullopt;
  return sol;
}

std::vector<Vec> restricted_candidates(ThetaKind kind, const SymMatrix& h) {
  std::vector<Vec> out;
  switch (kind) {
    case ThetaKind::Sphere: {
      const auto eig = sym_eig(h);
      out.push_back(eig.basis.column(h.dim() - 1));
      break;
    }
    case ThetaKind::SphereNonneg: {
      const auto eig = sym_eig(h);
      for (std::size_t c = 0; c < h.dim(); ++c) {
        Vec z = eig.basis.column(c);
        if (std::accumulate(z.begin(), z.end(), 0.0) < 0.0)
          for (double& v : z) v = -v;
        if (std::all_of(z.begin(), z.end(), [](double v) { return v > 0.0; })) out.push_back(z);
      }
      break;
    }
    case ThetaKind::Simplex:
      if (auto z = simplex_face_point(h)) out.push_back(*z);
      break;
    default: break;
  }
  return out;
}

// Whether z^T H z < 0 is reachable on the block (over all z, or z >= 0).
bool block_unbounded(ThetaKind kind, const SymMatrix& h) {
  const double floor = -1e-12 * std::max(1.0, h.max_abs());
  if (kind == ThetaKind::Zero) return sym_eig(h).eigenvalues.back() < floor;
  if (auto z = simplex_face_point(h)) return h.quadratic_form(*z) < floor;
  return false;
}

}  // namespace

std::string_view to_string(OracleMethod method) {
  switch (method) {
    case OracleMethod::SupportEnum: return "SUPPORT_ENUM";
    case OracleMethod::Grid: return "GRID";
    case OracleMethod::Breakpoint: return "BREAKPOINT";
  }
  return "?";
}

OracleReport global_min_enum(const ProblemSpec& problem) {
  const std::size_t p = problem.dim();
  guard(p, kMaxGlobalDim, "global_min_enum");
  const ThetaKind kind = problem.theta();
  const std::size_t max_size = problem.sparsity() ? problem.sparsity()->kappa : p;
  const bool origin_feasible = kind == ThetaKind::Zero || kind == ThetaKind::NonnegOrthant;

  OracleReport best;
  best.value = kInf;
  best.method = OracleMethod::SupportEnum;
  if (origin_feasible) {
    best.value = 0.0;
    best.argmin = Vec(p, 0.0);
  }
  for_each_subset(range(p), 1, max_size, [&](const std::vector<std::size_t>& idx) {
    ++best.supports_examined;
    if (best.unbounded) return;
    const SupportSet j(idx, p);
    const SymMatrix h = problem.A().principal(j);
    if (origin_feasible) {
      if (block_unbounded(kind, h)) {
        best.unbounded = true;
        best.value = -kInf;
        best.argmin.clear();
      }
      return;
    }
    for (const Vec& z : restricted_candidates(kind, h)) {
      Vec x = embed(z, j);
      const double v = objective(problem, x);
      if (improves(v, best.value)) {
        best.value = v;
        best.argmin = std::move(x);
      }
    }
  });
  return best;
}

OracleReport subdiff_distance_bruteforce(const ProblemSpec& problem, std::span<const double> x,
                                         std::size_t grid_points) {
  const std::size_t p = problem.dim();
  guard(p, kMaxSubdiffDim, "subdiff_distance_bruteforce");
  if (!in_domain(problem, x)) throw ArgumentError("point is outside dom Theta");
  if (grid_points < 2) throw ArgumentError("grid needs at least two points");
  const ThetaKind kind = problem.theta();

  Vec g = problem.A().apply(x);
  for (double& v : g) v *= 2.0;
  const SupportSet j = SupportSet::of(x);
  const std::vector<std::size_t> off = j.complement().indices();

  // Normal-cone description per coordinate: zeta_i = omega * a_i on the support;
  // off the support zeta_i free, zeta_i <= 0 or zeta_i <= omega.
  auto on_support = [&](std::size_t i, double w) {
    switch (kind) {
      case ThetaKind::Sphere:
      case ThetaKind::SphereNonneg: return g[i] + w * x[i];
      case ThetaKind::Simplex: return g[i] + w;
      default: return g[i];
    }
  };
  auto off_support = [&](std::size_t i, double w) {
    switch (kind) {
      case ThetaKind::NonnegOrthant:
      case ThetaKind::SphereNonneg: return std::min(0.0, g[i]);
      case ThetaKind::Simplex: return std::min(0.0, g[i] + w);
      default: return g[i];
    }
  };

  std::vector<std::vector<std::size_t>> branches;
  const auto* ball = problem.sparsity();
  const bool limiting = ball && j.size() < ball->kappa;
  if (limiting) {
    const std::size_t m = ball->kappa - j.size();
    for_each_subset(off, m, m, [&](const std::vector<std::size_t>& b) { branches.push_back(b); });
  } else {
    branches.emplace_back();
  }

  auto objective_sq = [&](const std::vector<std::size_t>& b, double w) {
    double s = 0.0;
    for (std::size_t i : j) s += on_support(i, w) * on_support(i, w);
    for (std::size_t i : b) s += off_support(i, w) * off_support(i, w);
    return s;
  };

  OracleReport out;
  out.value = kInf;
  out.supports_examined = branches.size();
  const bool with_omega = has_multiplier(kind) && !j.empty();
  out.method = with_omega ? OracleMethod::Grid : OracleMethod::SupportEnum;

  const double bound = 2.0 * spectral_norm(problem.A()) * norm2(x) + 1.0;
  const double h = 2.0 * bound / static_cast<double>(grid_points - 1);
  for (const auto& b : branches) {
    double w_best = 0.0;
    double f_best = objective_sq(b, 0.0);
    if (with_omega) {
      f_best = kInf;
      for (std::size_t k = 0; k < grid_points; ++k) {
        const double w = -bound + h * static_cast<double>(k);
        const double f = objective_sq(b, w);
        if (f < f_best) {
          f_best = f;
          w_best = w;
        }
      }
      // Golden-section polish on the bracketing cell pair.
      const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
      double lo = w_best - h, hi = w_best + h;
      double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
      double fc = objective_sq(b, c), fd = objective_sq(b, d);
      for (int it = 0; it < 100; ++it) {
        if (fc < fd) {
          hi = d;
          d = c;
          fd = fc;
          c = hi - phi * (hi - lo);
          fc = objective_sq(b, c);
        } else {
          lo = c;
          c = d;
          fc = fd;
          d = lo + phi * (hi - lo);
          fd = objective_sq(b, d);
        }
      }
      const double w = 0.5 * (lo + hi);
      if (const double f = objective_sq(b, w); f < f_best) {
        f_best = f;
        w_best = w;
      }
    }
    const double dist = std::sqrt(f_best);
    if (dist < out.value) {
      out.value = dist;
      if (with_omega) out.omega = w_best;
      if (limiting) out.branch = SupportSet(b, p);
    }
  }
  return out;
}

double prox_objective(ThetaKind theta, const HKind& h, std::span<const double> x,
                      std::span<const double> u, double t) {
  if (!in_theta_domain(theta, x)) return kInf;
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += 0.5 * (x[i] - u[i]) * (x[i] - u[i]);
  const auto nnz = zero_norm(x);
  if (const auto* z = std::get_if<ZeroNorm>(&h)) return v + t * z->nu * static_cast<double>(nnz);
  return nnz <= std::get<SparsityBall>(h).kappa ? v : kInf;
}

OracleReport prox_bruteforce(ThetaKind theta, const HKind& h, std::span<const double> u, double t) {
  const std::size_t p = u.size();
  guard(p, kMaxProxDim, "prox_bruteforce");
  const auto* ball = std::get_if<SparsityBall>(&h);
  const std::size_t max_size = ball ? ball->kappa : p;

  OracleReport best;
  best.value = kInf;
  auto consider = [&](Vec x) {
    ++best.supports_examined;
    const double v = prox_objective(theta, h, x, u, t);
    if (improves(v, best.value)) {
      best.value = v;
      best.argmin = std::move(x);
    }
  };
  for_each_subset(range(p), 0, max_size, [&](const std::vector<std::size_t>& idx) {
    const SupportSet s(idx, p);
    Vec us = restrict_to(u, s);
    Vec z;
    switch (theta) {
      case ThetaKind::Zero: z = us; break;
      case ThetaKind::NonnegOrthant: z = project_nonneg(us); break;
      case ThetaKind::Sphere:
        if (idx.empty()) return;
        if (norm2(us) > 0.0) {
          z = project_sphere(us);
        } else {
          z.assign(us.size(), 0.0);
          z[0] = 1.0;
        }
        break;
      case ThetaKind::SphereNonneg: {
        if (idx.empty()) return;
        z = project_nonneg(us);
        if (norm2(z) > 0.0) {
          z = project_sphere(z);
        } else {
          const auto k = static_cast<std::size_t>(std::max_element(us.begin(), us.end()) - us.begin());
          z.assign(us.size(), 0.0);
          z[k] = 1.0;
        }
        break;
      }
      case ThetaKind::Simplex:
        if (idx.empty()) return;
        z = project_simplex(us);
        break;
    }
    consider(embed(z, s));
  });
  return best;
}

RatioScan analyze_ratio_table(std::vector<RatioRow> rows) {
  RatioScan scan;
  scan.rows = std::move(rows);
  scan.vacuous = scan.rows.empty();
  for (const auto& r : scan.rows) {
    auto it = std::find_if(scan.min_ratio_by_radius.begin(), scan.min_ratio_by_radius.end(),
                           [&](const auto& e) { return e.first == r.radius; });
    if (it == scan.min_ratio_by_radius.end()) {
      scan.min_ratio_by_radius.emplace_back(r.radius, r.ratio);
    } else {
      it->second = std::min(it->second, r.ratio);
    }
  }
  std::sort(scan.min_ratio_by_radius.begin(), scan.min_ratio_by_radius.end());
  Vec xs, ys;
  for (const auto& [radius, ratio] : scan.min_ratio_by_radius) {
    if (ratio > 0.0 && radius > 0.0) {
      xs.push_back(std::log(radius));
      ys.push_back(std::log(ratio));
    }
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sxy += (xs[k] - mx) * (ys[k] - my);
      sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    scan.decays = sxx > 0.0 && sxy / sxx > 0.25;
  }
  // A vanishing ratio at any radius is decay as well.
  for (const auto& e : scan.min_ratio_by_radius) {
    if (!(e.second > 0.0)) scan.decays = true;
  }
  return scan;
}

RatioScan kl_ratio_scan(const ProblemSpec& problem, std::span<const double> xbar,
                        std::span<const double> radii, std::size_t per_radius, std::uint64_t seed) {
  std::vector<RatioRow> rows;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    const Vec steps(per_radius, radii[r]);
    const auto samples = sample_at_radii(problem, xbar, steps, kInf, seed + r);
    for (const auto& s : samples) {
      rows.push_back({radii[r], s.gap, s.dist, s.dist / std::sqrt(s.gap)});
    }
  }
  return analyze_ratio_table(std::move(rows));
}

double rate_reference(const ProblemSpec& problem, std::span<const double> values) {
  if (values.empty()) throw ArgumentError("empty trace");
  const double best = *std::min_element(values.begin(), values.end());
  if (problem.dim() > kMaxSubdiffDim) return best;
  const auto global = global_min_enum(problem);
  if (!global.unbounded && relatively_close(best, global.value, 1e-9)) {
    return std::min(best, global.value);
  }
  return best;
}

bool relatively_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

SymMatrix random_symmetric(std::size_t p, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix b(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) b(i, j) = normal(rng);
  return SymMatrix::from_dense(b);
}

Vec random_feasible_point(const ProblemSpec& problem, std::mt19937_64& rng) {
  const std::size_t p = problem.dim();
  const std::size_t max_size = problem.sparsity() ? problem.sparsity()->kappa : p;
  std::uniform_int_distribution<std::size_t> size_dist(1, max_size);
  const std::size_t s = size_dist(rng);
  std::vector<std::size_t> pool = range(p);
  for (std::size_t r = 0; r < s; ++r) {
    std::uniform_int_distribution<std::size_t> pick(r, p - 1);
    std::swap(pool[r], pool[pick(rng)]);
  }
  pool.resize(s);
  std::sort(pool.begin(), pool.end());
  std::normal_distribution<double> normal;
  Vec x(p, 0.0);
  for (std::size_t i : pool) {
    double v = normal(rng);
    while (v == 0.0) v = normal(rng);
    x[i] = is_sign_constrained(problem.theta()) ? std::abs(v) : v;
  }
  switch (problem.theta()) {
    case ThetaKind::Sphere:
    case ThetaKind::SphereNonneg: {
      const double n = norm2(x);
      for (double& v : x) v /= n;
      break;
    }
    case ThetaKind::Simplex: {
      const double sum = std::accumulate(x.begin(), x.end(), 0.0);
      for (double& v : x) v /= sum;
      break;
    }
    default: break;
  }
  return x;
}

}  // namespace klcert
