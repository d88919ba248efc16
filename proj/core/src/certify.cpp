#include "klcert/certify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "klcert/errors.hpp"
#include "klcert/subdiff.hpp"

namespace klcert {

namespace {

constexpr double kCritTol = 1e-8;
constexpr std::size_t kBins = 20;

bool is_sphere_like(ThetaKind k) { return k == ThetaKind::Sphere || k == ThetaKind::SphereNonneg; }

// Theta(x) - Theta(xbar) written as d^T M d + 2 d^T M xbar with d = x - xbar,
// which avoids cancelling two O(1) objective values.
class GapEvaluator {
 public:
  GapEvaluator(const ProblemSpec& problem, std::span<const double> xbar)
      : problem_(problem), xbar_(xbar.begin(), xbar.end()), nnz_(zero_norm(xbar)) {
    const auto& a = problem.A();
    const std::size_t p = a.dim();
    Matrix m = a.dense();
    const ThetaKind kind = problem.theta();
    if (is_sphere_like(kind)) {
      const double mu = a.quadratic_form(xbar) / dot(xbar, xbar);
      for (std::size_t i = 0; i < p; ++i) m(i, i) -= mu;
    } else if (kind == ThetaKind::Simplex) {
      const double mu = a.quadratic_form(xbar);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) m(i, j) -= mu;
    }
    m_ = std::move(m);
    mx_ = m_.apply(xbar_);
  }

  double operator()(std::span<const double> x) const {
    Vec d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - xbar_[i];
    const Vec md = m_.apply(d);
    double gap = dot(d, md) + 2.0 * dot(d, mx_);
    if (is_sphere_like(problem_.theta())) gap /= dot(x, x);
    if (const auto* z = problem_.zero_norm()) {
      gap += z->nu * (static_cast<double>(zero_norm(x)) - static_cast<double>(nnz_));
    }
    return gap;
  }

 private:
  const ProblemSpec& problem_;
  Vec xbar_;
  std::size_t nnz_;
  Matrix m_;
  Vec mx_;
};

class Perturber {
 public:
  Perturber(const ProblemSpec& problem, std::span<const double> xbar, std::uint64_t seed)
      : problem_(problem),
        xbar_(xbar.begin(), xbar.end()),
        support_(SupportSet::of(xbar)),
        off_(support_.complement().indices()),
        rng_(seed) {
    if (const auto* b = problem.sparsity(); b && support_.size() < b->kappa && !off_.empty()) {
      max_growth_ = std::min(b->kappa - support_.size(), off_.size());
    }
  }

  bool can_grow() const { return max_growth_ > 0; }

  // Unit direction for a same-support step, or empty when none exists.
  std::optional<Vec> same_support_direction() {
    Vec d(xbar_.size(), 0.0);
    for (std::size_t i : support_) d[i] = normal_(rng_);
    return finish(std::move(d));
  }

  std::optional<Vec> growing_direction() {
    std::uniform_int_distribution<std::size_t> count(1, max_growth_);
    const std::size_t k = count(rng_);
    std::vector<std::size_t> pool = off_;
    for (std::size_t r = 0; r < k; ++r) {
      std::uniform_int_distribution<std::size_t> pick(r, pool.size() - 1);
      std::swap(pool[r], pool[pick(rng_)]);
    }
    Vec d(xbar_.size(), 0.0);
    for (std::size_t i : support_) d[i] = normal_(rng_);
    const bool nonneg = is_sign_constrained(problem_.theta());
    for (std::size_t r = 0; r < k; ++r) {
      const double v = normal_(rng_);
      d[pool[r]] = nonneg ? std::abs(v) : v;
    }
    return finish(std::move(d));
  }

  Vec step(const Vec& dir, double r) const {
    Vec x(xbar_.size());
    if (is_sphere_like(problem_.theta())) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::cos(r) * xbar_[i] + std::sin(r) * dir[i];
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = xbar_[i] + r * dir[i];
    }
    return x;
  }

 private:
  // Makes d tangent to the theta constraint (keeping new coordinates fixed) and
  // normalizes it.
  std::optional<Vec> finish(Vec d) {
    const ThetaKind kind = problem_.theta();
    if (is_sphere_like(kind)) {
      double c = dot(d, xbar_) / dot(xbar_, xbar_);
      for (std::size_t i : support_) d[i] -= c * xbar_[i];
    } else if (kind == ThetaKind::Simplex) {
      if (support_.empty()) return std::nullopt;
      const double s = std::accumulate(d.begin(), d.end(), 0.0);
      for (std::size_t i : support_) d[i] -= s / static_cast<double>(support_.size());
    }
    const double n = norm2(d);
    if (n <= 1e-12) return std::nullopt;
    for (double& v : d) v /= n;
    return d;
  }

  const ProblemSpec& problem_;
  Vec xbar_;
  SupportSet support_;
  std::vector<std::size_t> off_;
  std::size_t max_growth_ = 0;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
};

}  // namespace

std::vector<KLSample> sample_at_radii(const ProblemSpec& problem, std::span<const double> xbar,
                                      std::span<const double> step_sizes, double eta,
                                      std::uint64_t seed) {
  const auto crit = subdiff_distance(problem, xbar);
  if (crit.distance > kCritTol) {
    throw ArgumentError("xbar is not critical (residual " + std::to_string(crit.distance) + ")");
  }
  const SupportSet j = SupportSet::of(xbar);
  const GapEvaluator gap_of(problem, xbar);
  Perturber perturb(problem, xbar, seed);

  std::vector<KLSample> out;
  for (std::size_t i = 0; i < step_sizes.size(); ++i) {
    std::optional<Vec> dir;
    bool grow = perturb.can_grow() && i % 2 == 1;
    if (!grow) {
      dir = perturb.same_support_direction();
      if (!dir && perturb.can_grow()) grow = true;
    }
    if (grow) dir = perturb.growing_direction();
    if (!dir) continue;

    KLSample s;
    s.point = perturb.step(*dir, step_sizes[i]);
    if (!in_domain(problem, s.point)) continue;
    const SupportSet supp = SupportSet::of(s.point);
    if (!supp.includes(j)) continue;
    Vec diff(xbar.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = s.point[k] - xbar[k];
    s.radius = norm2(diff);
    s.gap = gap_of(s.point);
    if (!(s.radius > 0.0) || !(s.gap > 0.0) || !(s.gap < eta)) continue;
    s.same_support = supp == j;
    s.dist = subdiff_distance(problem, s.point).distance;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<KLSample> sample_neighborhood(const ProblemSpec& problem, std::span<const double> xbar,
                                          const SamplingOptions& options) {
  if (!(options.delta > 0.0) || !(options.eta > 0.0)) {
    throw ArgumentError("delta and eta must be positive");
  }
  Vec steps(options.n);
  for (std::size_t i = 0; i < options.n; ++i) {
    const double frac = options.n > 1 ? static_cast<double>(i) / static_cast<double>(options.n - 1) : 1.0;
    steps[i] = options.delta * std::pow(10.0, -6.0 * (1.0 - frac));
  }
  auto samples = sample_at_radii(problem, xbar, steps, options.eta, options.seed);
  std::erase_if(samples, [&](const KLSample& s) { return s.radius > options.delta; });
  return samples;
}

double min_ratio(std::span<const KLSample> samples) {
  double c = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) c = std::min(c, s.dist / std::sqrt(s.gap));
  return c;
}

KLEstimate estimate_kl_exponent(std::span<const KLSample> samples) {
  KLEstimate est;
  est.n_samples = samples.size();
  est.constant_hat = min_ratio(samples);
  if (samples.size() < kMinFitSamples) {
    throw EstimationError("need at least " + std::to_string(kMinFitSamples) +
                              " samples to fit an exponent, got " + std::to_string(samples.size()),
                          est.constant_hat);
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : samples) {
    lo = std::min(lo, std::log(s.gap));
    hi = std::max(hi, std::log(s.gap));
    est.delta = std::max(est.delta, s.radius);
    est.eta = std::max(est.eta, s.gap);
  }
  // Per-bin sample with the smallest positive dist.
  std::array<std::optional<std::size_t>, kBins> best{};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].dist > 0.0)) continue;
    const double t = hi > lo ? (std::log(samples[i].gap) - lo) / (hi - lo) : 0.0;
    const auto b = std::min(kBins - 1, static_cast<std::size_t>(t * static_cast<double>(kBins)));
    if (!best[b] || samples[i].dist < samples[*best[b]].dist) best[b] = i;
  }
  Vec xs, ys;
  for (const auto& b : best) {
    if (!b) continue;
    xs.push_back(std::log(samples[*b].gap));
    ys.push_back(std::log(samples[*b].dist));
  }
  if (xs.size() < 2) {
    throw EstimationError("fewer than two populated gap bins", est.constant_hat);
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  est.exponent_fit = sxy / sxx;
  return est;
}

std::string_view to_string(KLStatus status) {
  switch (status) {
    case KLStatus::Holds: return "HOLDS";
    case KLStatus::Fails: return "FAILS";
    case KLStatus::Vacuous: return "VACUOUS";
    case KLStatus::Insufficient: return "INSUFFICIENT";
  }
  return "?";
}

KLReport verify_kl_half(const ProblemSpec& problem, std::span<const double> xbar,
                        const SamplingOptions& options) {
  KLReport report;
  report.options = options;
  report.samples = sample_neighborhood(problem, xbar, options);
  if (report.samples.empty()) {
    report.status = KLStatus::Vacuous;
    return report;
  }
  report.constant_hat = min_ratio(report.samples);
  try {
    const auto est = estimate_kl_exponent(report.samples);
    report.exponent_fit = est.exponent_fit;
    report.holds = est.constant_hat >= kMinConstant && est.exponent_fit <= kMaxExponent;
    report.status = report.holds ? KLStatus::Holds : KLStatus::Fails;
  } catch (const EstimationError&) {
    report.status = KLStatus::Insufficient;
  }
  return report;
}

ConstantComparison compare_constant(const ProblemSpec& problem, std::span<const double> xbar,
                                    const SamplingOptions& options) {
  const auto& a = problem.A();
  if (problem.theta() != ThetaKind::Sphere) throw ArgumentError("compare_constant needs theta = sphere");
  Vec d(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    d[i] = a(i, i);
    for (std::size_t j = 0; j < a.dim(); ++j) {
      if (i != j && a(i, j) != 0.0) throw ArgumentError("compare_constant needs a diagonal matrix");
    }
  }
  ConstantComparison cmp;
  cmp.theory = kl_constant_theoretical(d, xbar);
  if (cmp.theory.all_equal()) {
    cmp.skipped = true;
    return cmp;
  }
  const auto samples = sample_neighborhood(problem, xbar, options);
  std::vector<KLSample> kept;
  for (const auto& s : samples) {
    if (same_order_sandwich(d, cmp.theory, s.point)) kept.push_back(s);
  }
  cmp.samples_used = kept.size();
  cmp.constant_hat = min_ratio(kept);
  cmp.dominates = !kept.empty() && cmp.constant_hat >= *cmp.theory.c_theory * (1.0 - 1e-6);
  return cmp;
}

}  // namespace klcert
