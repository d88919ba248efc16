#pragma once

// Exact minimizer of the convex piecewise quadratic
//   F(w) = sum_i (a_i + s_i w)^2 + sum_j max(0, -(b_j + w))^2
// which is the shape every multiplier search in this library reduces to.
// Breakpoints sit at w = -b_j; on each segment F is a plain quadratic, so the
// clamped stationary point of every segment is a candidate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace klcert::detail {

struct LinearTerm {
  double offset;
  double slope;
};

struct HingeMin {
  double value;
  double omega;
};

inline double hinge_objective(std::span<const LinearTerm> full, std::span<const double> hinges,
                              double w) {
  double f = 0.0;
  for (const auto& t : full) {
    const double r = t.offset + t.slope * w;
    f += r * r;
  }
  for (double b : hinges) {
    const double r = std::max(0.0, -(b + w));
    f += r * r;
  }
  return f;
}

inline HingeMin minimize_hinge_quadratic(std::span<const LinearTerm> full,
                                         std::span<const double> hinges) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> offs(hinges.begin(), hinges.end());
  // Ascending breakpoints -b_j  <=>  descending offsets b_j.
  std::sort(offs.begin(), offs.end(), std::greater<>());
  const std::size_t n = offs.size();

  double alpha_full = 0.0;
  double beta_full = 0.0;
  for (const auto& t : full) {
    alpha_full += t.slope * t.slope;
    beta_full += t.offset * t.slope;
  }
  // Suffix sums of offsets over the hinges still active on segment k.
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] + offs[j];

  HingeMin best{inf, 0.0};
  for (std::size_t k = 0; k <= n; ++k) {
    const double lo = k == 0 ? -inf : -offs[k - 1];
    const double hi = k == n ? inf : -offs[k];
    const double alpha = alpha_full + static_cast<double>(n - k);
    const double beta = beta_full + suffix[k];
    double w;
    if (alpha > 0.0) {
      w = std::clamp(-beta / alpha, lo, hi);
    } else if (std::isfinite(lo)) {
      w = lo;
    } else if (std::isfinite(hi)) {
      w = hi;
    } else {
      w = 0.0;
    }
    const double f = hinge_objective(full, hinges, w);
    if (f < best.value) best = {f, w};
  }
  return best;
}

}  // namespace klcert::detail
