#pragma once

// Distance from the origin to the limiting subdifferential of Theta, computed
// exactly for every supported (theta, h) pairing.
//
// With J = supp(x) and g = 2Ax the subdifferential is g + ∂theta(x) + ∂h(x):
//  * zero-norm penalty, or sparsity ball with ||x||_0 = kappa: the off-support
//    coordinates are free, so only the support block g_J + zeta_J counts;
//  * sparsity ball with ||x||_0 < kappa: ∂h is the union over completions
//    Jhat of J (|Jhat| = kappa - |J|) of {v : v_{J ∪ Jhat} = 0}; each Jhat
//    coordinate contributes its best residual under the theta multiplier.
// In the second case only an inclusion of ∂Theta into the sum is known, so the
// value is a lower bound on dist(0, ∂Theta(x)); SubdiffResult flags this.

#include <optional>
#include <span>

#include "klcert/problem.hpp"

namespace klcert {

struct SubdiffResult {
  double distance = 0.0;
  /// Sphere / simplex multiplier attaining the minimum.
  std::optional<double> omega;
  /// Completion set used when the sparsity ball is not tight.
  std::optional<SupportSet> branch;
  /// min over theta multipliers of ||(2Ax + zeta)_J||.
  double reduced_distance = 0.0;
  /// True when `distance` is measured to the sum-rule superset of ∂Theta.
  bool lower_bound = false;
};

bool in_theta_domain(ThetaKind kind, std::span<const double> x);
bool in_domain(const ProblemSpec& problem, std::span<const double> x);

/// Theta(x), or +infinity outside the domain. The zero-norm counts exact nonzeros.
double objective(const ProblemSpec& problem, std::span<const double> x);

/// Throws ArgumentError when x is outside dom Theta.
SubdiffResult subdiff_distance(const ProblemSpec& problem, std::span<const double> x);

/// Residual norm produced by a given multiplier and completion set. Used to
/// certify the witness carried by SubdiffResult.
double witness_distance(const ProblemSpec& problem, std::span<const double> x,
                        std::optional<double> omega, const std::optional<SupportSet>& branch);

bool check_critical(const ProblemSpec& problem, std::span<const double> x, double tol);

struct AssumptionVReport {
  SupportSet support;
  double block_side = 0.0;       // min_{xi in ∂theta(x)} ||2 A_JJ x_J + xi_J||
  double restricted_side = 0.0;  // dist(0, ∂g_|J|(x_J)), g_m(z) = z^T A_JJ z + theta_m(z)
  bool holds = false;            // block_side >= restricted_side - 1e-10
};

/// Requires x in dom theta (h is ignored).
AssumptionVReport assumption_v_check(const ProblemSpec& problem, std::span<const double> x);

}  // namespace klcert
