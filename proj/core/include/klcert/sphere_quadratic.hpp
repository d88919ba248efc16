#pragma once

// Quadratic forms restricted to the unit sphere: z^T H z + indicator(||z|| = 1).

#include <optional>
#include <span>
#include <vector>

#include "klcert/linalg.hpp"

namespace klcert {

/// Critical points spanned by the basis columns in `columns`, all sharing
/// eigenvalue `lambda`. Every unit vector in that span is critical.
struct CriticalFamily {
  double lambda;
  std::vector<std::size_t> columns;
};

struct SphereCriticalSet {
  std::vector<Vec> representatives;  // +-b_k for every basis column b_k
  std::vector<CriticalFamily> families;
  Matrix basis;
};

/// Critical points of x^T diag(d) x on the sphere. Values are grouped when
/// |d_i - d_j| <= 1e-12 * max(1, |d_i|, |d_j|).
SphereCriticalSet crit_points_diag(std::span<const double> d);
SphereCriticalSet crit_points_general(const SymMatrix& h);

/// 2 ||Hz - <z,Hz> z||. Throws ArgumentError unless | ||z|| - 1 | <= 1e-10.
double dist_subdiff_sphere_quad(const SymMatrix& h, std::span<const double> z);
/// Norm of the tangent projection (I - z z^T) 2Hz.
double riemannian_grad_norm(const SymMatrix& h, std::span<const double> z);

struct KLConstantReport {
  double lambda_bar = 0.0;
  SupportSet j1bar;               // off-support j with d_j != lambda_bar
  std::optional<double> c_theory; // empty when all d are equal
  bool all_equal() const noexcept { return !c_theory.has_value(); }
};

/// Requires xbar critical for diag(d) on the sphere (distance <= 1e-9),
/// otherwise ArgumentError.
KLConstantReport kl_constant_theoretical(std::span<const double> d, std::span<const double> xbar);

/// Checks 0.5|d_j - lbar| <= |d_j - <z,Dz>| <= 1.5|d_j - lbar| for all j in j1bar.
bool same_order_sandwich(std::span<const double> d, const KLConstantReport& report,
                         std::span<const double> z);

}  // namespace klcert
