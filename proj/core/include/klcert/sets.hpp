#pragma once

// Projections onto, and cone queries for, the constraint sets of the
// composite objective: unit sphere, probability simplex, nonnegative orthant,
// sparsity ball {x : ||x||_0 <= kappa} and their intersections.
//
// All magnitude ties resolve to the smaller index. Equality constraints
// (||x|| = 1, sum x = 1) are checked to kFeasTol; sign constraints are exact.

#include <optional>
#include <span>

#include "klcert/linalg.hpp"

namespace klcert {

inline constexpr double kFeasTol = 1e-10;

bool on_sphere(std::span<const double> x);
bool in_simplex(std::span<const double> x);
bool is_nonneg(std::span<const double> x);

/// Answer to a normal-cone membership query.
struct ConeQueryResult {
  bool contained = false;
  /// Membership in the regular (Frechet) normal cone.
  bool regular_contained = false;
  /// Multiplier for sphere / simplex cones.
  std::optional<double> omega;
  /// Completion index set for the sparsity-ball limiting cone.
  std::optional<SupportSet> branch;
};

Vec project_sparsity(std::span<const double> u, std::size_t kappa);
/// Throws DegenerateInputError for u = 0.
Vec project_sphere(std::span<const double> u);
/// Sort-and-threshold projection onto {x >= 0, sum x = 1}.
Vec project_simplex(std::span<const double> u);
Vec project_nonneg(std::span<const double> u);
/// Keep the kappa largest magnitudes and normalize. Throws
/// DegenerateInputError when the kept block is zero.
Vec project_sparse_sphere(std::span<const double> u, std::size_t kappa);
/// Keep the kappa largest (signed) entries and project them onto the simplex.
Vec project_sparse_simplex(std::span<const double> u, std::size_t kappa);
/// Projection onto sphere ∩ orthant ∩ sparsity ball. When u has no positive
/// entry the answer is e_i at the largest u_i; u = 0 is degenerate.
Vec project_sparse_sphere_nonneg(std::span<const double> u, std::size_t kappa);

/// Limiting normal cone of the sparsity ball at xbar (xbar must lie in it).
/// At full sparsity the cone is {v : v_J = 0}; below it, v must also vanish
/// on some completion Jhat of J to size kappa. Zero tests use kFeasTol.
ConeQueryResult normal_cone_sparsity_contains(std::span<const double> xbar, std::size_t kappa,
                                              std::span<const double> v);

/// dist(v, N_simplex(xbar)), minimized exactly over the multiplier.
double normal_cone_simplex_residual(std::span<const double> xbar, std::span<const double> v);
/// Same as above with the minimizing multiplier as witness.
ConeQueryResult normal_cone_simplex_query(std::span<const double> xbar,
                                          std::span<const double> v);
ConeQueryResult normal_cone_sphere_query(std::span<const double> xbar,
                                         std::span<const double> v);

bool tangent_simplex_contains(std::span<const double> xbar, std::span<const double> d);

}  // namespace klcert
