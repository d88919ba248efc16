#pragma once

// The composite objective  Theta(x) = x^T A x + theta(x) + h(x)  where theta is
// the indicator of one of a few permutation-symmetric sets and h is either a
// zero-norm penalty or the indicator of a sparsity ball.

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>

#include "klcert/linalg.hpp"

namespace klcert {

enum class ThetaKind {
  Zero,           // theta = 0
  Sphere,         // indicator of the unit sphere
  Simplex,        // indicator of the probability simplex
  NonnegOrthant,  // indicator of R^p_+
  SphereNonneg,   // indicator of sphere ∩ R^p_+
};

struct ZeroNorm {
  double nu;  // penalty weight, > 0
  friend bool operator==(const ZeroNorm&, const ZeroNorm&) = default;
};

struct SparsityBall {
  std::size_t kappa;  // 1 <= kappa <= p
  friend bool operator==(const SparsityBall&, const SparsityBall&) = default;
};

using HKind = std::variant<ZeroNorm, SparsityBall>;

std::string_view to_string(ThetaKind kind);
/// Accepts the problem-file spellings: zero, sphere, simplex, nonneg, sphere_nonneg.
ThetaKind theta_from_string(std::string_view name);

/// True for theta whose subdifferential carries a scalar multiplier.
bool has_multiplier(ThetaKind kind);
/// True when theta forces x >= 0.
bool is_sign_constrained(ThetaKind kind);

class ProblemSpec {
 public:
  /// Throws ArgumentError on nu <= 0 or kappa outside [1, dim(A)].
  ProblemSpec(SymMatrix a, ThetaKind theta, HKind h);

  const SymMatrix& A() const noexcept { return a_; }
  ThetaKind theta() const noexcept { return theta_; }
  const HKind& h() const noexcept { return h_; }
  std::size_t dim() const noexcept { return a_.dim(); }

  const ZeroNorm* zero_norm() const noexcept { return std::get_if<ZeroNorm>(&h_); }
  const SparsityBall* sparsity() const noexcept { return std::get_if<SparsityBall>(&h_); }

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;

 private:
  SymMatrix a_;
  ThetaKind theta_;
  HKind h_;
};

}  // namespace klcert
