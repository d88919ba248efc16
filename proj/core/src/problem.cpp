#include "klcert/problem.hpp"

#include <cmath>
#include <string>

#include "klcert/errors.hpp"

namespace klcert {

std::string_view to_string(ThetaKind kind) {
  switch (kind) {
    case ThetaKind::Zero: return "zero";
    case ThetaKind::Sphere: return "sphere";
    case ThetaKind::Simplex: return "simplex";
    case ThetaKind::NonnegOrthant: return "nonneg";
    case ThetaKind::SphereNonneg: return "sphere_nonneg";
  }
  return "?";
}

ThetaKind theta_from_string(std::string_view name) {
  for (auto k : {ThetaKind::Zero, ThetaKind::Sphere, ThetaKind::Simplex, ThetaKind::NonnegOrthant,
                 ThetaKind::SphereNonneg}) {
    if (to_string(k) == name) return k;
  }
  throw ArgumentError("unknown theta kind '" + std::string(name) +
                      "' (expected zero, sphere, simplex, nonneg or sphere_nonneg)");
}

bool has_multiplier(ThetaKind kind) {
  return kind == ThetaKind::Sphere || kind == ThetaKind::Simplex ||
         kind == ThetaKind::SphereNonneg;
}

bool is_sign_constrained(ThetaKind kind) {
  return kind == ThetaKind::Simplex || kind == ThetaKind::NonnegOrthant ||
         kind == ThetaKind::SphereNonneg;
}

ProblemSpec::ProblemSpec(SymMatrix a, ThetaKind theta, HKind h)
    : a_(std::move(a)), theta_(theta), h_(h) {
  if (a_.dim() == 0) throw ArgumentError("problem matrix must have dimension >= 1");
  if (const auto* z = std::get_if<ZeroNorm>(&h_)) {
    if (!(z->nu > 0.0) || !std::isfinite(z->nu)) {
      throw ArgumentError("zero-norm weight nu must be positive and finite, got " +
                          std::to_string(z->nu));
    }
  } else {
    const auto kappa = std::get<SparsityBall>(h_).kappa;
    if (kappa < 1 || kappa > a_.dim()) {
      throw ArgumentError("sparsity level kappa=" + std::to_string(kappa) + " outside [1, " +
                          std::to_string(a_.dim()) + "]");
    }
  }
}

}  // namespace klcert
