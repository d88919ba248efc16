#pragma once

// Brute-force references for small instances. Everything here is exponential
// in the dimension and guarded by hard size limits (SizeError).

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "klcert/problem.hpp"

namespace klcert {

enum class OracleMethod { SupportEnum, Grid, Breakpoint };
std::string_view to_string(OracleMethod method);

struct OracleReport {
  double value = 0.0;  // -infinity when the objective is unbounded below
  Vec argmin;          // empty when unbounded
  std::size_t supports_examined = 0;
  OracleMethod method = OracleMethod::SupportEnum;
  bool unbounded = false;
  std::optional<double> omega;
  std::optional<SupportSet> branch;
};

inline constexpr std::size_t kMaxGlobalDim = 12;
inline constexpr std::size_t kMaxSubdiffDim = 10;
inline constexpr std::size_t kMaxProxDim = 8;

/// Global minimum of Theta over every support. Restricted problems: bottom
/// eigenvector (sphere), one-signed eigenvectors (sphere ∩ orthant), face-wise
/// KKT solves (simplex); zero / orthant kinds are either 0 at the origin or
/// unbounded. Ties keep the first support in (size, lexicographic) order.
OracleReport global_min_enum(const ProblemSpec& problem);

/// dist(0, ∂Theta(x)) with explicit completion enumeration and a 1e5-point
/// multiplier grid on [-(2||A|| ||x|| + 1), 2||A|| ||x|| + 1] polished by golden
/// section.
OracleReport subdiff_distance_bruteforce(const ProblemSpec& problem, std::span<const double> x,
                                         std::size_t grid_points = 100000);

/// 0.5||x - u||^2 + t (theta + h)(x), +infinity when infeasible.
double prox_objective(ThetaKind theta, const HKind& h, std::span<const double> x,
                      std::span<const double> u, double t);

/// Minimizes prox_objective over every support with the restricted projection.
OracleReport prox_bruteforce(ThetaKind theta, const HKind& h, std::span<const double> u, double t);

struct RatioRow {
  double radius;  // requested step size
  double gap;
  double dist;
  double ratio;  // dist / sqrt(gap)
};

struct RatioScan {
  std::vector<RatioRow> rows;
  std::vector<std::pair<double, double>> min_ratio_by_radius;  // (radius, min ratio)
  bool vacuous = true;
  /// Slope of log(min ratio) against log(radius) exceeds 0.25.
  bool decays = false;
};

/// Samples `per_radius` points at each step size (no level window).
RatioScan kl_ratio_scan(const ProblemSpec& problem, std::span<const double> xbar,
                        std::span<const double> radii, std::size_t per_radius, std::uint64_t seed);
RatioScan analyze_ratio_table(std::vector<RatioRow> rows);

/// Reference value for rate fits: the enumerated global minimum when p <= 10
/// and the smallest trace value matches it to 1e-9 relative, otherwise the
/// smallest trace value.
double rate_reference(const ProblemSpec& problem, std::span<const double> values);

/// |a - b| <= tol * max(1, |b|).
bool relatively_close(double a, double b, double tol);

/// (B + B^T) / 2 with standard normal B.
SymMatrix random_symmetric(std::size_t p, std::mt19937_64& rng);
/// Random point of dom Theta with a random support size.
Vec random_feasible_point(const ProblemSpec& problem, std::mt19937_64& rng);

}  // namespace klcert
