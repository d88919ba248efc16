#pragma once

// Proximal gradient for Theta: x+ = prox_{t(theta+h)}(x - t * 2Ax).

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "klcert/problem.hpp"

namespace klcert {

/// Keeps u_i when |u_i| > sqrt(2 nu t); entries exactly at the threshold are dropped.
Vec hard_threshold(std::span<const double> u, double t, double nu);

/// argmin_x 0.5||x - u||^2 + t (theta + h)(x). Degenerate inputs (u = 0 for
/// sphere kinds) throw DegenerateInputError.
Vec prox_theta_h(ThetaKind theta, const HKind& h, std::span<const double> u, double t);

struct SolverConfig {
  std::size_t max_iters = 1000;
  std::optional<double> step;  // empty: 1 / (2||A|| + 1e-8)
  double tol = 1e-12;          // stop when ||x_{k+1} - x_k|| <= tol
  std::uint64_t seed = 0;      // drives the initial point when none is given
  std::size_t min_iters = 0;   // never stop on tol before this many iterations
};

struct Iterate {
  std::size_t k = 0;
  Vec x;
  double theta = 0.0;
  SupportSet support;
  double step_norm = 0.0;  // ||x_k - x_{k-1}||, 0 for k = 0
};

struct IterateTrace {
  std::vector<Iterate> iterates;
  std::size_t support_stable_from = 0;  // first k after which supp(x_k) never changes
  double step = 0.0;
};

/// Resolves the configured step; throws ConfigError unless step * 2||A|| < 1.
double resolve_step(const ProblemSpec& problem, const SolverConfig& config);

/// prox of a seeded standard Gaussian vector.
Vec initial_point(const ProblemSpec& problem, std::uint64_t seed);

/// x0 may lie outside dom Theta (recorded with Theta = +infinity); every later
/// iterate is a prox point and hence feasible. Throws ConfigError on a bad config.
IterateTrace proximal_gradient(const ProblemSpec& problem, std::optional<Vec> x0,
                               const SolverConfig& config);

enum class RateStatus { Fitted, GapExhausted };
std::string_view to_string(RateStatus status);

struct RateReport {
  RateStatus status = RateStatus::GapExhausted;
  double slope = 0.0;  // least-squares slope of log(Theta_k - theta*) against k
  double r_squared = 0.0;
  std::size_t tail_length = 0;  // points entering the fit
};

inline constexpr double kGapFloor = 1e-14;
inline constexpr std::size_t kMinRateTail = 20;

/// Fits the values from index `stable_from` on, skipping gaps <= 1e-14 and
/// non-finite values.
/// GapExhausted when fewer than three usable gaps remain; EstimationError when
/// the post-stabilization tail is shorter than 20; ArgumentError when theta_star
/// exceeds the smallest value by more than 1e-12.
RateReport estimate_linear_rate(std::span<const double> values, std::size_t stable_from,
                                double theta_star);
RateReport estimate_linear_rate(const IterateTrace& trace, double theta_star);

}  // namespace klcert
