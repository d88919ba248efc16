#pragma once

// Empirical check of the KL inequality with exponent 1/2,
//   dist(0, ∂Theta(x)) >= c * sqrt(Theta(x) - Theta(xbar)),
// on points sampled in B(xbar, delta) ∩ [Theta(xbar) < Theta < Theta(xbar) + eta].
// Sampling evidence is reported as EMPIRICAL; it is not a proof.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "klcert/problem.hpp"
#include "klcert/sphere_quadratic.hpp"

namespace klcert {

struct KLSample {
  Vec point;
  double gap = 0.0;
  double dist = 0.0;
  double radius = 0.0;
  bool same_support = true;
};

struct SamplingOptions {
  double delta = 1e-2;
  double eta = 1e-2;
  std::size_t n = 500;
  std::uint64_t seed = 0;
};

/// Fewer samples than this and no exponent is fitted.
inline constexpr std::size_t kMinFitSamples = 30;

/// Perturbs xbar once per entry of `step_sizes`. Even entries keep the support,
/// odd entries grow it when the sparsity ball has room (otherwise they keep it
/// too). Points are kept when they stay in the domain, contain supp(xbar) and
/// satisfy 0 < gap < eta. Throws ArgumentError unless xbar is critical to 1e-8.
std::vector<KLSample> sample_at_radii(const ProblemSpec& problem, std::span<const double> xbar,
                                      std::span<const double> step_sizes, double eta,
                                      std::uint64_t seed);

/// n candidates at step sizes log-spaced in [delta * 1e-6, delta].
std::vector<KLSample> sample_neighborhood(const ProblemSpec& problem, std::span<const double> xbar,
                                          const SamplingOptions& options);

struct KLEstimate {
  double exponent_fit = 0.0;
  double constant_hat = 0.0;
  std::size_t n_samples = 0;
  double delta = 0.0;  // largest sample radius
  double eta = 0.0;    // largest sample gap
};

/// min over samples of dist / sqrt(gap); +infinity for an empty list.
double min_ratio(std::span<const KLSample> samples);

/// Lower-envelope fit of log dist against log gap over 20 log-spaced gap bins.
/// Throws EstimationError (carrying the min ratio) with fewer than 30 samples or
/// fewer than two populated bins.
KLEstimate estimate_kl_exponent(std::span<const KLSample> samples);

enum class KLStatus { Holds, Fails, Vacuous, Insufficient };
std::string_view to_string(KLStatus status);

struct KLReport {
  KLStatus status = KLStatus::Vacuous;
  bool holds = false;
  double constant_hat = 0.0;
  std::optional<double> exponent_fit;
  SamplingOptions options;
  std::vector<KLSample> samples;
};

inline constexpr double kMinConstant = 1e-6;
inline constexpr double kMaxExponent = 0.6;

/// holds = constant_hat >= 1e-6 and exponent_fit <= 0.6.
KLReport verify_kl_half(const ProblemSpec& problem, std::span<const double> xbar,
                        const SamplingOptions& options = {});

struct ConstantComparison {
  KLConstantReport theory;
  bool skipped = false;          // all diagonal entries equal
  std::size_t samples_used = 0;  // samples passing the same-order sandwich
  double constant_hat = 0.0;     // min ratio over those samples
  bool dominates = false;        // constant_hat >= c_theory * (1 - 1e-6)
};

/// Requires a diagonal A and theta = Sphere; ArgumentError otherwise.
ConstantComparison compare_constant(const ProblemSpec& problem, std::span<const double> xbar,
                                    const SamplingOptions& options = {});

}  // namespace klcert
