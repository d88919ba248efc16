#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "klcert/errors.hpp"
#include "klcert/oracle.hpp"
#include "klcert/sets.hpp"
#include "klcert/subdiff.hpp"
#include "test_support.hpp"

using namespace klcert;
using klcert::testing::gaussian;
using klcert::testing::unit;

TEST(GlobalMin, Examples) {
  const ProblemSpec a(SymMatrix::scaled_identity(3, 1.0), ThetaKind::Sphere, ZeroNorm{0.1});
  const auto ra = global_min_enum(a);
  EXPECT_NEAR(ra.value, 1.1, 1e-15);
  EXPECT_EQ(ra.argmin, unit(3, 0));
  EXPECT_EQ(ra.supports_examined, 7u);

  const ProblemSpec b(SymMatrix::diagonal(Vec{-3, -1}), ThetaKind::Sphere, SparsityBall{1});
  const auto rb = global_min_enum(b);
  EXPECT_NEAR(rb.value, -3.0, 1e-15);
  EXPECT_NEAR(std::abs(rb.argmin[0]), 1.0, 1e-15);

  const ProblemSpec c(SymMatrix::diagonal(Vec{1, 2}), ThetaKind::Simplex, SparsityBall{2});
  const auto rc = global_min_enum(c);
  EXPECT_NEAR(rc.value, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(rc.argmin[0], 2.0 / 3.0, 1e-12);

  const ProblemSpec d(SymMatrix::diagonal(Vec{1, -1}), ThetaKind::Zero, ZeroNorm{0.1});
  EXPECT_TRUE(global_min_enum(d).unbounded);
  const ProblemSpec e(SymMatrix::diagonal(Vec{1, 2}), ThetaKind::NonnegOrthant, ZeroNorm{0.1});
  const auto re = global_min_enum(e);
  EXPECT_FALSE(re.unbounded);
  EXPECT_EQ(re.value, 0.0);
}

TEST(GlobalMin, SizeGuard) {
  const ProblemSpec big(SymMatrix::scaled_identity(13, 1.0), ThetaKind::Sphere, ZeroNorm{0.1});
  EXPECT_THROW(global_min_enum(big), SizeError);
  const ProblemSpec sub(SymMatrix::scaled_identity(11, 1.0), ThetaKind::Sphere, ZeroNorm{0.1});
  EXPECT_THROW(subdiff_distance_bruteforce(sub, unit(11, 0)), SizeError);
  EXPECT_THROW(prox_bruteforce(ThetaKind::Sphere, ZeroNorm{0.1}, Vec(9, 1.0), 1.0), SizeError);
}

TEST(GlobalMin, ArgminReevaluatesAndIsCritical) {
  std::mt19937_64 rng(137);
  for (ThetaKind theta : {ThetaKind::Sphere, ThetaKind::Simplex, ThetaKind::SphereNonneg}) {
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t p = 2 + trial % 6;
      const HKind h = trial % 2 ? HKind{ZeroNorm{0.2}} : HKind{SparsityBall{1 + trial % p}};
      const ProblemSpec prob(random_symmetric(p, rng), theta, h);
      const auto r = global_min_enum(prob);
      ASSERT_FALSE(r.unbounded);
      EXPECT_NEAR(objective(prob, r.argmin), r.value, 1e-12);
      EXPECT_TRUE(check_critical(prob, r.argmin, 1e-8)) << to_string(theta);
      for (int s = 0; s < 200; ++s) {
        EXPECT_GE(objective(prob, random_feasible_point(prob, rng)), r.value - 1e-12);
      }
    }
  }
}

TEST(GlobalMin, PermutationInvariant) {
  std::mt19937_64 rng(139);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t p = 3 + trial % 4;
    const SymMatrix a = random_symmetric(p, rng);
    std::vector<std::size_t> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const ProblemSpec x(a, ThetaKind::Simplex, SparsityBall{2});
    const ProblemSpec y(a.permuted(perm), ThetaKind::Simplex, SparsityBall{2});
    EXPECT_NEAR(global_min_enum(x).value, global_min_enum(y).value, 1e-12);
  }
}

TEST(SubdiffBruteforce, Examples) {
  const ProblemSpec circle(SymMatrix::diagonal(Vec{2, 1}), ThetaKind::Sphere, SparsityBall{2});
  const double t = 0.3;
  const Vec z{std::sin(t), std::cos(t)};
  const auto r = subdiff_distance_bruteforce(circle, z);
  EXPECT_NEAR(r.value, 2.0 * std::sin(t) * std::cos(t), 1e-9);
  EXPECT_EQ(r.method, OracleMethod::Grid);

  const ProblemSpec zero(SymMatrix::diagonal(Vec{1, 1}), ThetaKind::Zero, ZeroNorm{0.5});
  EXPECT_NEAR(subdiff_distance_bruteforce(zero, Vec{1, 0}).value, 2.0, 1e-12);
}

TEST(SubdiffBruteforce, AgreesWithClosedForm) {
  std::mt19937_64 rng(149);
  for (ThetaKind theta : {ThetaKind::Zero, ThetaKind::Sphere, ThetaKind::Simplex,
                          ThetaKind::NonnegOrthant, ThetaKind::SphereNonneg}) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t p = 2 + trial % 4;
      const HKind h = trial % 2 ? HKind{ZeroNorm{0.3}} : HKind{SparsityBall{1 + trial % p}};
      const ProblemSpec prob(random_symmetric(p, rng), theta, h);
      const Vec x = random_feasible_point(prob, rng);
      const double got = subdiff_distance(prob, x).distance;
      const double want = subdiff_distance_bruteforce(prob, x, 20001).value;
      EXPECT_TRUE(relatively_close(got, want, 1e-6)) << to_string(theta) << " " << got << " vs " << want;
    }
  }
}

TEST(SimplexGridCrossCheck, SmallDimensions) {
  std::mt19937_64 rng(151);
  for (std::size_t m = 2; m <= 3; ++m) {
    for (int trial = 0; trial < 10; ++trial) {
      const ProblemSpec prob(random_symmetric(m, rng), ThetaKind::Simplex, SparsityBall{m});
      const double oracle = global_min_enum(prob).value;
      const std::size_t n = m == 2 ? 100000 : 1000;
      double best = INFINITY;
      for (std::size_t i = 0; i <= n; ++i) {
        if (m == 2) {
          const double a = static_cast<double>(i) / n;
          best = std::min(best, objective(prob, Vec{a, 1 - a}));
          continue;
        }
        for (std::size_t j = 0; i + j <= n; ++j) {
          const double a = static_cast<double>(i) / n, b = static_cast<double>(j) / n;
          best = std::min(best, objective(prob, Vec{a, b, std::max(0.0, 1 - a - b)}));
        }
      }
      EXPECT_LE(oracle, best + 1e-12);
      EXPECT_NEAR(oracle, best, m == 2 ? 1e-8 : 1e-4);
    }
  }
}

TEST(ProxBruteforce, ZeroNormExample) {
  const auto r = prox_bruteforce(ThetaKind::Zero, ZeroNorm{0.5}, Vec{2, 0.5}, 1.0);
  EXPECT_EQ(r.argmin, (Vec{2, 0}));
  EXPECT_NEAR(r.value, 0.125 + 0.5, 1e-15);
}

TEST(RatioScan, CircleConvergesToTwo) {
  const ProblemSpec circle(SymMatrix::diagonal(Vec{2, 1}), ThetaKind::Sphere, SparsityBall{2});
  const Vec radii{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  const auto scan = kl_ratio_scan(circle, Vec{0, 1}, radii, 20, 3);
  EXPECT_FALSE(scan.vacuous);
  EXPECT_FALSE(scan.decays);
  ASSERT_EQ(scan.min_ratio_by_radius.size(), radii.size());
  EXPECT_EQ(scan.min_ratio_by_radius.front().first, 1e-5);
  EXPECT_NEAR(scan.min_ratio_by_radius.front().second, 2.0, 1e-6);
  EXPECT_NEAR(scan.min_ratio_by_radius.back().second, 2.0 * std::cos(0.1), 1e-3);
}

TEST(RatioScan, DetectsDecayAndVacuity) {
  std::vector<RatioRow> rows;
  for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double gap = r * r;
    const double dist = std::pow(gap, 0.75);
    rows.push_back({r, gap, dist, dist / std::sqrt(gap)});
  }
  EXPECT_TRUE(analyze_ratio_table(rows).decays);
  const ProblemSpec flat(SymMatrix::scaled_identity(3, 2.0), ThetaKind::Sphere, SparsityBall{3});
  EXPECT_TRUE(kl_ratio_scan(flat, unit(3, 0), Vec{1e-2, 1e-3}, 10, 1).vacuous);
}

TEST(RateReference, PrefersEnumeratedMinimum) {
  const ProblemSpec prob(SymMatrix::diagonal(Vec{-3, -1}), ThetaKind::Sphere, SparsityBall{1});
  EXPECT_EQ(rate_reference(prob, Vec{0.0, -2.0, -3.0 + 1e-12}), -3.0);
  EXPECT_EQ(rate_reference(prob, Vec{0.0, -1.0}), -1.0);
}
