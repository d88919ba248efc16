#include <benchmark/benchmark.h>

#include <random>

#include "klcert/certify.hpp"
#include "klcert/oracle.hpp"
#include "klcert/solver.hpp"
#include "klcert/subdiff.hpp"

namespace {

using namespace klcert;

void BM_SymEig(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const SymMatrix a = random_symmetric(static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(sym_eig(a));
}
BENCHMARK(BM_SymEig)->Arg(4)->Arg(8)->Arg(16)->Arg(64);

void BM_SubdiffDistance(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto p = static_cast<std::size_t>(state.range(0));
  const ProblemSpec prob(random_symmetric(p, rng), ThetaKind::Simplex, SparsityBall{p / 2 + 1});
  const Vec x = random_feasible_point(prob, rng);
  for (auto _ : state) benchmark::DoNotOptimize(subdiff_distance(prob, x));
}
BENCHMARK(BM_SubdiffDistance)->Arg(4)->Arg(16)->Arg(64);

void BM_Prox(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto p = static_cast<std::size_t>(state.range(0));
  std::normal_distribution<double> n;
  Vec u(p);
  for (double& v : u) v = n(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(prox_theta_h(ThetaKind::Sphere, SparsityBall{p / 2 + 1}, u, 0.5));
}
BENCHMARK(BM_Prox)->Arg(8)->Arg(64)->Arg(1024);

void BM_GlobalMinEnum(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto p = static_cast<std::size_t>(state.range(0));
  const ProblemSpec prob(random_symmetric(p, rng), ThetaKind::Sphere, ZeroNorm{0.2});
  for (auto _ : state) benchmark::DoNotOptimize(global_min_enum(prob));
}
BENCHMARK(BM_GlobalMinEnum)->Arg(4)->Arg(8)->Arg(12);

void BM_VerifyKLHalf(benchmark::State& state) {
  const ProblemSpec prob(SymMatrix::diagonal(Vec{2, 1}), ThetaKind::Sphere, SparsityBall{2});
  const Vec xbar{0, 1};
  for (auto _ : state) benchmark::DoNotOptimize(verify_kl_half(prob, xbar));
}
BENCHMARK(BM_VerifyKLHalf);

}  // namespace
BENCHMARK_MAIN();
