// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
// argv[1] is the path to the klcert executable (criterion 9).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "klcert/certify.hpp"
#include "klcert/errors.hpp"
#include "klcert/oracle.hpp"
#include "klcert/sets.hpp"
#include "klcert/solver.hpp"
#include "klcert/sphere_quadratic.hpp"
#include "klcert/subdiff.hpp"
#include "test_support.hpp"

using namespace klcert;
using klcert::testing::gaussian;
using klcert::testing::subsets;
using klcert::testing::unit;

namespace {

// Tolerances and budgets, one per criterion.
constexpr double kC1RelTol = 1e-7;
constexpr double kC1Seconds = 60;
constexpr double kC2GridTol = 1e-7;
constexpr double kC2RiemTol = 1e-10;
constexpr double kC2Seconds = 5;
constexpr double kC3ResidualTol = 1e-9;
constexpr double kC3MinDistance = 1e-6;
constexpr double kC3Seconds = 10;
constexpr double kC4Seconds = 5;
constexpr double kC5Seconds = 120;
constexpr double kC6Tol = 1e-9;
constexpr double kC6Seconds = 60;
constexpr double kC7MinR2 = 0.99;
constexpr int kC7MinPassing = 45;
constexpr double kC7Seconds = 120;
constexpr double kC8Tol = 1e-6;
constexpr double kC8Seconds = 30;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const std::vector<ThetaKind> kAllTheta = {ThetaKind::Zero, ThetaKind::Sphere, ThetaKind::Simplex,
                                          ThetaKind::NonnegOrthant, ThetaKind::SphereNonneg};

HKind random_h(bool zero_norm, std::size_t p, std::mt19937_64& rng) {
  if (zero_norm) return ZeroNorm{std::uniform_real_distribution<double>(0.1, 1.0)(rng)};
  return SparsityBall{std::uniform_int_distribution<std::size_t>(1, p)(rng)};
}

SymMatrix psd(std::size_t p, std::mt19937_64& rng) {
  Matrix b(p, p);
  std::normal_distribution<double> n;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) b(i, j) = n(rng);
  Matrix g = b.transpose() * b;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) g(i, j) /= static_cast<double>(p);
  return SymMatrix::from_dense(g);
}

Vec random_unit(std::size_t p, std::mt19937_64& rng) {
  Vec z = gaussian(p, rng);
  const double n = norm2(z);
  for (double& v : z) v /= n;
  return z;
}

// Uniform grid then golden-section polish of a convex function of one variable.
double grid_golden_min(const std::function<double(double)>& f, double lo, double hi,
                       std::size_t grid) {
  double best_x = lo, best = f(lo);
  const double h = (hi - lo) / static_cast<double>(grid - 1);
  for (std::size_t k = 1; k < grid; ++k) {
    const double x = lo + h * static_cast<double>(k);
    const double v = f(x);
    if (v < best) best = v, best_x = x;
  }
  double a = std::max(lo, best_x - h), b = std::min(hi, best_x + h);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    if (f(c) < f(d)) b = d;
    else a = c;
  }
  return std::min(best, f(0.5 * (a + b)));
}

Outcome criterion1() {
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  std::size_t failures = 0, total = 0;
  for (ThetaKind theta : kAllTheta) {
    for (bool zn : {true, false}) {
      for (int trial = 0; trial < 200; ++trial) {
        const std::size_t p = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        const ProblemSpec prob(random_symmetric(p, rng), theta, random_h(zn, p, rng));
        const Vec x = random_feasible_point(prob, rng);
        const double got = subdiff_distance(prob, x).distance;
        const double want = subdiff_distance_bruteforce(prob, x).value;
        const double err = std::abs(got - want) / std::max(1.0, std::abs(want));
        worst = std::max(worst, err);
        if (err > kC1RelTol) ++failures;
        ++total;
      }
    }
  }
  return {failures == 0, std::to_string(total) + " instances, " + std::to_string(failures) +
                             " disagreements, max relative error " + fmt("%.2e", worst)};
}

Outcome criterion2() {
  std::mt19937_64 rng(1002);
  double worst_grid = 0.0, worst_riem = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    const SymMatrix h = random_symmetric(p, rng);
    const Vec z = random_unit(p, rng);
    const Vec g = h.apply(z);
    auto residual = [&](double omega) {
      double s = 0.0;
      for (std::size_t i = 0; i < p; ++i) s += (2.0 * g[i] + omega * z[i]) * (2.0 * g[i] + omega * z[i]);
      return std::sqrt(s);
    };
    const double bound = 2.0 * spectral_norm(h) + 1.0;
    const double oracle = grid_golden_min(residual, -bound, bound, 20001);
    const double closed = dist_subdiff_sphere_quad(h, z);
    worst_grid = std::max(worst_grid, std::abs(closed - oracle) / std::max(1.0, oracle));
    worst_riem = std::max(worst_riem, std::abs(closed - riemannian_grad_norm(h, z)));
  }
  return {worst_grid <= kC2GridTol && worst_riem <= kC2RiemTol,
          "100 (H, z) pairs, max grid error " + fmt("%.2e", worst_grid) +
              ", max Riemannian-gradient error " + fmt("%.2e", worst_riem)};
}

Outcome criterion3() {
  std::mt19937_64 rng(1003);
  double worst_residual = 0.0, closest = INFINITY;
  std::size_t reps = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t p = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const SymMatrix h = random_symmetric(p, rng);
    const auto set = crit_points_general(h);
    for (const Vec& z : set.representatives) {
      const Vec hz = h.apply(z);
      const double q = dot(z, hz);
      double s = 0.0;
      for (std::size_t i = 0; i < p; ++i) s += (hz[i] - q * z[i]) * (hz[i] - q * z[i]);
      worst_residual = std::max(worst_residual, std::sqrt(s));
      ++reps;
    }
    if (p < 2) continue;
    for (int k = 0; k < 100; ++k) closest = std::min(closest, dist_subdiff_sphere_quad(h, random_unit(p, rng)));
  }
  return {worst_residual <= kC3ResidualTol && closest > kC3MinDistance,
          std::to_string(reps) + " critical representatives, max residual " +
              fmt("%.2e", worst_residual) + "; smallest distance over random unit vectors " +
              fmt("%.2e", closest)};
}

Outcome criterion4() {
  const ProblemSpec prob(SymMatrix::diagonal(Vec{2, 1}), ThetaKind::Sphere, SparsityBall{2});
  const Vec xbar{0, 1};
  const auto rep = verify_kl_half(prob, xbar);
  const auto cmp = compare_constant(prob, xbar);
  const double alpha = rep.exponent_fit.value_or(NAN);
  const bool ok = rep.holds && rep.constant_hat >= 1.8 && rep.constant_hat <= 2.0 + 1e-6 &&
                  alpha >= 0.45 && alpha <= 0.55 && !cmp.skipped && cmp.dominates &&
                  cmp.theory.c_theory && std::abs(*cmp.theory.c_theory - 1.0) < 1e-12;
  return {ok, std::string("status ") + std::string(to_string(rep.status)) + ", c_hat " +
                  fmt("%.6f", rep.constant_hat) + ", alpha_hat " + fmt("%.4f", alpha) +
                  ", c_theory " + fmt("%.3g", cmp.theory.c_theory.value_or(NAN)) + ", dominates " +
                  (cmp.dominates ? "yes" : "no")};
}

Outcome criterion5() {
  std::mt19937_64 rng(1005);
  std::size_t holds = 0, vacuous = 0, failed = 0;
  std::string first_failure;
  for (ThetaKind theta : {ThetaKind::Sphere, ThetaKind::Simplex, ThetaKind::NonnegOrthant}) {
    for (bool zn : {true, false}) {
      for (int trial = 0; trial < 20; ++trial) {
        const std::size_t p = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
        const SymMatrix a = theta == ThetaKind::NonnegOrthant ? psd(p, rng) : random_symmetric(p, rng);
        const ProblemSpec prob(a, theta, random_h(zn, p, rng));
        const auto best = global_min_enum(prob);
        SamplingOptions opt;
        opt.seed = static_cast<std::uint64_t>(trial);
        const auto rep = verify_kl_half(prob, best.argmin, opt);
        if (rep.status == KLStatus::Vacuous) {
          ++vacuous;
        } else if (rep.holds) {
          ++holds;
        } else {
          ++failed;
          if (first_failure.empty())
            first_failure = "; first failure " + std::string(to_string(theta)) + " trial " +
                            std::to_string(trial) + " status " + std::string(to_string(rep.status));
        }
      }
    }
  }
  return {failed == 0, std::to_string(holds) + " hold, " + std::to_string(vacuous) + " vacuous, " +
                           std::to_string(failed) + " fail" + first_failure};
}

Outcome criterion6() {
  std::mt19937_64 rng(1006);
  double worst = 0.0;
  std::size_t total = 0;
  for (ThetaKind theta : kAllTheta) {
    for (bool zn : {true, false}) {
      for (int trial = 0; trial < 200; ++trial) {
        const std::size_t p = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
        const HKind h = random_h(zn, p, rng);
        const Vec u = gaussian(p, rng);
        const double t = std::uniform_real_distribution<double>(0.05, 2.0)(rng);
        const Vec x = prox_theta_h(theta, h, u, t);
        const double got = prox_objective(theta, h, x, u, t);
        const double want = prox_bruteforce(theta, h, u, t).value;
        worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
        ++total;
      }
    }
  }
  return {worst <= kC6Tol,
          std::to_string(total) + " instances, max objective difference " + fmt("%.2e", worst)};
}

// kappa >= 2: with kappa = 1 every prox point is +-e_i and the gap hits 0 in one step.
ProblemSpec sparse_pca_instance(std::mt19937_64& rng) {
  const std::size_t p = std::uniform_int_distribution<std::size_t>(3, 8)(rng);
  const std::size_t kappa = std::uniform_int_distribution<std::size_t>(2, p - 1)(rng);
  const std::size_t n = 2 * p;
  Matrix cov(p, p);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec r = gaussian(p, rng);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) cov(i, j) -= r[i] * r[j] / static_cast<double>(n);
  }
  return ProblemSpec(SymMatrix::from_dense(cov), ThetaKind::Sphere, SparsityBall{kappa});
}

// Smallest relative gap between the two lowest eigenvalues on the final support.
double restricted_eigen_gap(const ProblemSpec& prob, const SupportSet& j) {
  if (j.size() < 2) return INFINITY;
  const auto eig = sym_eig(prob.A().principal(j));
  const std::size_t m = eig.eigenvalues.size();
  const double scale = std::max(1.0, std::abs(eig.eigenvalues[m - 1]));
  return (eig.eigenvalues[m - 2] - eig.eigenvalues[m - 1]) / scale;
}

Outcome criterion7() {
  std::mt19937_64 rng(1007);
  int passing = 0, ties = 0;
  std::ostringstream notes;
  for (int trial = 0; trial < 50; ++trial) {
    const ProblemSpec prob = sparse_pca_instance(rng);
    SolverConfig cfg;
    cfg.max_iters = 20000;
    cfg.min_iters = 60;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto trace = proximal_gradient(prob, std::nullopt, cfg);
    Vec values;
    for (const auto& it : trace.iterates) values.push_back(it.theta);
    const double ref = rate_reference(prob, values);
    std::string why;
    bool ok = false;
    try {
      const auto r = estimate_linear_rate(trace, ref);
      if (r.status == RateStatus::Fitted) {
        ok = r.r_squared >= kC7MinR2;
        if (!ok) why = "R^2 " + fmt("%.4f", r.r_squared);
      } else {
        why = "gap exhausted";
      }
    } catch (const EstimationError& e) {
      why = e.what();
    }
    if (ok) {
      ++passing;
      continue;
    }
    const bool tie = restricted_eigen_gap(prob, trace.iterates.back().support) < 1e-6;
    if (tie) ++ties;
    const std::string path = "acceptance_rate_trace_" + std::to_string(trial) + ".csv";
    std::ofstream f(path);
    f << "k,theta\n";
    for (const auto& it : trace.iterates) f << it.k << ',' << fmt("%.17g", it.theta) << '\n';
    notes << "\n  instance " << trial << " (p=" << prob.dim() << ", kappa="
          << prob.sparsity()->kappa << "): " << why << (tie ? " [eigenvalue tie]" : "")
          << ", trace in " << path;
  }
  return {passing >= kC7MinPassing, std::to_string(passing) + "/50 instances with R^2 >= 0.99, " +
                                        std::to_string(ties) + " eigenvalue-tie failures" +
                                        notes.str()};
}

bool gamma_oracle(const Vec& xbar, std::size_t kappa, const Vec& v) {
  const std::size_t p = xbar.size();
  for (const auto& jhat : subsets(p, kappa, kappa)) {
    bool covers = true, vanishes = true;
    for (std::size_t i = 0; i < p; ++i) {
      const bool in = std::find(jhat.begin(), jhat.end(), i) != jhat.end();
      if (xbar[i] != 0.0 && !in) covers = false;
      if (in && v[i] != 0.0) vanishes = false;
    }
    if (covers && vanishes) return true;
  }
  return false;
}

// dist(v, N(xbar)) for the 2-simplex by zooming grids over (omega, s), with
// xi = (omega - s_0, omega - s_1) and s_i = 0 on the support.
double simplex_cone_grid(const Vec& xbar, const Vec& v) {
  const bool free0 = xbar[0] == 0.0, free1 = xbar[1] == 0.0;
  auto f = [&](double omega, double s) {
    const double s0 = free0 ? s : 0.0, s1 = free1 ? s : 0.0;
    return std::hypot(v[0] - (omega - s0), v[1] - (omega - s1));
  };
  double co = 0.0, cs = 0.0, half = 10.0;
  double best = f(co, cs);
  for (int round = 0; round < 12; ++round) {
    double bo = co, bs = cs;
    for (int i = -50; i <= 50; ++i)
      for (int j = -50; j <= 50; ++j) {
        const double o = co + half * i / 50.0, s = std::max(0.0, cs + half * j / 50.0);
        const double val = f(o, s);
        if (val < best) best = val, bo = o, bs = s;
      }
    co = bo, cs = bs, half /= 10.0;
  }
  return best;
}

Outcome criterion8() {
  std::size_t checked = 0, mismatches = 0;
  const double levels[] = {-1.0, 0.0, 1.5};
  for (std::size_t p = 1; p <= 5; ++p) {
    std::size_t count = 1;
    for (std::size_t i = 0; i < p; ++i) count *= 3;
    auto decode = [&](std::size_t code) {
      Vec x(p);
      for (std::size_t i = 0; i < p; ++i, code /= 3) x[i] = levels[code % 3];
      return x;
    };
    for (std::size_t kappa = 1; kappa <= std::min<std::size_t>(3, p); ++kappa) {
      for (std::size_t a = 0; a < count; ++a) {
        const Vec xbar = decode(a);
        if (zero_norm(xbar) > kappa) continue;
        for (std::size_t b = 0; b < count; ++b) {
          const Vec v = decode(b);
          if (normal_cone_sparsity_contains(xbar, kappa, v).contained != gamma_oracle(xbar, kappa, v))
            ++mismatches;
          ++checked;
        }
      }
    }
  }
  std::mt19937_64 rng(1008);
  double worst = 0.0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    Vec xbar;
    switch (trial % 3) {
      case 0: xbar = unit(2, 0); break;
      case 1: xbar = unit(2, 1); break;
      default: {
        const double a = unif(rng);
        xbar = {a, 1.0 - a};
      }
    }
    Vec v = gaussian(2, rng);
    const double got = normal_cone_simplex_residual(xbar, v);
    worst = std::max(worst, std::abs(got - simplex_cone_grid(xbar, v)));
  }
  return {mismatches == 0 && worst <= kC8Tol,
          std::to_string(checked) + " sparsity-cone queries, " + std::to_string(mismatches) +
              " mismatches; simplex residual max error " + fmt("%.2e", worst)};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion9(const std::string& exe) {
  if (exe.empty()) return {false, "no klcert executable given"};
  const auto dir = std::filesystem::temp_directory_path() / "klcert_acceptance_determinism";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto problem = dir / "pca.json";
  std::ofstream(problem) << R"({"A": [[-2.0, 0.3, 0.1], [0.3, -1.5, 0.2], [0.1, 0.2, -1.0]],
 "theta": "sphere", "h": {"kind": "sparsity", "kappa": 2}})";
  const auto circle = dir / "circle.json";
  std::ofstream(circle) << R"({"A": [[2, 0], [0, 1]], "theta": "sphere",
 "h": {"kind": "sparsity", "kappa": 2}, "xbar": [0, 1]})";

  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + exe + "\" " + args + " > /dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  bool ok = true;
  std::string outputs[2][2];
  for (int r = 0; r < 2; ++r) {
    const auto trace = dir / ("trace" + std::to_string(r) + ".csv");
    const auto samples = dir / ("samples" + std::to_string(r) + ".csv");
    ok &= run("solve \"" + problem.string() + "\" --seed 7 --trace-out \"" + trace.string() + "\"");
    ok &= run("certify \"" + circle.string() + "\" --seed 11 --n 300 --samples-out \"" +
              samples.string() + "\"");
    outputs[r][0] = slurp(trace);
    outputs[r][1] = slurp(samples);
  }
  std::filesystem::remove_all(dir);
  const bool same = ok && !outputs[0][0].empty() && !outputs[0][1].empty() &&
                    outputs[0][0] == outputs[1][0] && outputs[0][1] == outputs[1][1];
  return {same, std::string(ok ? "" : "command failed; ") + "trace CSV " +
                    (outputs[0][0] == outputs[1][0] ? "identical" : "differs") + " (" +
                    std::to_string(outputs[0][0].size()) + " bytes), samples CSV " +
                    (outputs[0][1] == outputs[1][1] ? "identical" : "differs") + " (" +
                    std::to_string(outputs[0][1].size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string exe = argc > 1 ? argv[1] : "";
  struct Criterion {
    const char* name;
    double budget;  // seconds, 0 = none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"subdifferential distance vs brute force", kC1Seconds, criterion1},
      {"sphere quadratic closed form", kC2Seconds, criterion2},
      {"sphere critical set", kC3Seconds, criterion3},
      {"KL exponent 1/2 on diag(2,1)", kC4Seconds, criterion4},
      {"KL exponent 1/2 at global minimizers", kC5Seconds, criterion5},
      {"prox exactness", kC6Seconds, criterion6},
      {"linear rate on sparse PCA", kC7Seconds, criterion7},
      {"normal cone formulas", kC8Seconds, criterion8},
      {"CLI determinism", 0.0, [&] { return criterion9(exe); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget == 0.0 || secs < c.budget;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %zu (%s): %s [%.2f s%s]\n", pass ? "PASS" : "FAIL", i + 1, c.name,
                out.detail.c_str(), secs,
                in_time ? "" : (", budget " + fmt("%.0f", c.budget) + " s exceeded").c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
