#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "klcert/certify.hpp"
#include "klcert/errors.hpp"
#include "klcert/oracle.hpp"
#include "klcert/solver.hpp"
#include "klcert/sphere_quadratic.hpp"
#include "klcert/subdiff.hpp"
#include "problem_file.hpp"

namespace klcert::cli {

namespace {

constexpr double kCertifyCritTol = 1e-8;
constexpr double kOracleRelTol = 1e-7;
constexpr double kProxObjTol = 1e-9;

std::string format_support(const SupportSet& s) {
  std::string out = "{";
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(s[k]);
  }
  return out + "}";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

int run_guarded(const std::function<int()>& command, std::ostream& err) {
  try {
    return command();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kParse;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const SizeError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kConfig;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kRuntime;
  }
}

int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& /*err*/) {
  const auto file = load_problem_file(opt.file);
  const auto& problem = file.problem;
  SolverConfig config;
  config.max_iters = opt.max_iters;
  config.step = opt.step;
  config.tol = opt.tol;
  config.seed = opt.seed;
  const auto trace = proximal_gradient(problem, file.x0, config);
  const auto& last = trace.iterates.back();
  const auto res = subdiff_distance(problem, last.x);

  out << "iterations: " << last.k << '\n';
  out << "step: " << format_double(trace.step) << '\n';
  out << "theta: " << format_double(last.theta) << '\n';
  out << "x: " << format_vector(last.x) << '\n';
  out << "support: " << format_support(last.support) << '\n';
  out << "support stable from: " << trace.support_stable_from << '\n';
  out << "criticality residual: " << format_double(res.distance)
      << (res.lower_bound ? " (lower bound)" : "") << '\n';

  if (!opt.trace_out.empty()) {
    Vec values;
    for (const auto& it : trace.iterates) values.push_back(it.theta);
    const double ref = rate_reference(problem, values);
    auto f = open_output(opt.trace_out);
    f << "k,theta,gap,support_size,step_norm\n";
    for (const auto& it : trace.iterates) {
      f << it.k << ',' << format_double(it.theta) << ',' << format_double(it.theta - ref) << ','
        << it.support.size() << ',' << format_double(it.step_norm) << '\n';
    }
  }
  return exit_code::kOk;
}

int cmd_certify(const CertifyOptions& opt, std::ostream& out, std::ostream& err) {
  const auto file = load_problem_file(opt.file);
  if (!file.xbar) throw ParseError(opt.file + ": certify needs \"xbar\"");
  const auto& problem = file.problem;
  const Vec& xbar = *file.xbar;
  if (!in_domain(problem, xbar)) {
    err << "xbar is outside dom Theta\n";
    return exit_code::kNotCritical;
  }
  const auto res = subdiff_distance(problem, xbar);
  if (res.distance > kCertifyCritTol) {
    err << "xbar is not critical: residual " << format_double(res.distance) << '\n';
    return exit_code::kNotCritical;
  }
  SamplingOptions so{opt.delta, opt.eta, opt.n, opt.seed};
  if (!(so.delta > 0.0) || !(so.eta > 0.0) || so.n == 0) {
    throw ConfigError("delta, eta and n must be positive");
  }
  const auto report = verify_kl_half(problem, xbar, so);

  out << "status: " << to_string(report.status) << " (EMPIRICAL)\n";
  out << "samples: " << report.samples.size() << '\n';
  if (!report.samples.empty()) out << "c_hat: " << format_double(report.constant_hat) << '\n';
  if (report.exponent_fit) out << "alpha_hat: " << format_double(*report.exponent_fit) << '\n';
  if (const auto* z = problem.zero_norm()) {
    out << "note: level windows below nu/3 = " << format_double(z->nu / 3.0)
        << " keep support changes out of the window\n";
  }

  if (!opt.samples_out.empty()) {
    auto f = open_output(opt.samples_out);
    f << "radius,gap,dist,ratio,same_support\n";
    for (const auto& s : report.samples) {
      f << format_double(s.radius) << ',' << format_double(s.gap) << ',' << format_double(s.dist)
        << ',' << format_double(s.dist / std::sqrt(s.gap)) << ',' << (s.same_support ? 1 : 0)
        << '\n';
    }
  }
  return exit_code::kOk;
}

int cmd_critical(const CriticalOptions& opt, std::ostream& out, std::ostream& err) {
  const auto file = load_problem_file(opt.file);
  const auto& problem = file.problem;
  if (problem.theta() != ThetaKind::Sphere) {
    err << "critical-point enumeration supports theta = sphere only, got "
        << to_string(problem.theta()) << '\n';
    return exit_code::kUnsupported;
  }
  const auto set = crit_points_general(problem.A());
  out << "families: " << set.families.size() << '\n';
  for (const auto& fam : set.families) {
    out << "  lambda " << format_double(fam.lambda) << ", eigenspace dimension "
        << fam.columns.size();
    if (fam.columns.size() > 1) out << " (every unit vector in the span is critical)";
    out << '\n';
  }
  if (!opt.enumerate) return exit_code::kOk;

  out << "representatives:\n";
  for (const auto& z : set.representatives) {
    out << "  " << format_vector(z);
    if (!in_domain(problem, z)) {
      out << "  [outside dom h]";
    } else {
      const auto res = subdiff_distance(problem, z);
      out << "  [" << (res.distance <= 1e-9 ? "critical" : "not critical") << ", residual "
          << format_double(res.distance) << "]";
    }
    out << '\n';
  }
  return exit_code::kOk;
}

int cmd_prox(const ProxOptions& opt, std::ostream& out, std::ostream& /*err*/) {
  const auto file = load_problem_file(opt.file);
  const auto& problem = file.problem;
  const Vec u = parse_vector(opt.u);
  if (u.size() != problem.dim()) {
    throw ParseError("--u has " + std::to_string(u.size()) + " entries, problem has " +
                     std::to_string(problem.dim()));
  }
  if (!(opt.t > 0.0)) throw ConfigError("--t must be positive");
  const Vec x = prox_theta_h(problem.theta(), problem.h(), u, opt.t);
  out << "x: " << format_vector(x) << '\n';
  out << "objective: " << format_double(prox_objective(problem.theta(), problem.h(), x, u, opt.t))
      << '\n';
  return exit_code::kOk;
}

int cmd_oracle_check(const OracleCheckOptions& opt, std::ostream& out, std::ostream& err) {
  const auto file = load_problem_file(opt.file);
  const auto& problem = file.problem;
  const std::size_t p = problem.dim();
  if (p > kMaxSubdiffDim) {
    throw SizeError("oracle-check supports p <= " + std::to_string(kMaxSubdiffDim));
  }
  std::size_t checks = 0;
  for (std::size_t trial = 0; trial < opt.trials; ++trial) {
    std::mt19937_64 rng(opt.seed + trial);
    const Vec x = random_feasible_point(problem, rng);
    const double fast = subdiff_distance(problem, x).distance;
    const double slow = subdiff_distance_bruteforce(problem, x).value;
    ++checks;
    if (!relatively_close(fast, slow, kOracleRelTol)) {
      err << "mismatch (subdifferential distance) in trial " << trial << ": "
          << format_double(fast) << " vs oracle " << format_double(slow) << '\n';
      ProblemFile dump{problem, std::nullopt, x};
      out << dump_problem_file(dump);
      return exit_code::kMismatch;
    }
    if (p <= kMaxProxDim) {
      std::normal_distribution<double> normal;
      std::uniform_real_distribution<double> tdist(0.1, 1.0);
      Vec u(p);
      for (double& v : u) v = normal(rng);
      const double t = tdist(rng);
      const Vec px = prox_theta_h(problem.theta(), problem.h(), u, t);
      const double a = prox_objective(problem.theta(), problem.h(), px, u, t);
      const double b = prox_bruteforce(problem.theta(), problem.h(), u, t).value;
      ++checks;
      if (!(std::abs(a - b) <= kProxObjTol)) {
        err << "mismatch (prox) in trial " << trial << ": u = " << format_vector(u)
            << ", t = " << format_double(t) << ", objective " << format_double(a) << " vs oracle "
            << format_double(b) << '\n';
        ProblemFile dump{problem, u, std::nullopt};
        out << dump_problem_file(dump);
        return exit_code::kMismatch;
      }
    }
  }
  out << "oracle agreement: " << checks << " checks over " << opt.trials << " trials\n";
  return exit_code::kOk;
}

int cmd_rate(const RateOptions& opt, std::ostream& out, std::ostream& /*err*/) {
  std::ifstream in(opt.trace, std::ios::binary);
  if (!in) throw ParseError(opt.trace + ": cannot open file");
  std::string line;
  if (!std::getline(in, line) || line != "k,theta,gap,support_size,step_norm") {
    throw ParseError(opt.trace + ":1: expected header k,theta,gap,support_size,step_norm");
  }
  Vec values;
  std::vector<long long> support_sizes;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 5) {
      throw ParseError(opt.trace + ":" + std::to_string(lineno) + ": expected 5 columns");
    }
    try {
      values.push_back(parse_csv_double(cells[1]));
      support_sizes.push_back(std::llround(parse_double(cells[3])));
    } catch (const ParseError& e) {
      throw ParseError(opt.trace + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (values.empty()) throw ParseError(opt.trace + ": no iterations");
  std::size_t stable = support_sizes.size() - 1;
  while (stable > 0 && support_sizes[stable - 1] == support_sizes.back()) --stable;
  const double theta_star =
      opt.theta_star.value_or(*std::min_element(values.begin(), values.end()));
  const auto report = estimate_linear_rate(values, stable, theta_star);

  out << "status: " << to_string(report.status) << '\n';
  out << "support stable from: " << stable << '\n';
  if (report.status == RateStatus::Fitted) {
    out << "slope: " << format_double(report.slope) << '\n';
    out << "rate: " << format_double(std::exp(report.slope)) << '\n';
    out << "r_squared: " << format_double(report.r_squared) << '\n';
    out << "tail: " << report.tail_length << '\n';
  }
  return exit_code::kOk;
}

}  // namespace klcert::cli
