#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace klcert::cli;

int main(int argc, char** argv) {
  CLI::App app{"klcert: KL exponent 1/2 certification for zero-norm composite quadratics"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "Run proximal gradient on a problem file");
  s->add_option("file", solve.file, "Problem file (JSON)")->required();
  s->add_option("--max-iters", solve.max_iters, "Iteration cap");
  s->add_option("--step", solve.step, "Step size (default 1/(2||A|| + 1e-8))");
  s->add_option("--tol", solve.tol, "Stop when ||x_{k+1} - x_k|| <= tol");
  s->add_option("--seed", solve.seed, "Seed for the initial point when x0 is absent");
  s->add_option("--trace-out", solve.trace_out, "Trace CSV path");

  CertifyOptions certify;
  auto* c = app.add_subcommand("certify", "Sample the KL inequality around xbar");
  c->add_option("file", certify.file, "Problem file with xbar")->required();
  c->add_option("--delta", certify.delta, "Neighborhood radius");
  c->add_option("--eta", certify.eta, "Level window");
  c->add_option("--n", certify.n, "Candidate count");
  c->add_option("--seed", certify.seed, "Sampling seed");
  c->add_option("--samples-out", certify.samples_out, "Sample CSV path");

  CriticalOptions critical;
  auto* cr = app.add_subcommand("critical", "Critical points of x^T A x on the unit sphere");
  cr->add_option("file", critical.file, "Problem file")->required();
  cr->add_flag("--enumerate", critical.enumerate, "List representatives with h-criticality");

  ProxOptions prox;
  auto* pr = app.add_subcommand("prox", "Evaluate prox_{t(theta+h)}(u)");
  pr->add_option("file", prox.file, "Problem file")->required();
  pr->add_option("--u", prox.u, "Comma-separated vector")->required();
  pr->add_option("--t", prox.t, "Prox parameter");

  OracleCheckOptions oracle;
  auto* oc = app.add_subcommand("oracle-check", "Compare closed forms with brute force");
  oc->add_option("file", oracle.file, "Problem file (p <= 10)")->required();
  oc->add_option("--trials", oracle.trials, "Random trials");
  oc->add_option("--seed", oracle.seed, "Base seed");

  RateOptions rate;
  auto* ra = app.add_subcommand("rate", "Fit a linear rate to a trace CSV");
  ra->add_option("trace", rate.trace, "Trace CSV from solve --trace-out")->required();
  ra->add_option("--theta-star", rate.theta_star, "Reference value (default: smallest theta)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code::kParse;
  }

  auto& out = std::cout;
  auto& err = std::cerr;
  if (*s) return run_guarded([&] { return cmd_solve(solve, out, err); }, err);
  if (*c) return run_guarded([&] { return cmd_certify(certify, out, err); }, err);
  if (*cr) return run_guarded([&] { return cmd_critical(critical, out, err); }, err);
  if (*pr) return run_guarded([&] { return cmd_prox(prox, out, err); }, err);
  if (*oc) return run_guarded([&] { return cmd_oracle_check(oracle, out, err); }, err);
  return run_guarded([&] { return cmd_rate(rate, out, err); }, err);
}
