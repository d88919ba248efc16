#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace klcert::cli {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kRuntime = 1;
inline constexpr int kParse = 2;
inline constexpr int kConfig = 3;
inline constexpr int kNotCritical = 4;
inline constexpr int kUnsupported = 5;
inline constexpr int kMismatch = 6;
}  // namespace exit_code

struct SolveOptions {
  std::string file;
  std::size_t max_iters = 1000;
  std::optional<double> step;
  double tol = 1e-12;
  std::uint64_t seed = 0;
  std::string trace_out;
};

struct CertifyOptions {
  std::string file;
  double delta = 1e-2;
  double eta = 1e-2;
  std::size_t n = 500;
  std::uint64_t seed = 0;
  std::string samples_out;
};

struct CriticalOptions {
  std::string file;
  bool enumerate = false;
};

struct ProxOptions {
  std::string file;
  std::string u;
  double t = 1.0;
};

struct OracleCheckOptions {
  std::string file;
  std::size_t trials = 50;
  std::uint64_t seed = 0;
};

struct RateOptions {
  std::string trace;
  std::optional<double> theta_star;
};

// Each command reports on `out`, diagnostics on `err`, and returns an exit code.
// Library exceptions propagate; run_guarded maps them to exit codes.
int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err);
int cmd_certify(const CertifyOptions& opt, std::ostream& out, std::ostream& err);
int cmd_critical(const CriticalOptions& opt, std::ostream& out, std::ostream& err);
int cmd_prox(const ProxOptions& opt, std::ostream& out, std::ostream& err);
int cmd_oracle_check(const OracleCheckOptions& opt, std::ostream& out, std::ostream& err);
int cmd_rate(const RateOptions& opt, std::ostream& out, std::ostream& err);

int run_guarded(const std::function<int()>& command, std::ostream& err);

}  // namespace klcert::cli
