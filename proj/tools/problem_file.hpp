#pragma once

// JSON problem files:
//   {"A": [[...], ...], "theta": "sphere",
//    "h": {"kind": "sparsity", "kappa": 2} | {"kind": "zero_norm", "nu": 0.5},
//    "x0": [...], "xbar": [...]}

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "klcert/problem.hpp"

namespace klcert::cli {

/// Malformed input; the message carries a line:column or key location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemFile {
  ProblemSpec problem;
  std::optional<Vec> x0;
  std::optional<Vec> xbar;
};

ProblemFile parse_problem_file(std::string_view text, std::string_view origin = "<input>");
ProblemFile load_problem_file(const std::filesystem::path& path);
std::string dump_problem_file(const ProblemFile& file);

/// Comma-separated decimals, dot separator regardless of locale.
Vec parse_vector(std::string_view text);
double parse_double(std::string_view text);
/// Like parse_double but accepts inf (as written by format_double).
double parse_csv_double(std::string_view text);
/// Shortest representation that parses back to the same double.
std::string format_double(double v);
std::string format_vector(std::span<const double> v);

}  // namespace klcert::cli
