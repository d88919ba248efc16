#include "problem_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "klcert/errors.hpp"

namespace klcert::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Position {
  std::size_t line = 1;
  std::size_t column = 1;
};

Position position_of(std::string_view text, std::size_t offset) {
  Position pos;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

// Offset just past `"key":` at or after `from`, or npos.
std::size_t find_key(std::string_view text, std::string_view key, std::size_t from = 0) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  for (std::size_t at = text.find(quoted, from); at != std::string_view::npos;
       at = text.find(quoted, at + 1)) {
    std::size_t k = at + quoted.size();
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    if (k < text.size() && text[k] == ':') return k + 1;
  }
  return std::string_view::npos;
}

// Offset of the `index`-th element of the array starting at or after `from`.
std::size_t find_element(std::string_view text, std::size_t from, std::size_t index) {
  std::size_t k = text.find('[', from);
  if (k == std::string_view::npos) return from;
  int depth = 0;
  std::size_t seen = 0;
  bool in_string = false;
  bool expect_element = true;
  for (; k < text.size(); ++k) {
    const char c = text[k];
    if (in_string) {
      if (c == '\\') ++k;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '[' || c == '{') {
      if (depth == 1 && expect_element) {
        if (seen == index) return k;
        expect_element = false;
      }
      ++depth;
      if (depth == 1) expect_element = true;
      continue;
    }
    if (c == ']' || c == '}') {
      if (--depth == 0) break;
      continue;
    }
    if (depth != 1 || std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == ',') {
      ++seen;
      expect_element = true;
    } else if (expect_element) {
      if (seen == index) return k;
      expect_element = false;
    }
    if (c == '"') in_string = true;
  }
  return from;
}

class Reader {
 public:
  Reader(std::string_view text, std::string_view origin) : text_(text), origin_(origin) {}

  [[noreturn]] void fail(std::size_t offset, const std::string& what) const {
    const auto pos = position_of(text_, offset);
    throw ParseError(std::string(origin_) + ":" + std::to_string(pos.line) + ":" +
                     std::to_string(pos.column) + ": " + what);
  }

  std::size_t key_offset(std::string_view key, std::size_t from = 0) const {
    const auto at = find_key(text_, key, from);
    return at == std::string_view::npos ? 0 : at;
  }

  std::string_view text() const { return text_; }

 private:
  std::string_view text_;
  std::string_view origin_;
};

double number_at(const Reader& r, const Json& v, std::size_t offset, const std::string& path) {
  if (!v.is_number()) r.fail(offset, path + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) r.fail(offset, path + " must be finite");
  return d;
}

Vec read_vector(const Reader& r, const Json& v, std::size_t offset, const std::string& path) {
  if (!v.is_array()) r.fail(offset, path + " must be an array of numbers");
  Vec out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number_at(r, v[i], find_element(r.text(), offset, i),
                            path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

SymMatrix read_matrix(const Reader& r, const Json& doc) {
  const std::size_t at = r.key_offset("A");
  if (!doc.contains("A")) r.fail(0, "missing key \"A\"");
  const Json& a = doc["A"];
  if (!a.is_array() || a.empty()) r.fail(at, "A must be a non-empty array of rows");
  const std::size_t p = a.size();
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t row_at = find_element(r.text(), at, i);
    const std::string path = "A[" + std::to_string(i) + "]";
    Vec row = read_vector(r, a[i], row_at, path);
    if (row.size() != p) {
      r.fail(row_at, path + " has " + std::to_string(row.size()) + " entries, expected " +
                         std::to_string(p));
    }
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      if (std::abs(rows[i][j] - rows[j][i]) > SymMatrix::kSymmetryTol) {
        r.fail(find_element(r.text(), at, i),
               "A is not symmetric: A[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
                   format_double(rows[i][j]) + " but A[" + std::to_string(j) + "][" +
                   std::to_string(i) + "] = " + format_double(rows[j][i]));
      }
    }
  }
  return SymMatrix::from_rows(rows);
}

HKind read_h(const Reader& r, const Json& doc, std::size_t p) {
  const std::size_t at = r.key_offset("h");
  if (!doc.contains("h")) r.fail(0, "missing key \"h\"");
  const Json& h = doc["h"];
  if (!h.is_object() || !h.contains("kind") || !h["kind"].is_string()) {
    r.fail(at, "h must be an object with a string \"kind\"");
  }
  const auto kind = h["kind"].get<std::string>();
  if (kind == "zero_norm") {
    const std::size_t nu_at = r.key_offset("nu", at);
    if (!h.contains("nu")) r.fail(at, "h.nu is required for kind zero_norm");
    const double nu = number_at(r, h["nu"], nu_at, "h.nu");
    if (!(nu > 0.0)) r.fail(nu_at, "h.nu must be positive");
    return ZeroNorm{nu};
  }
  if (kind == "sparsity") {
    const std::size_t k_at = r.key_offset("kappa", at);
    if (!h.contains("kappa")) r.fail(at, "h.kappa is required for kind sparsity");
    const Json& k = h["kappa"];
    if (!k.is_number_integer()) r.fail(k_at, "h.kappa must be an integer");
    const auto kappa = k.get<long long>();
    if (kappa < 1 || static_cast<std::size_t>(kappa) > p) {
      r.fail(k_at, "h.kappa = " + std::to_string(kappa) + " outside [1, " + std::to_string(p) + "]");
    }
    return SparsityBall{static_cast<std::size_t>(kappa)};
  }
  r.fail(r.key_offset("kind", at), "h.kind must be \"zero_norm\" or \"sparsity\", got \"" + kind + "\"");
}

std::optional<Vec> read_point(const Reader& r, const Json& doc, const char* key, std::size_t p) {
  if (!doc.contains(key)) return std::nullopt;
  const std::size_t at = r.key_offset(key);
  Vec v = read_vector(r, doc[key], at, key);
  if (v.size() != p) {
    r.fail(at, std::string(key) + " has " + std::to_string(v.size()) + " entries, expected " +
                   std::to_string(p));
  }
  return v;
}

Json vector_json(std::span<const double> v) {
  Json arr = Json::array();
  for (double d : v) arr.push_back(d);
  return arr;
}

}  // namespace

ProblemFile parse_problem_file(std::string_view text, std::string_view origin) {
  const Reader r(text, origin);
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const std::string msg = e.what();
    const auto colon = msg.rfind(": ");
    r.fail(e.byte > 0 ? e.byte - 1 : 0,
           "invalid JSON" + (colon == std::string::npos ? std::string() : msg.substr(colon)));
  }
  if (!doc.is_object()) r.fail(0, "top level must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "A" && key != "theta" && key != "h" && key != "x0" && key != "xbar") {
      r.fail(r.key_offset(key), "unknown key \"" + key + "\"");
    }
  }
  SymMatrix a = read_matrix(r, doc);
  const std::size_t p = a.dim();

  const std::size_t theta_at = r.key_offset("theta");
  if (!doc.contains("theta") || !doc["theta"].is_string()) {
    r.fail(theta_at, "theta must be one of zero, sphere, simplex, nonneg, sphere_nonneg");
  }
  ThetaKind theta;
  try {
    theta = theta_from_string(doc["theta"].get<std::string>());
  } catch (const ArgumentError& e) {
    r.fail(theta_at, e.what());
  }
  HKind h = read_h(r, doc, p);
  ProblemFile file{ProblemSpec(std::move(a), theta, h), std::nullopt, std::nullopt};
  file.x0 = read_point(r, doc, "x0", p);
  file.xbar = read_point(r, doc, "xbar", p);
  return file;
}

ProblemFile load_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_file(buf.str(), path.string());
}

std::string dump_problem_file(const ProblemFile& file) {
  const auto& pr = file.problem;
  Json doc;
  Json rows = Json::array();
  for (std::size_t i = 0; i < pr.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < pr.dim(); ++j) row.push_back(pr.A()(i, j));
    rows.push_back(std::move(row));
  }
  doc["A"] = std::move(rows);
  doc["theta"] = std::string(to_string(pr.theta()));
  if (const auto* z = pr.zero_norm()) {
    doc["h"] = {{"kind", "zero_norm"}, {"nu", z->nu}};
  } else {
    doc["h"] = {{"kind", "sparsity"}, {"kappa", pr.sparsity()->kappa}};
  }
  if (file.x0) doc["x0"] = vector_json(*file.x0);
  if (file.xbar) doc["xbar"] = vector_json(*file.xbar);
  return doc.dump(2) + "\n";
}

double parse_csv_double(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size() || std::isnan(v)) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

double parse_double(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v)) {
    throw ParseError("not a finite decimal number: '" + std::string(text) + "'");
  }
  return v;
}

Vec parse_vector(std::string_view text) {
  Vec out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_double(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

std::string format_vector(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i] == 0.0 ? 0.0 : v[i]);
  }
  return s;
}

}  // namespace klcert::cli
