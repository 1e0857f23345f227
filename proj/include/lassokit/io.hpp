#pragma once

// Problem files: dense Matrix Market arrays, vectors with one number per line,
// and key=value manifests tying them together.

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "lassokit/error.hpp"
#include "lassokit/model.hpp"

namespace lassokit {

class IoError : public Error {
public:
  using Error::Error;
};

/// A manifest problem, tagged with the offending key.
class ManifestError : public Error {
public:
  ManifestError(std::string key, const std::string &msg)
      : Error("manifest key '" + key + "': " + msg), key_(std::move(key)) {}
  const std::string &key() const noexcept { return key_; }

private:
  std::string key_;
};

namespace detail {

inline std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(const std::string &tok) {
  const std::string t = trim(tok);
  if (t.empty())
    return std::nullopt;
  char *end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE)
    return std::nullopt;
  return v;
}

inline std::ifstream open_in(const std::filesystem::path &p) {
  std::ifstream in(p);
  if (!in)
    throw IoError("cannot open '" + p.string() + "'");
  return in;
}

inline std::ofstream open_out(const std::filesystem::path &p) {
  std::ofstream out(p);
  if (!out)
    throw IoError("cannot write '" + p.string() + "'");
  out << std::setprecision(17);
  return out;
}

} // namespace detail

/// Reads "%%MatrixMarket matrix array real general" (column-major values).
inline Matrix read_matrix_market(std::istream &in, const std::string &name = "matrix") {
  std::string line;
  if (!std::getline(in, line))
    throw IoError(name + ": empty file");
  std::istringstream head(line);
  std::string banner, object, format, field, symmetry;
  head >> banner >> object >> format >> field >> symmetry;
  auto lower = [](std::string s) {
    for (auto &ch : s)
      ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  };
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "array" ||
      lower(field) != "real" || lower(symmetry) != "general")
    throw IoError(name + ": expected '%%MatrixMarket matrix array real general'");
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (!t.empty() && t[0] != '%')
      break;
  }
  long m = -1, n = -1;
  {
    std::istringstream dims(line);
    if (!(dims >> m >> n) || m < 0 || n < 0)
      throw IoError(name + ": bad size line '" + detail::trim(line) + "'");
  }
  Matrix a(m, n);
  long count = 0;
  std::string tok;
  while (in >> tok) {
    const auto v = detail::parse_double(tok);
    if (!v)
      throw IoError(name + ": bad value '" + tok + "'");
    if (count >= m * n)
      throw IoError(name + ": more than " + std::to_string(m * n) + " values");
    a(count % m, count / m) = *v;
    ++count;
  }
  if (count != m * n)
    throw IoError(name + ": expected " + std::to_string(m * n) + " values, got " +
                  std::to_string(count));
  return a;
}

inline Matrix read_matrix_market(const std::filesystem::path &p) {
  auto in = detail::open_in(p);
  return read_matrix_market(in, p.string());
}

inline void write_matrix_market(std::ostream &out, const Matrix &a) {
  out << "%%MatrixMarket matrix array real general\n" << a.rows() << ' ' << a.cols() << '\n';
  out << std::setprecision(17);
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out << a(i, j) << '\n';
}

inline void write_matrix_market(const std::filesystem::path &p, const Matrix &a) {
  auto out = detail::open_out(p);
  write_matrix_market(out, a);
}

/// One number per line; blank lines and '#' comments are skipped.
inline Vector read_vector(std::istream &in, const std::string &name = "vector") {
  std::vector<double> vals;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto v = detail::parse_double(t);
    if (!v)
      throw IoError(name + ":" + std::to_string(lineno) + ": bad value '" + t + "'");
    vals.push_back(*v);
  }
  return Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
}

inline Vector read_vector(const std::filesystem::path &p) {
  auto in = detail::open_in(p);
  return read_vector(in, p.string());
}

inline void write_vector(std::ostream &out, const Vector &v) {
  out << std::setprecision(17);
  for (Index i = 0; i < v.size(); ++i)
    out << v[i] << '\n';
}

inline void write_vector(const std::filesystem::path &p, const Vector &v) {
  auto out = detail::open_out(p);
  write_vector(out, v);
}

/// Parsed manifest. Relative file paths are resolved against the manifest's directory.
struct Manifest {
  std::filesystem::path a;
  std::filesystem::path b;
  std::optional<std::filesystem::path> w;
  std::optional<std::filesystem::path> c;
  std::optional<double> tau;
  std::optional<double> sigma;
  double mu = 0.0;
};

inline Manifest parse_manifest(std::istream &in, const std::filesystem::path &base = {}) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ManifestError(t, "expected key=value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string val = detail::trim(t.substr(eq + 1));
    if (key != "A" && key != "b" && key != "w" && key != "c" && key != "tau" && key != "sigma" &&
        key != "mu")
      throw ManifestError(key, "unknown key");
    if (kv.count(key))
      throw ManifestError(key, "given more than once");
    if (val.empty())
      throw ManifestError(key, "empty value");
    kv[key] = val;
  }
  auto path_of = [&](const std::string &v) {
    std::filesystem::path p(v);
    return p.is_absolute() ? p : base / p;
  };
  auto number = [&](const std::string &key) -> std::optional<double> {
    auto it = kv.find(key);
    if (it == kv.end())
      return std::nullopt;
    const auto v = detail::parse_double(it->second);
    if (!v)
      throw ManifestError(key, "not a number: '" + it->second + "'");
    return v;
  };
  Manifest m;
  if (!kv.count("A"))
    throw ManifestError("A", "missing");
  if (!kv.count("b"))
    throw ManifestError("b", "missing");
  m.a = path_of(kv["A"]);
  m.b = path_of(kv["b"]);
  if (kv.count("w"))
    m.w = path_of(kv["w"]);
  if (kv.count("c"))
    m.c = path_of(kv["c"]);
  m.tau = number("tau");
  m.sigma = number("sigma");
  if (m.tau && m.sigma)
    throw ManifestError("sigma", "give exactly one of tau and sigma");
  if (!m.tau && !m.sigma)
    throw ManifestError("tau", "missing (or give sigma)");
  if (auto mu = number("mu"))
    m.mu = *mu;
  return m;
}

inline Manifest read_manifest(const std::filesystem::path &p) {
  auto in = detail::open_in(p);
  return parse_manifest(in, p.parent_path());
}

struct LoadedProblem {
  LassoProblem problem; // tau = 0 for sigma manifests
  std::optional<double> sigma;
};

/// Loads the files named by a manifest and validates the assembled problem.
/// Errors carry the key of the offending entry.
inline LoadedProblem load_problem(const Manifest &m) {
  auto guarded = [](const char *key, auto &&fn) {
    try {
      return fn();
    } catch (const ManifestError &) {
      throw;
    } catch (const Error &e) {
      throw ManifestError(key, e.what());
    }
  };
  Matrix a = guarded("A", [&] { return read_matrix_market(m.a); });
  Vector b = guarded("b", [&] { return read_vector(m.b); });
  if (b.size() != a.rows())
    throw ManifestError("b", "length " + std::to_string(b.size()) + " does not match " +
                                 std::to_string(a.rows()) + " rows of A");
  Vector w, c;
  if (m.w) {
    w = guarded("w", [&] { return read_vector(*m.w); });
    if (w.size() != a.cols())
      throw ManifestError("w", "length " + std::to_string(w.size()) + " does not match " +
                                   std::to_string(a.cols()) + " columns of A");
  }
  if (m.c) {
    c = guarded("c", [&] { return read_vector(*m.c); });
    if (c.size() != a.cols())
      throw ManifestError("c", "length " + std::to_string(c.size()) + " does not match " +
                                   std::to_string(a.cols()) + " columns of A");
  }
  if (m.tau && !(*m.tau >= 0.0))
    throw ManifestError("tau", "must be nonnegative");
  if (m.sigma && !(*m.sigma >= 0.0))
    throw ManifestError("sigma", "must be nonnegative");
  if (!(m.mu >= 0.0))
    throw ManifestError("mu", "must be nonnegative");
  LoadedProblem out;
  out.sigma = m.sigma;
  out.problem = guarded("w", [&] {
    return LassoProblem::dense(std::move(a), std::move(b), m.tau.value_or(0.0), m.mu,
                               std::move(w), std::move(c));
  });
  return out;
}

inline LoadedProblem load_problem(const std::filesystem::path &manifest) {
  return load_problem(read_manifest(manifest));
}

/// Writes A.mtx, b.txt and manifest.txt into dir (plus w.txt / c.txt when given).
inline void write_problem_bundle(const std::filesystem::path &dir, const Matrix &a, const Vector &b,
                                 std::optional<double> tau, std::optional<double> sigma,
                                 double mu = 0.0, const Vector &w = {}, const Vector &c = {}) {
  std::filesystem::create_directories(dir);
  write_matrix_market(dir / "A.mtx", a);
  write_vector(dir / "b.txt", b);
  auto out = detail::open_out(dir / "manifest.txt");
  out << "A=A.mtx\nb=b.txt\n";
  if (w.size()) {
    write_vector(dir / "w.txt", w);
    out << "w=w.txt\n";
  }
  if (c.size()) {
    write_vector(dir / "c.txt", c);
    out << "c=c.txt\n";
  }
  if (sigma)
    out << "sigma=" << *sigma << '\n';
  else
    out << "tau=" << tau.value_or(0.0) << '\n';
  if (mu != 0.0)
    out << "mu=" << mu << '\n';
}

} // namespace lassokit
