#include "admmcert/manifest.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "admmcert/errors.hpp"
#include "admmcert/problem_io.hpp"

namespace admmcert {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw FormatError("manifest line " + std::to_string(line) + ": " + what);
}

template <typename Int>
Int parse_int(const std::string& v, int line) {
  Int out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    fail(line, "not an integer: '" + v + "'");
  }
  return out;
}

double parse_num(const std::string& v, int line) {
  try {
    return parse_double(v);
  } catch (const FormatError& e) {
    fail(line, e.what());
  }
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(line, "not a boolean: '" + v + "'");
}

}  // namespace

SolverConfig RunManifest::solver_config() const {
  SolverConfig cfg;
  cfg.s = s;
  cfg.N = N;
  cfg.variant = variant;
  cfg.r = r;
  cfg.record_every = record_every;
  cfg.stop_tol = stop_tol;
  return cfg;
}

RunManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir) {
  RunManifest m;
  std::string section;
  std::string raw;
  int ln = 0;
  auto resolve = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  while (std::getline(in, raw)) {
    ++ln;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ln, "unterminated section header");
      section = line.substr(1, line.size() - 2);
      if (section != "problem" && section != "solver" && section != "simulate" &&
          section != "oracle" && section != "output" && section != "run") {
        fail(ln, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ln, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string full = section + "." + key;
    if (full == "problem.spec") {
      m.spec_path = resolve(val);
    } else if (full == "solver.s") {
      m.s = parse_num(val, ln);
    } else if (full == "solver.N") {
      m.N = parse_int<std::int64_t>(val, ln);
    } else if (full == "solver.variant") {
      if (val == "standard") {
        m.variant = Variant::Standard;
      } else if (val == "general") {
        m.variant = Variant::General;
      } else {
        fail(ln, "variant must be standard or general");
      }
    } else if (full == "solver.r") {
      m.r = parse_num(val, ln);
    } else if (full == "solver.record_every") {
      m.record_every = parse_int<std::int64_t>(val, ln);
    } else if (full == "solver.stop_tol") {
      m.stop_tol = parse_num(val, ln);
    } else if (full == "simulate.delta") {
      m.delta = parse_num(val, ln);
    } else if (full == "simulate.horizon") {
      m.horizon = parse_num(val, ln);
    } else if (full == "simulate.huber_delta") {
      m.huber_delta = parse_num(val, ln);
    } else if (full == "oracle.tol") {
      m.oracle_tol = parse_num(val, ln);
    } else if (full == "output.dir") {
      m.out_dir = resolve(val);
    } else if (full == "run.seed") {
      m.seed = parse_int<std::uint64_t>(val, ln);
    } else if (full == "run.certify") {
      m.certify = parse_bool(val, ln);
    } else {
      fail(ln, "unknown key '" + key + "' in section [" + section + "]");
    }
  }
  return m;
}

RunManifest read_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open manifest " + path.string());
  return parse_manifest(in, path.parent_path());
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "[problem]\nspec = " << m.spec_path.string() << "\n\n";
  out << "[solver]\ns = " << format_double(m.s) << "\nN = " << m.N << "\nvariant = "
      << (m.variant == Variant::General ? "general" : "standard") << '\n';
  if (m.r) out << "r = " << format_double(*m.r) << '\n';
  out << "record_every = " << m.record_every << '\n';
  if (m.stop_tol) out << "stop_tol = " << format_double(*m.stop_tol) << '\n';
  out << "\n[simulate]\ndelta = " << format_double(m.delta)
      << "\nhorizon = " << format_double(m.horizon)
      << "\nhuber_delta = " << format_double(m.huber_delta) << '\n';
  out << "\n[oracle]\ntol = " << format_double(m.oracle_tol) << '\n';
  out << "\n[output]\ndir = " << m.out_dir.string() << '\n';
  out << "\n[run]\nseed = " << m.seed << "\ncertify = " << (m.certify ? "true" : "false") << '\n';
}

}  // namespace admmcert
