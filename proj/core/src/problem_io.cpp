#include "admmcert/problem_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "admmcert/errors.hpp"

namespace admmcert {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Section {
  int header_line = 0;
  std::vector<std::pair<int, std::string>> lines;
};

[[noreturn]] void fail(int line, const std::string& what) {
  std::ostringstream os;
  os << "problem file line " << line << ": " << what;
  throw FormatError(os.str());
}

Matrix parse_matrix(const std::string& name, const Section& sec) {
  if (sec.lines.empty()) fail(sec.header_line, "section [" + name + "] is empty");
  std::vector<std::vector<double>> rows;
  for (const auto& [ln, text] : sec.lines) {
    std::vector<double> row;
    for (auto tok : split_commas(text)) {
      try {
        row.push_back(parse_double(tok));
      } catch (const FormatError& e) {
        fail(ln, e.what());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ln, "row length differs from the first row of [" + name + "]");
    }
    rows.push_back(std::move(row));
  }
  Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return M;
}

Vector parse_vector(const std::string& name, const Section& sec) {
  const Matrix M = parse_matrix(name, sec);
  if (M.cols() != 1) fail(sec.header_line, "section [" + name + "] must hold one value per line");
  return M.col(0);
}

struct VariantLine {
  std::string kind;
  std::vector<double> params;
  int line = 0;
};

VariantLine parse_variant(const std::string& name, const Section& sec) {
  if (sec.lines.size() != 1) fail(sec.header_line, "section [" + name + "] needs exactly one line");
  const auto& [ln, text] = sec.lines.front();
  const auto toks = split_commas(text);
  VariantLine v;
  v.kind = std::string(toks.front());
  v.line = ln;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    try {
      v.params.push_back(parse_double(toks[i]));
    } catch (const FormatError& e) {
      fail(ln, e.what());
    }
  }
  return v;
}

SeparableFunction make_function(const VariantLine& v, const std::map<std::string, Section>& secs,
                                bool data_allowed) {
  auto need = [&](std::size_t n) {
    if (v.params.size() != n) fail(v.line, "variant '" + v.kind + "' takes " + std::to_string(n) + " parameters");
  };
  if (v.kind == "quadratic" || v.kind == "indicator") {
    need(0);
    if (!data_allowed) fail(v.line, "variant '" + v.kind + "' is only available for f");
    const auto a = secs.find("A");
    const auto b = secs.find("b");
    if (a == secs.end() || b == secs.end()) fail(v.line, "variant '" + v.kind + "' needs [A] and [b]");
    Matrix A = parse_matrix("A", a->second);
    Vector bv = parse_vector("b", b->second);
    if (A.rows() != bv.size()) fail(b->second.header_line, "[A] rows and [b] length differ");
    return v.kind == "quadratic" ? SeparableFunction::quadratic(std::move(A), std::move(bv))
                                 : SeparableFunction::affine_indicator(std::move(A), std::move(bv));
  }
  if (v.kind == "l1") {
    need(1);
    return SeparableFunction::scaled_l1(v.params[0]);
  }
  if (v.kind == "huber") {
    need(2);
    return SeparableFunction::huber(v.params[0], v.params[1]);
  }
  fail(v.line, "unknown variant '" + v.kind + "'");
}

void write_matrix(std::ostream& out, const char* name, const Matrix& M) {
  out << '[' << name << "]\n";
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << format_double(M(i, j));
    }
    out << '\n';
  }
}

void write_vector(std::ostream& out, const char* name, const Vector& v) {
  out << '[' << name << "]\n";
  for (Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
}

std::string variant_line(const SeparableFunction& fn) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          return "quadratic";
        } else if constexpr (std::is_same_v<T, AffineIndicator>) {
          return "indicator";
        } else if constexpr (std::is_same_v<T, ScaledL1>) {
          return "l1," + format_double(v.w);
        } else {
          return "huber," + format_double(v.w) + "," + format_double(v.delta);
        }
      },
      fn.variant());
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view token) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw FormatError("not a number: '" + std::string(token) + "'");
  }
  return v;
}

ProblemSpec read_problem(std::istream& in) {
  std::map<std::string, Section> secs;
  Section* current = nullptr;
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ln, "unterminated section header");
      const std::string name(line.substr(1, line.size() - 2));
      static const std::array<const char*, 7> known{"A", "b", "F", "G", "h", "f.variant", "g.variant"};
      if (std::find(known.begin(), known.end(), name) == known.end()) fail(ln, "unknown section [" + name + "]");
      if (secs.count(name)) fail(ln, "duplicate section [" + name + "]");
      current = &secs[name];
      current->header_line = ln;
      continue;
    }
    if (!current) fail(ln, "data before the first section header");
    current->lines.emplace_back(ln, std::string(line));
  }
  for (const char* required : {"F", "G", "h", "f.variant", "g.variant"}) {
    if (!secs.count(required)) fail(ln, std::string("missing section [") + required + "]");
  }
  SeparableFunction f = make_function(parse_variant("f.variant", secs["f.variant"]), secs, true);
  SeparableFunction g = make_function(parse_variant("g.variant", secs["g.variant"]), secs, false);
  return ProblemSpec(std::move(f), std::move(g), parse_matrix("F", secs["F"]),
                     parse_matrix("G", secs["G"]), parse_vector("h", secs["h"]));
}

ProblemSpec read_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open problem file " + path.string());
  return read_problem(in);
}

void write_problem(std::ostream& out, const ProblemSpec& spec) {
  const auto& f = spec.f();
  if (f.is_quadratic() || f.is_indicator()) {
    write_matrix(out, "A", f.data_matrix());
    write_vector(out, "b", f.data_vector());
  }
  write_matrix(out, "F", spec.F());
  write_matrix(out, "G", spec.G());
  write_vector(out, "h", spec.h());
  out << "[f.variant]\n" << variant_line(f) << '\n';
  out << "[g.variant]\n" << variant_line(spec.g()) << '\n';
}

void write_problem_file(const std::filesystem::path& path, const ProblemSpec& spec) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write problem file " + path.string());
  write_problem(out, spec);
  if (!out) throw FormatError("write failed for " + path.string());
}

}  // namespace admmcert
