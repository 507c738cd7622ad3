#include "admmcert/trace_io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "admmcert/errors.hpp"
#include "admmcert/problem_io.hpp"

namespace admmcert {
namespace {

void append_indexed(std::vector<std::string>& cols, const char* name, Index n) {
  for (Index i = 0; i < n; ++i) cols.push_back(std::string(name) + "[" + std::to_string(i) + "]");
}

std::string cell(double v) { return std::isnan(v) ? std::string("nan") : format_double(v); }

void write_row(std::ostream& out, const std::vector<std::string>& row, std::size_t expected) {
  if (row.size() != expected) {
    std::ostringstream os;
    os << "csv row has " << row.size() << " fields, schema declares " << expected;
    throw FormatError(os.str());
  }
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << row[i];
  }
  out << '\n';
}

void push_vector(std::vector<std::string>& row, const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) row.push_back(cell(v(i)));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<std::string> trace_csv_columns(Index d1, Index d2, Index m) {
  std::vector<std::string> cols{"k"};
  append_indexed(cols, "x", d1);
  append_indexed(cols, "y", d2);
  append_indexed(cols, "lambda", m);
  for (const auto& key : trace_diagnostic_keys()) cols.push_back(key);
  return cols;
}

std::vector<std::string> continuous_csv_columns(Index d1, Index d2, Index m) {
  std::vector<std::string> cols{"t"};
  append_indexed(cols, "X", d1);
  append_indexed(cols, "Y", d2);
  append_indexed(cols, "Lambda", m);
  cols.insert(cols.end(), {"deviation", "lyapunov", "ne_continuous"});
  return cols;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  if (!trace.spec) throw UsageError("trace has no problem attached");
  const auto& spec = *trace.spec;
  const auto cols = trace_csv_columns(spec.d1(), spec.d2(), spec.m());
  write_row(out, cols, cols.size());
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    const auto& st = trace.states[i];
    std::vector<std::string> row{std::to_string(st.k)};
    push_vector(row, st.x);
    push_vector(row, st.y);
    push_vector(row, st.lambda);
    for (const auto& key : trace_diagnostic_keys()) row.push_back(cell(trace.diagnostics.at(key).at(i)));
    write_row(out, row, cols.size());
  }
}

void write_continuous_csv(std::ostream& out, const ContinuousTrace& trace) {
  if (!trace.spec) throw UsageError("trace has no problem attached");
  const auto& spec = *trace.spec;
  const auto cols = continuous_csv_columns(spec.d1(), spec.d2(), spec.m());
  write_row(out, cols, cols.size());
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    const auto& st = trace.states[i];
    std::vector<std::string> row{cell(st.t)};
    push_vector(row, st.X);
    push_vector(row, st.Y);
    push_vector(row, st.Lambda);
    row.push_back(cell(trace.deviation.at(i)));
    row.push_back(cell(trace.lyapunov.at(i)));
    row.push_back(cell(trace.ne_continuous.at(i)));
    write_row(out, row, cols.size());
  }
}

void write_trace_json(std::ostream& out, const Trace& trace) {
  if (!trace.spec) throw UsageError("trace has no problem attached");
  const auto& spec = *trace.spec;
  const auto cols = trace_csv_columns(spec.d1(), spec.d2(), spec.m());
  nlohmann::ordered_json j;
  j["columns"] = cols;
  auto rows = nlohmann::ordered_json::array();
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isnan(v)) return nullptr;
    return v;
  };
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    const auto& st = trace.states[i];
    auto row = nlohmann::ordered_json::array();
    row.push_back(st.k);
    for (const Vector* v : {&st.x, &st.y, &st.lambda}) {
      for (Index c = 0; c < v->size(); ++c) row.push_back(num((*v)(c)));
    }
    for (const auto& key : trace_diagnostic_keys()) row.push_back(num(trace.diagnostics.at(key).at(i)));
    if (row.size() != cols.size()) throw FormatError("json row does not match the declared columns");
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["stop_reason"] = trace.stop_reason;
  out << j.dump(1) << '\n';
}

void check_csv_schema(std::istream& in, const std::vector<std::string>& expected) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("csv is empty");
  if (split(line) != expected) throw FormatError("csv header does not match the declared columns");
  int ln = 1;
  while (std::getline(in, line)) {
    ++ln;
    if (split(line).size() != expected.size()) {
      throw FormatError("csv line " + std::to_string(ln) + " has the wrong number of fields");
    }
  }
}

}  // namespace admmcert
