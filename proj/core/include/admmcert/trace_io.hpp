#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "admmcert/ode.hpp"
#include "admmcert/solver.hpp"

namespace admmcert {

/// k, x[0..d1), y[0..d2), lambda[0..m), then trace_diagnostic_keys().
std::vector<std::string> trace_csv_columns(Index d1, Index d2, Index m);

/// t, X[..], Y[..], Lambda[..], deviation, lyapunov, ne_continuous.
std::vector<std::string> continuous_csv_columns(Index d1, Index d2, Index m);

/// Every row is checked against the declared columns before it is written;
/// a mismatch throws FormatError. NaN is written as `nan`.
void write_trace_csv(std::ostream& out, const Trace& trace);
void write_continuous_csv(std::ostream& out, const ContinuousTrace& trace);

/// {"columns": [...], "rows": [[...], ...], "stop_reason": ...}; NaN as null.
void write_trace_json(std::ostream& out, const Trace& trace);

/// Throws FormatError unless the CSV header equals `expected` and every row
/// has the same number of fields.
void check_csv_schema(std::istream& in, const std::vector<std::string>& expected);

}  // namespace admmcert
