#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "admmcert/problem.hpp"

namespace admmcert {

/// Text format: sections [A] [b] [F] [G] [h] [f.variant] [g.variant].
/// Matrices are row-major CSV, vectors one entry per line, `.` decimal
/// separator. Variant lines: `quadratic`, `indicator`, `l1,<w>` or
/// `huber,<w>,<delta>`. [A] and [b] hold the data of a quadratic or
/// indicator f. Blank lines and lines starting with `#` are ignored.
/// Throws FormatError naming the line on malformed input.
ProblemSpec read_problem(std::istream& in);
ProblemSpec read_problem_file(const std::filesystem::path& path);

/// Writes with shortest round-trip decimal representations.
void write_problem(std::ostream& out, const ProblemSpec& spec);
void write_problem_file(const std::filesystem::path& path, const ProblemSpec& spec);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);
/// Parses a full token as a double; throws FormatError otherwise.
double parse_double(std::string_view token);

}  // namespace admmcert
