#pragma once

#include <cstdint>

#include "admmcert/problem.hpp"

namespace admmcert {

enum class OracleMode { Auto, Enumeration, LongRun };

/// Largest d2 accepted by the sign-pattern enumeration (3^d2 patterns).
inline constexpr Index kMaxEnumerationDim = 12;
inline constexpr std::int64_t kDefaultOracleBudget = 10'000'000;

/// Reference saddle point with every KKT residual at most `tol`.
///
/// Auto enumerates sign patterns of the l1 (or Huber zone) part when
/// d2 <= 12 and G = +-I, and otherwise runs the r-proximal scheme until the
/// residuals fall below tol/10. Throws ParameterError for tol < 1e-12 and
/// ConvergenceError (carrying the best residual) when the budget runs out.
SaddlePoint saddle_point_oracle(const ProblemSpec& spec, double tol,
                                OracleMode mode = OracleMode::Auto,
                                std::int64_t max_iterations = kDefaultOracleBudget);

/// Solves the KKT linear system of each sign pattern and returns the first
/// consistent one. Requires G = +-I and d2 <= 12.
SaddlePoint enumerate_sign_patterns(const ProblemSpec& spec, double tol);

/// r-proximal ADMM with r = 1.5 ||F^T F|| (1 when F^T F = 0) and s = 1.
SaddlePoint long_run_saddle(const ProblemSpec& spec, double tol, std::int64_t max_iterations);

}  // namespace admmcert
