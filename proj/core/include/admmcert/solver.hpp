#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "admmcert/errors.hpp"
#include "admmcert/problem.hpp"
#include "admmcert/prox.hpp"

namespace admmcert {

/// One ADMM iterate (x_k, y_k, lambda_k).
struct IterateState {
  Vector x;
  Vector y;
  Vector lambda;
  std::int64_t k = 0;

  static IterateState zeros(const ProblemSpec& spec);
};

enum class Variant { Standard, General };

struct SolverConfig {
  double s = 1.0;
  std::int64_t N = 1;
  Variant variant = Variant::Standard;
  /// Proximal coefficient of the general variant. Defaults to 1.5 ||F^T F||.
  std::optional<double> r;
  std::int64_t record_every = 1;
  /// Optional early stop once every KKT residual is at most this value.
  std::optional<double> stop_tol;

  /// Validates s, N, record_every and (for General) r against the problem.
  void validate(const ProblemSpec& spec) const;
  double effective_r(const ProblemSpec& spec) const;
};

/// Column names of the per-index diagnostics, in export order.
inline const std::vector<std::string>& trace_diagnostic_keys() {
  static const std::vector<std::string> keys{"primal_res", "dual_x_res", "dual_y_res",
                                             "objective",  "lyapunov",   "ne"};
  return keys;
}

/// Recorded run. `diagnostics[key][i]` belongs to `states[i]`. The `ne`
/// column holds the numerical error of the step that produced the row
/// (0 for the initial state); `lyapunov` is NaN without a reference saddle.
struct Trace {
  std::vector<IterateState> states;
  std::map<std::string, std::vector<double>> diagnostics;
  std::shared_ptr<const ProblemSpec> spec;
  SolverConfig config;
  std::string stop_reason;

  /// True when indices run 0, 1, 2, ... without gaps.
  bool is_consecutive() const;
};

/// Raised by run() when a kernel fails; carries the states computed so far.
class RunError : public Error {
 public:
  RunError(const std::string& what, Trace partial) : Error(what), partial_(std::move(partial)) {}
  const Trace& partial() const noexcept { return partial_; }

 private:
  Trace partial_;
};

/// x-, y- and lambda-updates of the standard scheme.
IterateState admm_step(const IterateState& state, const ProblemSpec& spec, double s,
                       FactorizationCache& cache);

/// Same, with the r-proximal x-update.
IterateState general_admm_step(const IterateState& state, const ProblemSpec& spec, double s,
                               double r, FactorizationCache& cache);

/// Runs N steps from `init`. When `reference` is given the lyapunov column
/// is filled against it. Deterministic in its inputs.
Trace run(const ProblemSpec& spec, const SolverConfig& config, const IterateState& init,
          const SaddlePoint* reference = nullptr, FactorizationCache* cache = nullptr);

/// Iterate averages: entry N is (1/(N+1)) sum_{k=0}^{N} of the recorded states.
struct RunningAverages {
  std::vector<Vector> x;
  std::vector<Vector> y;
  std::vector<Vector> lambda;
};

RunningAverages running_average(const Trace& trace);

}  // namespace admmcert
