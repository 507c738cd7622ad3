#pragma once

#include <string>
#include <vector>

#include "admmcert/diagnostics.hpp"

namespace admmcert {

struct AcceptanceOptions {
  std::int64_t steps = 1000;          ///< discrete run length
  std::int64_t strong_steps = 10000;  ///< run length for strong averaging
  int identity_steps = 100;           ///< steps compared in the implicit-Euler identity
  double oracle_tol = 1e-9;
  double kkt_limit = 1e-8;
  double oracle_agreement = 1e-7;
  double huber_delta = 1e-3;
  double horizon_factor = 20.0;  ///< T = horizon_factor * s
  double step_fraction = 0.01;   ///< delta = step_fraction * s
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;  ///< wall time; kept out of the certificate JSON
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  CertificateReport certificates;

  bool all_pass() const;
  std::vector<std::string> failures() const;
  /// Deterministic summary: criteria (without timings) plus every certificate.
  std::string to_json() const;
  /// Wall times per criterion, for a sidecar file.
  std::string timing_json() const;
};

/// Runs acceptance criteria 1-8 on the built-in instance library.
/// Determinism (running twice) is left to the caller.
AcceptanceReport run_acceptance(const AcceptanceOptions& options = {});

/// A point with f(x) and g(y) finite and F x + G y = h: the least-squares
/// feasible point shifted by a seeded random null-space direction.
struct FeasiblePoint {
  Vector x;
  Vector y;
};
FeasiblePoint random_feasible_point(const ProblemSpec& spec, std::uint64_t seed);

}  // namespace admmcert
