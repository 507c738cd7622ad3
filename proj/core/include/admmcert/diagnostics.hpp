#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "admmcert/problem.hpp"
#include "admmcert/solver.hpp"

namespace admmcert {

/// Absolute tolerance for per-step inequalities and rate bounds.
inline constexpr double kStepTolerance = 1e-9;
/// Absolute tolerance for monotonicity deltas.
inline constexpr double kMonotoneTolerance = 1e-12;

/// (1/2s) ||G (y - y_ref)||^2 + (s/2) ||lambda - lambda_ref||^2. Shared by
/// the discrete and the continuous energies so both agree bit for bit.
double quadratic_energy(const Matrix& G, const Vector& y, const Vector& y_ref, const Vector& lambda,
                        const Vector& lambda_ref, double s);

double discrete_lyapunov(const IterateState& state, const Vector& y_ref, const Vector& lambda_ref,
                         const ProblemSpec& spec, double s);

/// (1/2s) ||G (y_{k+1} - y_k)||^2 + (s/2) ||lambda_{k+1} - lambda_k||^2.
/// Throws UsageError unless next.k == prev.k + 1.
double numerical_error(const IterateState& prev, const IterateState& next, const ProblemSpec& spec,
                       double s);

/// Energy of the r-proximal scheme: adds (r/2s)||x - x*||^2 - (1/2s)||F(x - x*)||^2.
double extended_lyapunov(const IterateState& state, const SaddlePoint& saddle,
                         const ProblemSpec& spec, double s, double r);

/// Numerical error of the r-proximal scheme.
double extended_numerical_error(const IterateState& prev, const IterateState& next,
                                const ProblemSpec& spec, double s, double r);

struct CertificateConstants {
  double C = 0.0;
  double s = 0.0;
  double r = std::numeric_limits<double>::quiet_NaN();
  double mu = std::numeric_limits<double>::quiet_NaN();
};

/// Outcome of one bound checked over a trace. Slack is lhs - rhs; the bound
/// passes when the worst slack is at most `tolerance`.
struct CertificateEntry {
  std::string theorem;
  bool pass = true;
  double worst_slack = -std::numeric_limits<double>::infinity();
  std::int64_t worst_index = -1;
  double tolerance = kStepTolerance;
  CertificateConstants constants;
  std::vector<double> lhs;
  std::vector<double> rhs;

  void observe(std::int64_t index, double lhs_value, double rhs_value);
};

struct CertificateReport {
  std::vector<CertificateEntry> entries;
  /// Alternative readings recorded for transparency; never gate `all_pass`.
  std::vector<CertificateEntry> informational;

  bool all_pass() const;
  std::vector<std::string> failures() const;
  void append(const CertificateReport& other);
  /// {"certificates": [...], "informational": [...]}, each entry
  /// {theorem, pass, worst_slack, worst_index, tolerance, constants:{C, s, r, mu}}.
  std::string to_json() const;
};

/// A probe point (x, y, lambda) for the iterative inequality.
struct Probe {
  Vector x;
  Vector y;
  Vector lambda;
};

/// E(k+1) - E(k) + NE(k) <= 0 against the saddle, at every step.
CertificateEntry check_energy_descent(const Trace& trace, const SaddlePoint& saddle, double s);

/// The one-step inequality bounding E(k+1) - E(k) (energy centred at the
/// probe's (y, lambda)) by the probe gap minus NE(k).
CertificateEntry check_iterative_inequality(const Trace& trace, const ProblemSpec& spec, double s,
                                            const SaddlePoint& saddle, const Probe& probe,
                                            const std::string& name);

/// Average and minimum of ||G dy||^2 + s^2 ||d lambda||^2 over steps 0..N are
/// at most (||G(y0 - y*)||^2 + s^2 ||lambda0 - lambda*||^2)/(N+1), every N.
CertificateEntry check_ergodic_rate(const Trace& trace, const SaddlePoint& saddle, double s);

/// Objective gap at the averaged iterate against the feasible-or-not probe
/// (x, y), bounded by (||G(y0 - y)||^2 + s^2 ||lambda0||^2)/(2s(N+1)).
CertificateEntry check_weak_average_gap(const Trace& trace, const SaddlePoint& saddle,
                                        const ProblemSpec& spec, double s, const Vector& probe_x,
                                        const Vector& probe_y, const std::string& name);

/// ||avg(x_0..x_{N+1}) - x*||^2 <= (||x0 - x*||^2 + s^2||lambda0 - lambda*||^2)/(mu s (N+1)).
/// `shifted` (if non-null) receives the same bound for avg(x_1..x_{N+1}).
/// Throws ParameterError("strong convexity certificate unavailable") when mu <= 0.
CertificateEntry check_strong_average(const Trace& trace, const SaddlePoint& saddle, double s,
                                      double mu, CertificateEntry* shifted = nullptr);

/// NE(k+1) <= NE(k) within kMonotoneTolerance.
CertificateEntry check_numerical_error_monotone(const Trace& trace, const ProblemSpec& spec,
                                                double s);

/// ||G dy_N||^2 + s^2 ||d lambda_N||^2 <= C/(N+1) at every N.
CertificateEntry check_last_iterate_rate(const Trace& trace, const SaddlePoint& saddle, double s);

/// Three-point inequality behind the monotonicity of NE, at every triple.
CertificateEntry check_three_point_inequality(const Trace& trace, double s);

/// sum_{k=0}^{N} NE(k) <= E(0) at every prefix.
CertificateEntry check_telescoped_numerical_error(const Trace& trace, const SaddlePoint& saddle,
                                                  double s);

/// Bounds of the r-proximal scheme: average, minimum and last-iterate
/// ||x_{k+1} - x_k||^2, the dual-side rate with the extended constant, and
/// monotonicity of the extended energy and extended numerical error.
CertificateReport check_proximal_rates(const Trace& trace, const SaddlePoint& saddle,
                                       const ProblemSpec& spec, double s, double r);

/// Every applicable standard-scheme certificate. Strong averaging is added
/// when f has a positive modulus.
CertificateReport certify_standard_trace(const Trace& trace, const SaddlePoint& saddle,
                                         const ProblemSpec& spec, double s);

/// r-proximal certificates.
CertificateReport certify_general_trace(const Trace& trace, const SaddlePoint& saddle,
                                        const ProblemSpec& spec, double s, double r);

}  // namespace admmcert
