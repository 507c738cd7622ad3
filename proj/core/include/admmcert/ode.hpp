#pragma once

#include <memory>
#include <vector>

#include "admmcert/diagnostics.hpp"
#include "admmcert/problem.hpp"
#include "admmcert/prox.hpp"

namespace admmcert {

/// Node (X, Y, Lambda) of a continuous trajectory at time t.
struct ContinuousState {
  Vector X;
  Vector Y;
  Vector Lambda;
  double t = 0.0;
};

struct IntegratorConfig {
  double s = 1.0;       ///< system parameter
  double delta = 0.01;  ///< time step, delta <= s
  double T = 20.0;      ///< horizon
  double inner_tol = 1e-12;
  int inner_max = 500;

  void validate() const;
  std::int64_t steps() const;
};

/// Continuous trajectory plus the per-node columns of the CSV export.
struct ContinuousTrace {
  std::vector<ContinuousState> states;
  std::vector<double> deviation;      ///< ||F X + G Y - h||
  std::vector<double> lyapunov;       ///< against the reference, NaN without one
  std::vector<double> ne_continuous;  ///< NaN at the two boundary nodes
  std::shared_ptr<const ProblemSpec> spec;
  double s = 1.0;
  double delta = 0.0;
};

/// One implicit-Euler step of size delta for
///   F^T G (Y+ - Y)/delta = F^T Lambda+ + grad f(X+)
///   G^T Lambda+ + grad g(Y+) = 0
///   s^2 (Lambda+ - Lambda)/delta = F X+ + G Y+ - h.
/// With delta == s this is one x-, y-, lambda-sweep and reproduces
/// admm_step exactly (nonsmooth g allowed). With delta < s it needs a
/// smooth g and solves the coupled system by damped semismooth Newton on
/// the reduced x-equation. Throws NumericalError when the inner solve
/// misses inner_tol within inner_max iterations.
ContinuousState high_res_implicit_step(const ContinuousState& state, const ProblemSpec& spec,
                                       double s, double delta, FactorizationCache& cache,
                                       double inner_tol = 1e-12, int inner_max = 500);

/// Lambda solving G^T Lambda + grad g(Y) = 0 for G = +-I.
ContinuousState consistent_initial_state(const ProblemSpec& spec, const Vector& X0,
                                         const Vector& Y0);

/// Implicit-Euler trajectory over [0, T]. Lyapunov column uses `reference`.
ContinuousTrace simulate_high_res(const ProblemSpec& spec, const IntegratorConfig& config,
                                  const ContinuousState& init,
                                  const SaddlePoint* reference = nullptr);

/// X' = (F^T F)^-1 (-grad f(X) + F^T G^-T grad g(Y)) with Y = G^-1 (h - F X),
/// integrated by classical RK4. Lambda is reported as -G^-T grad g(Y).
/// Needs f quadratic, g smooth, G = +-I and F^T F invertible.
ContinuousTrace simulate_low_res(const ProblemSpec& spec, const IntegratorConfig& config,
                                 const Vector& init_x, const SaddlePoint* reference = nullptr);

/// (1/2s) ||G(Y - y)||^2 + (s/2) ||Lambda - lambda||^2.
double continuous_lyapunov(const ContinuousState& state, const Vector& y_ref,
                           const Vector& lambda_ref, const ProblemSpec& spec, double s);

/// (s/2) ||G Y'||^2 + (s^3/2) ||Lambda'||^2 at an interior node, with Y' by
/// central difference and Lambda' = (F X + G Y - h)/s^2.
double continuous_ne_lyapunov(const ContinuousTrace& trace, std::size_t index,
                              const ProblemSpec& spec, double s);

double hyperplane_deviation(const ContinuousState& state, const ProblemSpec& spec);

/// Trapezoidal time averages of X, Y and Lambda over [0, t_i] for every node.
struct ContinuousAverages {
  std::vector<Vector> X;
  std::vector<Vector> Y;
  std::vector<Vector> Lambda;
};
ContinuousAverages time_averages(const ContinuousTrace& trace);

/// Node indices closest to T/4, T/2 and T.
std::vector<std::size_t> sample_indices(const ContinuousTrace& trace);

/// Lyapunov against the saddle is nonincreasing node to node within 10 delta.
CertificateEntry check_continuous_energy_monotone(const ContinuousTrace& trace,
                                                  const SaddlePoint& saddle);

/// Time-averaged objective gap against the probe (x, y) at the sample times,
/// bounded by (||G(Y0 - y)||^2 + s^2 ||Lambda0||^2)/(2t).
CertificateEntry check_continuous_weak_average(const ContinuousTrace& trace,
                                               const SaddlePoint& saddle, const Vector& probe_x,
                                               const Vector& probe_y, const std::string& name);

/// ||avg X - x*||^2 <= (||X0 - x*||^2 + s^2 ||Lambda0 - lambda*||^2)/(mu t) at
/// the sample times. `alternative` receives the bound with ||G(Y0 - y*)||^2
/// in place of ||X0 - x*||^2. Throws ParameterError when mu <= 0.
CertificateEntry check_continuous_strong_average(const ContinuousTrace& trace,
                                                 const SaddlePoint& saddle, double mu,
                                                 CertificateEntry* alternative = nullptr);

}  // namespace admmcert
