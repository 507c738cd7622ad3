#include "admmcert/oracle.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "admmcert/errors.hpp"
#include "admmcert/prox.hpp"
#include "admmcert/solver.hpp"

namespace admmcert {
namespace {

enum class Zone { Centre, Positive, Negative };

/// Assembles and solves the KKT system for one zone assignment. Unknowns
/// are (x, lambda) plus the indicator multiplier nu. Returns false when the
/// linear solve is inconsistent.
bool solve_pattern(const ProblemSpec& spec, const std::vector<Zone>& zones, double sigma,
                   Vector& x, Vector& lambda) {
  const auto& f = spec.f();
  const auto& g = spec.g();
  const Matrix& F = spec.F();
  const Vector& h = spec.h();
  const Index d1 = spec.d1();
  const Index m = spec.m();
  const bool indicator = f.is_indicator();
  const Index m1 = indicator ? f.data_matrix().rows() : 0;
  const Index n = d1 + m + m1;
  const double w = g.weight();
  const bool huber = g.is_huber();
  const double dh = huber ? std::get<HuberSmoothedL1>(g.variant()).delta : 0.0;

  // Rows: d1 stationarity, m1 feasibility, m zone equations.
  Matrix K = Matrix::Zero(n, n);
  Vector rhs = Vector::Zero(n);
  // Stationarity in x.
  K.block(0, d1, d1, m) = F.transpose();
  if (indicator) {
    const Matrix& A = f.data_matrix();
    K.block(0, d1 + m, d1, m1) = A.transpose();
    K.block(d1, 0, m1, d1) = A;
    rhs.segment(d1, m1) = f.data_vector();
  } else {
    const Matrix& A = f.data_matrix();
    K.block(0, 0, d1, d1) = 2.0 * A.transpose() * A;
    rhs.head(d1) = 2.0 * A.transpose() * f.data_vector();
  }
  // One row per coordinate of y = sigma (h - F x).
  for (Index i = 0; i < m; ++i) {
    const Index r = d1 + m1 + i;
    switch (zones[static_cast<std::size_t>(i)]) {
      case Zone::Positive:
      case Zone::Negative: {
        const double p = zones[static_cast<std::size_t>(i)] == Zone::Positive ? 1.0 : -1.0;
        K(r, d1 + i) = 1.0;
        rhs(r) = -sigma * w * p;
        break;
      }
      case Zone::Centre:
        if (huber) {
          // lambda_i + (w/dh) (h_i - F_i x) = 0
          K(r, d1 + i) = 1.0;
          K.block(r, 0, 1, d1) = -(w / dh) * F.row(i);
          rhs(r) = -(w / dh) * h(i);
        } else {
          K.block(r, 0, 1, d1) = F.row(i);
          rhs(r) = h(i);
        }
        break;
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
  const Vector sol = cod.solve(rhs);
  if ((K * sol - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) return false;
  x = sol.head(d1);
  lambda = sol.segment(d1, m);
  return true;
}

bool pattern_consistent(const ProblemSpec& spec, const std::vector<Zone>& zones, const Vector& y,
                        const Vector& lambda, double tol) {
  const auto& g = spec.g();
  const double w = g.weight();
  const bool huber = g.is_huber();
  const double dh = huber ? std::get<HuberSmoothedL1>(g.variant()).delta : 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    switch (zones[static_cast<std::size_t>(i)]) {
      case Zone::Positive:
        if (y(i) < (huber ? dh : 0.0) - tol) return false;
        break;
      case Zone::Negative:
        if (y(i) > -(huber ? dh : 0.0) + tol) return false;
        break;
      case Zone::Centre:
        if (huber) {
          if (std::abs(y(i)) > dh + tol) return false;
        } else if (std::abs(lambda(i)) > w + tol) {
          return false;
        }
        break;
    }
  }
  return true;
}

}  // namespace

SaddlePoint enumerate_sign_patterns(const ProblemSpec& spec, double tol) {
  const auto sigma = spec.g_identity_sign();
  if (!sigma) throw UsageError("sign-pattern enumeration needs G = +-I");
  if (spec.d2() > kMaxEnumerationDim) {
    throw UsageError("sign-pattern enumeration limited to d2 <= 12");
  }
  if (!(spec.g().is_l1() || spec.g().is_huber())) {
    throw UsageError("sign-pattern enumeration needs g l1 or huber");
  }
  if (!(spec.f().is_quadratic() || spec.f().is_indicator())) {
    throw UsageError("sign-pattern enumeration needs f quadratic or affine indicator");
  }
  const Index d2 = spec.d2();
  std::vector<Zone> zones(static_cast<std::size_t>(d2), Zone::Centre);
  std::int64_t total = 1;
  for (Index i = 0; i < d2; ++i) total *= 3;

  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t code = 0; code < total; ++code) {
    std::int64_t c = code;
    for (Index i = 0; i < d2; ++i) {
      const auto digit = c % 3;
      c /= 3;
      zones[static_cast<std::size_t>(i)] =
          digit == 0 ? Zone::Centre : (digit == 1 ? Zone::Positive : Zone::Negative);
    }
    Vector x;
    Vector lambda;
    if (!solve_pattern(spec, zones, *sigma, x, lambda)) continue;
    Vector y = *sigma * (spec.h() - spec.F() * x);
    if (spec.g().is_l1()) {
      // Centre coordinates are exactly zero; rounding would flip the subgradient.
      for (Index i = 0; i < d2; ++i) {
        if (zones[static_cast<std::size_t>(i)] == Zone::Centre && std::abs(y(i)) <= tol) y(i) = 0.0;
      }
    }
    if (!pattern_consistent(spec, zones, y, lambda, tol)) continue;
    const double res = kkt_residuals(spec, x, y, lambda).max();
    best = std::min(best, res);
    if (res <= tol) return {x, y, lambda, res};
  }
  throw ConvergenceError("no sign pattern yields a consistent KKT point", best);
}

SaddlePoint long_run_saddle(const ProblemSpec& spec, double tol, std::int64_t max_iterations) {
  SolverConfig cfg;
  cfg.s = 1.0;
  cfg.variant = Variant::General;
  const double r = cfg.effective_r(spec);
  FactorizationCache cache;
  IterateState st = IterateState::zeros(spec);
  double best = std::numeric_limits<double>::infinity();
  SaddlePoint best_point{st.x, st.y, st.lambda, best};
  const double target = tol / 10.0;
  for (std::int64_t k = 0; k < max_iterations; ++k) {
    st = general_admm_step(st, spec, cfg.s, r, cache);
    if (k % 10 != 9 && k + 1 != max_iterations) continue;
    const double res = kkt_residuals(spec, st.x, st.y, st.lambda).max();
    if (res < best) {
      best = res;
      best_point = {st.x, st.y, st.lambda, res};
    }
    if (res <= target) return best_point;
  }
  std::ostringstream os;
  os << "long-run oracle did not reach KKT residual " << target << " in " << max_iterations
     << " iterations";
  throw ConvergenceError(os.str(), best);
}

SaddlePoint saddle_point_oracle(const ProblemSpec& spec, double tol, OracleMode mode,
                                std::int64_t max_iterations) {
  if (!(tol >= 1e-12)) throw ParameterError("oracle tolerance must be at least 1e-12");
  switch (mode) {
    case OracleMode::Enumeration:
      return enumerate_sign_patterns(spec, tol);
    case OracleMode::LongRun:
      return long_run_saddle(spec, tol, max_iterations);
    case OracleMode::Auto:
      break;
  }
  if (spec.g_identity_sign() && spec.d2() <= kMaxEnumerationDim) {
    try {
      return enumerate_sign_patterns(spec, tol);
    } catch (const ConvergenceError&) {
      // Rank-deficient patterns can hide the solution; fall through.
    }
  }
  return long_run_saddle(spec, tol, max_iterations);
}

}  // namespace admmcert
