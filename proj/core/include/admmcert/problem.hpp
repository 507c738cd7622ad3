#pragma once

#include <cstdint>
#include <optional>

#include "admmcert/separable.hpp"
#include "admmcert/types.hpp"

namespace admmcert {

/// min f(x) + g(y)  subject to  Fx + Gy = h,
/// with x in R^d1, y in R^d2 and h in R^m.
class ProblemSpec {
 public:
  /// Validates shapes and checks that {Fx + Gy = h} is nonempty via least
  /// squares (residual threshold 1e-10).
  ProblemSpec(SeparableFunction f, SeparableFunction g, Matrix F, Matrix G, Vector h);

  const SeparableFunction& f() const noexcept { return f_; }
  const SeparableFunction& g() const noexcept { return g_; }
  const Matrix& F() const noexcept { return F_; }
  const Matrix& G() const noexcept { return G_; }
  const Vector& h() const noexcept { return h_; }

  Index d1() const noexcept { return F_.cols(); }
  Index d2() const noexcept { return G_.cols(); }
  Index m() const noexcept { return F_.rows(); }

  /// Content hash; identifies the matrices for factorization caching.
  std::uint64_t tag() const noexcept { return tag_; }

  /// Fx + Gy - h.
  Vector constraint_residual(const Vector& x, const Vector& y) const;

  /// c when G == c * I with c in {+1, -1}.
  std::optional<double> g_identity_sign() const noexcept { return g_sign_; }

  /// Spectral norm of F^T F (its largest eigenvalue).
  double ftf_norm() const noexcept { return ftf_norm_; }

  /// Same spec with an l1 g replaced by its Huber smoothing.
  ProblemSpec smoothed(double delta_huber) const;

 private:
  SeparableFunction f_;
  SeparableFunction g_;
  Matrix F_;
  Matrix G_;
  Vector h_;
  std::uint64_t tag_ = 0;
  std::optional<double> g_sign_;
  double ftf_norm_ = 0.0;
};

/// f(x) = ||Ax - b||^2, g(y) = w ||y||_1, constraint F_reg x - y = 0.
ProblemSpec build_generalized_lasso(const Matrix& A, const Vector& b, const Matrix& F_reg, double w);

/// f = indicator{Ax = b}, g = ||.||_1, constraint x - y = 0.
ProblemSpec build_basis_pursuit(const Matrix& A, const Vector& b);

/// f(x) + g(y) + <lambda, Fx + Gy - h>; +inf when the indicator is violated.
double lagrangian(const ProblemSpec& spec, const Vector& x, const Vector& y, const Vector& lambda);

/// Lagrangian plus (1/2s) ||Fx + Gy - h||^2.
double augmented_lagrangian(const ProblemSpec& spec, const Vector& x, const Vector& y,
                            const Vector& lambda, double s);

struct KktResiduals {
  double primal = 0.0;  ///< ||Fx + Gy - h||
  double dual_x = 0.0;  ///< dist(-F^T lambda, df(x))
  double dual_y = 0.0;  ///< dist(-G^T lambda, dg(y))

  double max() const noexcept;
};

KktResiduals kkt_residuals(const ProblemSpec& spec, const Vector& x, const Vector& y,
                           const Vector& lambda);

struct SaddlePoint {
  Vector x_star;
  Vector y_star;
  Vector lambda_star;
  double kkt_residual = 0.0;
};

/// Objective f(x) + g(y).
double objective(const ProblemSpec& spec, const Vector& x, const Vector& y);

}  // namespace admmcert
