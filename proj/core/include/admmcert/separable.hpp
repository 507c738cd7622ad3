#pragma once

#include <memory>
#include <string>
#include <variant>

#include "admmcert/types.hpp"

namespace admmcert {

/// f(x) = ||Ax - b||^2. No 1/2 factor: the strong-convexity modulus is
/// 2 * lambda_min(A^T A).
struct Quadratic {
  Matrix A;
  Vector b;
};

/// f(x) = w * ||x||_1.
struct ScaledL1 {
  double w;
};

/// f(x) = 0 on {x : Ax = b}, +inf elsewhere. A has full row rank.
struct AffineIndicator {
  Matrix A;
  Vector b;
};

/// Coordinatewise Huber smoothing of w*|x|: w*x^2/(2 delta) for |x| <= delta,
/// w*(|x| - delta/2) otherwise. C^1, convex, bounded above by w*|x|.
struct HuberSmoothedL1 {
  double w;
  double delta;
};

/// A closed, proper, convex function from the fixed family used by the
/// problem model. Values are immutable after construction.
class SeparableFunction {
 public:
  using Variant = std::variant<Quadratic, ScaledL1, AffineIndicator, HuberSmoothedL1>;

  static SeparableFunction quadratic(Matrix A, Vector b);
  static SeparableFunction scaled_l1(double w);
  /// Throws NumericalError("indicator set ill-posed") when A is rank deficient.
  static SeparableFunction affine_indicator(Matrix A, Vector b);
  static SeparableFunction huber(double w, double delta);

  const Variant& variant() const noexcept { return variant_; }
  std::string kind_name() const;

  bool is_quadratic() const noexcept { return std::holds_alternative<Quadratic>(variant_); }
  bool is_l1() const noexcept { return std::holds_alternative<ScaledL1>(variant_); }
  bool is_indicator() const noexcept { return std::holds_alternative<AffineIndicator>(variant_); }
  bool is_huber() const noexcept { return std::holds_alternative<HuberSmoothedL1>(variant_); }
  /// Quadratic and Huber are differentiable everywhere.
  bool is_smooth() const noexcept { return is_quadratic() || is_huber(); }

  /// Required input dimension for the matrix-carrying variants, -1 otherwise.
  Index required_dim() const;

  /// Data matrix and vector of Quadratic / AffineIndicator.
  const Matrix& data_matrix() const;
  const Vector& data_vector() const;
  /// Weight of ScaledL1 / HuberSmoothedL1.
  double weight() const;

  /// Function value. The indicator returns +inf when ||Ax - b|| exceeds
  /// feasibility_tolerance().
  double value(const Vector& x) const;
  /// Gradient; only for smooth variants.
  Vector gradient(const Vector& x) const;
  /// Hessian (generalized at Huber kinks: taken from the quadratic side).
  Matrix hessian(const Vector& x) const;

  /// dist(v, subdifferential at x) in the Euclidean norm. +inf when x is
  /// outside the domain.
  double subgradient_distance(const Vector& x, const Vector& v) const;

  /// Absolute feasibility threshold used by the indicator at x.
  double feasibility_tolerance() const;

  /// Largest mu such that the function is mu-strongly convex (0 if none).
  double strong_convexity_modulus() const;

 private:
  explicit SeparableFunction(Variant v);

  Variant variant_;
  // Orthonormal basis of range(A^T) for the indicator's normal cone.
  std::shared_ptr<const Matrix> range_basis_;
};

}  // namespace admmcert
