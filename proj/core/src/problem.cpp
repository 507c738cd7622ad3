#include "admmcert/problem.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "admmcert/errors.hpp"

namespace admmcert {
namespace {

constexpr double kFeasibilityThreshold = 1e-10;

// FNV-1a over the raw bytes of every operand.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 1099511628211ULL;
    }
  }
  void add(std::int64_t v) { add_bytes(&v, sizeof v); }
  void add(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    add_bytes(&bits, sizeof bits);
  }
  void add(const Matrix& mat) {
    add(static_cast<std::int64_t>(mat.rows()));
    add(static_cast<std::int64_t>(mat.cols()));
    for (Index j = 0; j < mat.cols(); ++j)
      for (Index i = 0; i < mat.rows(); ++i) add(mat(i, j));
  }
  void add(const std::string& s) { add_bytes(s.data(), s.size()); }
  void add(const SeparableFunction& fn) {
    add(fn.kind_name());
    if (fn.required_dim() >= 0) {
      add(fn.data_matrix());
      add(Matrix(fn.data_vector()));
    } else {
      add(fn.weight());
      if (const auto* h = std::get_if<HuberSmoothedL1>(&fn.variant())) add(h->delta);
    }
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 14695981039346656037ULL;
};

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

ProblemSpec::ProblemSpec(SeparableFunction f, SeparableFunction g, Matrix F, Matrix G, Vector h)
    : f_(std::move(f)), g_(std::move(g)), F_(std::move(F)), G_(std::move(G)), h_(std::move(h)) {
  if (F_.rows() != G_.rows()) {
    throw DimensionError("F is " + shape(F_) + " but G is " + shape(G_) + ": row counts differ");
  }
  if (h_.size() != F_.rows()) {
    throw DimensionError("h has " + std::to_string(h_.size()) + " entries, expected " +
                         std::to_string(F_.rows()));
  }
  if (F_.rows() == 0 || F_.cols() == 0 || G_.cols() == 0) {
    throw DimensionError("constraint matrices must be nonempty");
  }
  if (f_.required_dim() >= 0 && f_.required_dim() != d1()) {
    throw DimensionError("f data matrix has " + std::to_string(f_.required_dim()) +
                         " columns, F has " + std::to_string(d1()));
  }
  if (g_.required_dim() >= 0 && g_.required_dim() != d2()) {
    throw DimensionError("g data matrix has " + std::to_string(g_.required_dim()) +
                         " columns, G has " + std::to_string(d2()));
  }

  Matrix FG(m(), d1() + d2());
  FG << F_, G_;
  const Vector z = FG.completeOrthogonalDecomposition().solve(h_);
  if ((FG * z - h_).norm() > kFeasibilityThreshold * (1.0 + h_.norm())) {
    throw NumericalError("constraint Fx + Gy = h is infeasible");
  }

  if (G_.rows() == G_.cols()) {
    for (const double c : {1.0, -1.0}) {
      if (G_ == c * Matrix::Identity(G_.rows(), G_.cols())) g_sign_ = c;
    }
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(F_.transpose() * F_, Eigen::EigenvaluesOnly);
  ftf_norm_ = std::max(0.0, eig.eigenvalues().maxCoeff());

  Fnv1a hash;
  hash.add(f_);
  hash.add(g_);
  hash.add(F_);
  hash.add(G_);
  hash.add(Matrix(h_));
  tag_ = hash.value();
}

Vector ProblemSpec::constraint_residual(const Vector& x, const Vector& y) const {
  if (x.size() != d1() || y.size() != d2()) {
    throw DimensionError("state has dims (" + std::to_string(x.size()) + ", " +
                         std::to_string(y.size()) + "), expected (" + std::to_string(d1()) + ", " +
                         std::to_string(d2()) + ")");
  }
  return F_ * x + G_ * y - h_;
}

ProblemSpec ProblemSpec::smoothed(double delta_huber) const {
  if (!(delta_huber > 0.0) || !std::isfinite(delta_huber)) {
    throw ParameterError("huber smoothing width must be positive");
  }
  if (!g_.is_l1()) return *this;
  return ProblemSpec(f_, SeparableFunction::huber(g_.weight(), delta_huber), F_, G_, h_);
}

ProblemSpec build_generalized_lasso(const Matrix& A, const Vector& b, const Matrix& F_reg, double w) {
  if (A.rows() == 0) throw DimensionError("empty data matrix");
  if (b.size() != A.rows()) {
    throw DimensionError("b has " + std::to_string(b.size()) + " entries, A has " +
                         std::to_string(A.rows()) + " rows");
  }
  if (F_reg.cols() != A.cols()) {
    throw DimensionError("F_reg has " + std::to_string(F_reg.cols()) + " columns, A has " +
                         std::to_string(A.cols()));
  }
  if (!(w > 0.0)) throw ParameterError("regularization weight w must be positive");
  const Index m = F_reg.rows();
  return ProblemSpec(SeparableFunction::quadratic(A, b), SeparableFunction::scaled_l1(w), F_reg,
                     -Matrix::Identity(m, m), Vector::Zero(m));
}

ProblemSpec build_basis_pursuit(const Matrix& A, const Vector& b) {
  if (A.rows() == 0) throw DimensionError("empty data matrix");
  const Index d = A.cols();
  return ProblemSpec(SeparableFunction::affine_indicator(A, b), SeparableFunction::scaled_l1(1.0),
                     Matrix::Identity(d, d), -Matrix::Identity(d, d), Vector::Zero(d));
}

double objective(const ProblemSpec& spec, const Vector& x, const Vector& y) {
  return spec.f().value(x) + spec.g().value(y);
}

double lagrangian(const ProblemSpec& spec, const Vector& x, const Vector& y, const Vector& lambda) {
  const double fg = objective(spec, x, y);
  if (!std::isfinite(fg)) return std::numeric_limits<double>::infinity();
  return fg + lambda.dot(spec.constraint_residual(x, y));
}

double augmented_lagrangian(const ProblemSpec& spec, const Vector& x, const Vector& y,
                            const Vector& lambda, double s) {
  if (!(s > 0.0)) throw ParameterError("step size s must be positive");
  const double base = lagrangian(spec, x, y, lambda);
  if (!std::isfinite(base)) return base;
  return base + spec.constraint_residual(x, y).squaredNorm() / (2.0 * s);
}

double KktResiduals::max() const noexcept { return std::max({primal, dual_x, dual_y}); }

KktResiduals kkt_residuals(const ProblemSpec& spec, const Vector& x, const Vector& y,
                           const Vector& lambda) {
  if (lambda.size() != spec.m()) throw DimensionError("lambda has wrong length");
  KktResiduals r;
  r.primal = spec.constraint_residual(x, y).norm();
  r.dual_x = spec.f().subgradient_distance(x, -(spec.F().transpose() * lambda));
  r.dual_y = spec.g().subgradient_distance(y, -(spec.G().transpose() * lambda));
  return r;
}

}  // namespace admmcert
