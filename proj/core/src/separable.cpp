#include "admmcert/separable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "admmcert/errors.hpp"

namespace admmcert {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRankTolerance = 1e-10;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError(std::string(name) + " must be a positive finite scalar");
  }
}

}  // namespace

SeparableFunction::SeparableFunction(Variant v) : variant_(std::move(v)) {}

SeparableFunction SeparableFunction::quadratic(Matrix A, Vector b) {
  if (A.rows() == 0 || A.cols() == 0) throw DimensionError("empty data matrix");
  if (b.size() != A.rows()) {
    throw DimensionError("quadratic: b has " + std::to_string(b.size()) + " entries, A has " +
                         std::to_string(A.rows()) + " rows");
  }
  return SeparableFunction(Quadratic{std::move(A), std::move(b)});
}

SeparableFunction SeparableFunction::scaled_l1(double w) {
  require_positive(w, "l1 weight w");
  return SeparableFunction(ScaledL1{w});
}

SeparableFunction SeparableFunction::huber(double w, double delta) {
  require_positive(w, "huber weight w");
  require_positive(delta, "huber delta");
  return SeparableFunction(HuberSmoothedL1{w, delta});
}

SeparableFunction SeparableFunction::affine_indicator(Matrix A, Vector b) {
  if (A.rows() == 0 || A.cols() == 0) throw DimensionError("empty data matrix");
  if (b.size() != A.rows()) {
    throw DimensionError("indicator: b has " + std::to_string(b.size()) + " entries, A has " +
                         std::to_string(A.rows()) + " rows");
  }
  // Full row rank of A <=> A^T has full column rank.
  Eigen::ColPivHouseholderQR<Matrix> qr(A.transpose());
  qr.setThreshold(kRankTolerance);
  if (qr.rank() < A.rows()) throw NumericalError("indicator set ill-posed");

  Matrix q = qr.householderQ() * Matrix::Identity(A.cols(), A.rows());
  SeparableFunction fn(AffineIndicator{std::move(A), std::move(b)});
  fn.range_basis_ = std::make_shared<const Matrix>(std::move(q));
  return fn;
}

std::string SeparableFunction::kind_name() const {
  return std::visit(Overloaded{[](const Quadratic&) { return std::string("quadratic"); },
                               [](const ScaledL1&) { return std::string("l1"); },
                               [](const AffineIndicator&) { return std::string("indicator"); },
                               [](const HuberSmoothedL1&) { return std::string("huber"); }},
                    variant_);
}

Index SeparableFunction::required_dim() const {
  if (const auto* q = std::get_if<Quadratic>(&variant_)) return q->A.cols();
  if (const auto* a = std::get_if<AffineIndicator>(&variant_)) return a->A.cols();
  return -1;
}

const Matrix& SeparableFunction::data_matrix() const {
  if (const auto* q = std::get_if<Quadratic>(&variant_)) return q->A;
  if (const auto* a = std::get_if<AffineIndicator>(&variant_)) return a->A;
  throw UsageError(kind_name() + " carries no data matrix");
}

const Vector& SeparableFunction::data_vector() const {
  if (const auto* q = std::get_if<Quadratic>(&variant_)) return q->b;
  if (const auto* a = std::get_if<AffineIndicator>(&variant_)) return a->b;
  throw UsageError(kind_name() + " carries no data vector");
}

double SeparableFunction::weight() const {
  if (const auto* l = std::get_if<ScaledL1>(&variant_)) return l->w;
  if (const auto* h = std::get_if<HuberSmoothedL1>(&variant_)) return h->w;
  throw UsageError(kind_name() + " carries no weight");
}

double SeparableFunction::feasibility_tolerance() const {
  if (const auto* a = std::get_if<AffineIndicator>(&variant_)) return 1e-8 * (1.0 + a->b.norm());
  return 0.0;
}

double SeparableFunction::value(const Vector& x) const {
  return std::visit(
      Overloaded{
          [&](const Quadratic& q) { return (q.A * x - q.b).squaredNorm(); },
          [&](const ScaledL1& l) { return l.w * x.lpNorm<1>(); },
          [&](const AffineIndicator& a) {
            return (a.A * x - a.b).norm() <= feasibility_tolerance() ? 0.0 : kInf;
          },
          [&](const HuberSmoothedL1& h) {
            double sum = 0.0;
            for (Index i = 0; i < x.size(); ++i) {
              const double ax = std::abs(x[i]);
              sum += ax <= h.delta ? x[i] * x[i] / (2.0 * h.delta) : ax - 0.5 * h.delta;
            }
            return h.w * sum;
          }},
      variant_);
}

Vector SeparableFunction::gradient(const Vector& x) const {
  if (const auto* q = std::get_if<Quadratic>(&variant_)) {
    return 2.0 * (q->A.transpose() * (q->A * x - q->b));
  }
  if (const auto* h = std::get_if<HuberSmoothedL1>(&variant_)) {
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) g[i] = h->w * std::clamp(x[i] / h->delta, -1.0, 1.0);
    return g;
  }
  throw UsageError("gradient requested for nonsmooth function " + kind_name());
}

Matrix SeparableFunction::hessian(const Vector& x) const {
  if (const auto* q = std::get_if<Quadratic>(&variant_)) return 2.0 * (q->A.transpose() * q->A);
  if (const auto* h = std::get_if<HuberSmoothedL1>(&variant_)) {
    Vector d(x.size());
    for (Index i = 0; i < x.size(); ++i) d[i] = std::abs(x[i]) <= h->delta ? h->w / h->delta : 0.0;
    return d.asDiagonal();
  }
  throw UsageError("hessian requested for nonsmooth function " + kind_name());
}

double SeparableFunction::subgradient_distance(const Vector& x, const Vector& v) const {
  return std::visit(
      Overloaded{[&](const Quadratic&) { return (v - gradient(x)).norm(); },
                 [&](const HuberSmoothedL1&) { return (v - gradient(x)).norm(); },
                 [&](const ScaledL1& l) {
                   double sq = 0.0;
                   for (Index i = 0; i < x.size(); ++i) {
                     double d;
                     if (x[i] == 0.0) {
                       d = std::max(std::abs(v[i]) - l.w, 0.0);
                     } else {
                       d = v[i] - (x[i] > 0.0 ? l.w : -l.w);
                     }
                     sq += d * d;
                   }
                   return std::sqrt(sq);
                 },
                 [&](const AffineIndicator& a) {
                   if ((a.A * x - a.b).norm() > feasibility_tolerance()) return kInf;
                   // Normal cone of an affine set is range(A^T).
                   const Matrix& q = *range_basis_;
                   return (v - q * (q.transpose() * v)).norm();
                 }},
      variant_);
}

double SeparableFunction::strong_convexity_modulus() const {
  if (const auto* q = std::get_if<Quadratic>(&variant_)) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(q->A.transpose() * q->A, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    // Numerically singular A^T A carries no usable modulus.
    if (lo <= 1e-12 * std::max(hi, 1.0)) return 0.0;
    return 2.0 * lo;
  }
  return 0.0;
}

}  // namespace admmcert
