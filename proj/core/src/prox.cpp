#include "admmcert/prox.hpp"

#include <cmath>
#include <sstream>

#include "admmcert/errors.hpp"

namespace admmcert {
namespace {

double condition_estimate(const Matrix& spd) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(spd, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

[[noreturn]] void throw_ill_conditioned(const char* what, double cond) {
  std::ostringstream os;
  os << what << " is singular or ill-conditioned (condition estimate " << cond
     << "); use the general r-proximal variant";
  throw NumericalError(os.str());
}

std::shared_ptr<const XUpdateFactor> build_factor(const ProblemSpec& spec, double s,
                                                  std::optional<double> r) {
  const auto& f = spec.f();
  const Matrix& F = spec.F();
  auto out = std::make_shared<XUpdateFactor>();

  if (f.is_quadratic()) {
    const Matrix& A = f.data_matrix();
    const Matrix ata = A.transpose() * A;
    out->system = 2.0 * s * ata;
    if (r) {
      out->system.diagonal().array() += *r;
    } else {
      out->system += F.transpose() * F;
    }
  } else if (f.is_indicator()) {
    const Matrix& A = f.data_matrix();
    // Adding A^T A leaves the minimizer over {Ax = b} unchanged and makes the
    // matrix definite whenever H is definite on null(A).
    out->system = A.transpose() * A;
    if (r) {
      out->system.diagonal().array() += *r;
    } else {
      out->system += F.transpose() * F;
    }
  } else {
    throw UsageError("x-update needs f quadratic or affine indicator, got " + f.kind_name());
  }

  out->condition = condition_estimate(out->system);
  if (out->condition > kMaxConditionNumber) throw_ill_conditioned("x-update system matrix", out->condition);
  out->llt.compute(out->system);
  if (out->llt.info() != Eigen::Success) throw_ill_conditioned("x-update system matrix", out->condition);

  if (f.is_indicator()) {
    const Matrix& A = f.data_matrix();
    out->h_inv_at = out->llt.solve(A.transpose());
    const Matrix schur = A * out->h_inv_at;
    const double cond = condition_estimate(schur);
    if (cond > kMaxConditionNumber) throw_ill_conditioned("indicator KKT Schur complement", cond);
    out->schur_llt.compute(schur);
    if (out->schur_llt.info() != Eigen::Success) {
      throw_ill_conditioned("indicator KKT Schur complement", cond);
    }
  }
  return out;
}

}  // namespace

Vector soft_threshold(const Vector& v, double t) {
  if (!(t >= 0.0)) throw ParameterError("soft threshold t must be nonnegative");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    out[i] = a <= t ? 0.0 : std::copysign(a - t, v[i]);
  }
  return out;
}

Vector huber_prox(const Vector& u, double s_w, double delta) {
  if (!(s_w >= 0.0) || !(delta > 0.0)) throw ParameterError("huber prox needs s*w >= 0, delta > 0");
  Vector out(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    out[i] = a <= delta + s_w ? u[i] / (1.0 + s_w / delta) : std::copysign(a - s_w, u[i]);
  }
  return out;
}

Matrix XUpdateFactor::reconstructed() const {
  const Matrix L = llt.matrixL();
  return L * L.transpose();
}

std::shared_ptr<const XUpdateFactor> FactorizationCache::get(const ProblemSpec& spec, double s,
                                                            std::optional<double> r) {
  const Key key{spec.tag(), s, r.value_or(0.0)};
  {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto factor = build_factor(spec, s, r);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.emplace(key, std::move(factor));
  if (inserted) {
    ++misses_;
  } else {
    ++hits_;
  }
  return it->second;
}

std::size_t FactorizationCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}
std::size_t FactorizationCache::hits() const { return hits_.load(); }
std::size_t FactorizationCache::misses() const { return misses_.load(); }

void require_proximal_coefficient(const ProblemSpec& spec, double r) {
  if (!(r > spec.ftf_norm())) {
    std::ostringstream os;
    os << "proximal coefficient r = " << r
       << " must be greater than the maximum eigenvalue of F^T F (" << spec.ftf_norm() << ")";
    throw ParameterError(os.str());
  }
}

Vector x_target(const ProblemSpec& spec, const Vector& y_k, const Vector& lambda_k, double s) {
  return spec.h() - spec.G() * y_k - s * lambda_k;
}

Vector x_subproblem(const ProblemSpec& spec, const Vector& target, double s,
                    FactorizationCache& cache, const ProximalTerm* prox) {
  if (!(s > 0.0)) throw ParameterError("step size s must be positive");
  if (target.size() != spec.m()) throw DimensionError("x-update target has wrong length");
  if (prox) require_proximal_coefficient(spec, prox->r);

  const auto factor = cache.get(spec, s, prox ? std::optional<double>(prox->r) : std::nullopt);
  const Matrix& F = spec.F();
  Vector rhs = F.transpose() * target;
  if (prox) rhs += prox->r * prox->x_k - F.transpose() * (F * prox->x_k);

  const auto& f = spec.f();
  if (f.is_quadratic()) {
    rhs += 2.0 * s * (f.data_matrix().transpose() * f.data_vector());
    return factor->llt.solve(rhs);
  }
  const Matrix& A = f.data_matrix();
  const Vector& b = f.data_vector();
  rhs += A.transpose() * b;
  const Vector base = factor->llt.solve(rhs);
  const Vector nu = factor->schur_llt.solve(A * base - b);
  return base - factor->h_inv_at * nu;
}

Vector y_subproblem(const ProblemSpec& spec, const Vector& target, double s) {
  if (!(s > 0.0)) throw ParameterError("step size s must be positive");
  const auto c = spec.g_identity_sign();
  if (!c) throw UsageError("general G y-update unsupported");
  const Vector u = *c * target;
  const auto& g = spec.g();
  if (g.is_l1()) return soft_threshold(u, s * g.weight());
  if (const auto* h = std::get_if<HuberSmoothedL1>(&g.variant())) return huber_prox(u, s * h->w, h->delta);
  throw UsageError("y-update needs g l1 or huber, got " + g.kind_name());
}

Vector quadratic_x_update(const ProblemSpec& spec, const Vector& y_k, const Vector& lambda_k,
                          double s, FactorizationCache& cache) {
  if (!spec.f().is_quadratic()) throw UsageError("quadratic_x_update needs f quadratic");
  return x_subproblem(spec, x_target(spec, y_k, lambda_k, s), s, cache);
}

Vector indicator_x_update(const ProblemSpec& spec, const Vector& y_k, const Vector& lambda_k,
                          double s, FactorizationCache& cache) {
  if (!spec.f().is_indicator()) throw UsageError("indicator_x_update needs f affine indicator");
  return x_subproblem(spec, x_target(spec, y_k, lambda_k, s), s, cache);
}

Vector indicator_x_update(const ProblemSpec& spec, const Vector& y_k, const Vector& lambda_k,
                          double s) {
  FactorizationCache scratch;
  return indicator_x_update(spec, y_k, lambda_k, s, scratch);
}

Vector l1_y_update(const ProblemSpec& spec, const Vector& x_next, const Vector& lambda_k, double s) {
  return y_subproblem(spec, spec.h() - spec.F() * x_next - s * lambda_k, s);
}

Vector proximal_x_update_general(const ProblemSpec& spec, const Vector& x_k, const Vector& y_k,
                                 const Vector& lambda_k, double s, double r,
                                 FactorizationCache& cache) {
  const ProximalTerm prox{r, x_k};
  return x_subproblem(spec, x_target(spec, y_k, lambda_k, s), s, cache, &prox);
}

}  // namespace admmcert
