#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>

#include "admmcert/problem.hpp"
#include "admmcert/types.hpp"

namespace admmcert {

/// Componentwise sign(v_i) * max(|v_i| - t, 0). Ties |v_i| == t map to 0.
Vector soft_threshold(const Vector& v, double t);

/// Minimizer of s*w*huber_delta(y) + 1/2 (y - u)^2, componentwise.
Vector huber_prox(const Vector& u, double s_w, double delta);

/// Cholesky factor of an x-update system matrix plus the data needed to
/// apply it. For the affine indicator the factor is of the augmented
/// matrix H + A^T A, together with the Schur complement A (H + A^T A)^-1 A^T.
struct XUpdateFactor {
  Matrix system;                  ///< matrix that was factored
  Eigen::LLT<Matrix> llt;         ///< system = L L^T
  double condition = 1.0;         ///< eigenvalue ratio of `system`
  Matrix h_inv_at;                ///< indicator only: system^-1 A^T
  Eigen::LLT<Matrix> schur_llt;   ///< indicator only: A system^-1 A^T

  /// L L^T, for verifying the factorization.
  Matrix reconstructed() const;
};

/// Factorizations of x-update system matrices keyed by
/// (problem tag, s, proximal coefficient r). Thread-safe; entries are
/// immutable once inserted.
class FactorizationCache {
 public:
  struct Key {
    std::uint64_t tag;
    double s;
    double r;  ///< 0 for the standard update
    auto operator<=>(const Key&) const = default;
  };

  /// Returns the cached factor, building it on a miss.
  std::shared_ptr<const XUpdateFactor> get(const ProblemSpec& spec, double s,
                                           std::optional<double> r);

  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<Key, std::shared_ptr<const XUpdateFactor>> entries_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

/// Maximum accepted condition estimate for an x-update system matrix.
inline constexpr double kMaxConditionNumber = 1e12;

/// Proximal linearization of the x-subproblem: adds
/// (1/2s)(r ||x - x_k||^2 - ||F(x - x_k)||^2).
struct ProximalTerm {
  double r;
  Vector x_k;
};

/// argmin_x f(x) + (1/2s) ||Fx - target||^2 [+ proximal term], for f
/// Quadratic or AffineIndicator.
Vector x_subproblem(const ProblemSpec& spec, const Vector& target, double s,
                    FactorizationCache& cache, const ProximalTerm* prox = nullptr);

/// argmin_y g(y) + (1/2s) ||Gy - target||^2 for G = +-I and g ScaledL1 or
/// HuberSmoothedL1.
Vector y_subproblem(const ProblemSpec& spec, const Vector& target, double s);

/// x-target h - G y_k - s lambda_k shared by every x-update.
Vector x_target(const ProblemSpec& spec, const Vector& y_k, const Vector& lambda_k, double s);

/// Standard x-update for f Quadratic: solves
/// (2s A^T A + F^T F) x = 2s A^T b - F^T (G y_k - h + s lambda_k).
Vector quadratic_x_update(const ProblemSpec& spec, const Vector& y_k, const Vector& lambda_k,
                          double s, FactorizationCache& cache);

/// Standard x-update for f the affine indicator (equality-constrained least squares).
Vector indicator_x_update(const ProblemSpec& spec, const Vector& y_k, const Vector& lambda_k,
                          double s, FactorizationCache& cache);
Vector indicator_x_update(const ProblemSpec& spec, const Vector& y_k, const Vector& lambda_k,
                          double s);

/// y-update: shrink of G^T-signed (h - F x_{k+1} - s lambda_k) with threshold s*w.
Vector l1_y_update(const ProblemSpec& spec, const Vector& x_next, const Vector& lambda_k, double s);

/// r-proximal x-update; requires r > ||F^T F||. For f Quadratic the system
/// matrix is 2s A^T A + r I.
Vector proximal_x_update_general(const ProblemSpec& spec, const Vector& x_k, const Vector& y_k,
                                 const Vector& lambda_k, double s, double r,
                                 FactorizationCache& cache);

/// Throws ParameterError unless r > ||F^T F||.
void require_proximal_coefficient(const ProblemSpec& spec, double r);

}  // namespace admmcert
