#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "admmcert/problem.hpp"

namespace admmcert {

/// Portable unit-normal stream: std::mt19937_64, 53-bit uniforms
/// u = (bits >> 11) * 2^-53, and the cosine branch of Box-Muller
/// z = sqrt(-2 ln(1 - u1)) cos(2 pi u2). Two engine draws per normal.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  Matrix normal_matrix(Index rows, Index cols);
  Vector normal_vector(Index n);

 private:
  std::mt19937_64 engine_;
};

/// (d-1) x d matrix with rows e_i - e_{i+1}.
Matrix first_difference(Index d);
/// (d-2) x d matrix with rows e_i - 2 e_{i+1} + e_{i+2}.
Matrix second_difference(Index d);

/// f = (x - 1)^2, g = |y|, x - y = 0.
ProblemSpec scalar_lasso();

/// A ~ N(0,1)/sqrt(rows), `sparsity`-sparse ground truth, noise 0.01,
/// w = 0.2 ||2 A^T b||_inf, F = I.
ProblemSpec random_lasso(Index rows, Index d, Index sparsity, std::uint64_t seed);

/// Denoising (A = I) of a noisy piecewise-constant signal with first-difference F.
ProblemSpec tv_denoising(Index d, std::uint64_t seed, double w = 0.5);

/// Denoising of a noisy piecewise-linear signal with second-difference F.
ProblemSpec trend_filtering(Index d, std::uint64_t seed, double w = 1.0);

/// A ~ N(0,1)/sqrt(rows), b = A x_true with a `sparsity`-sparse x_true.
ProblemSpec random_basis_pursuit(Index rows, Index d, Index sparsity, std::uint64_t seed);

/// Lasso whose A has every row orthogonal to the ones vector and F the first
/// difference, so 2s A^T A + F^T F is singular.
ProblemSpec rank_deficient_lasso(Index d, std::uint64_t seed);

struct NamedInstance {
  std::string name;
  ProblemSpec spec;
};

/// scalar Lasso, Lasso 20x50, TV d=50, trend d=50, basis pursuit 10x30.
std::vector<NamedInstance> library_instances();

/// Lasso instances with A^T A positive definite (scalar and 40x10).
std::vector<NamedInstance> strongly_convex_instances();

/// Instances with d2 <= 12 for cross-checking the two saddle oracles.
std::vector<NamedInstance> small_instances();

}  // namespace admmcert
