#include "admmcert/instances.hpp"

#include <cmath>
#include <numbers>

#include "admmcert/errors.hpp"

namespace admmcert {
namespace {

constexpr std::uint64_t kLassoSeed = 20231;
constexpr std::uint64_t kTvSeed = 20232;
constexpr std::uint64_t kTrendSeed = 20233;
constexpr std::uint64_t kBasisPursuitSeed = 20234;
constexpr std::uint64_t kTallSeed = 20235;

Vector sparse_truth(NormalStream& rng, Index d, Index sparsity) {
  if (sparsity < 0 || sparsity > d) throw ParameterError("sparsity must lie in [0, d]");
  std::vector<Index> order(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) order[static_cast<std::size_t>(i)] = i;
  // Partial Fisher-Yates on the first `sparsity` slots.
  for (Index i = 0; i < sparsity; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(d - i)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  Vector x = Vector::Zero(d);
  for (Index i = 0; i < sparsity; ++i) x(order[static_cast<std::size_t>(i)]) = rng.normal();
  return x;
}

void require_positive(Index v, const char* what) {
  if (v < 1) throw ParameterError(std::string(what) + " must be positive");
}

}  // namespace

double NormalStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t NormalStream::below(std::uint64_t n) {
  if (n == 0) throw ParameterError("below(0) is empty");
  const auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return k < n ? k : n - 1;
}

Matrix NormalStream::normal_matrix(Index rows, Index cols) {
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) M(i, j) = normal();
  }
  return M;
}

Vector NormalStream::normal_vector(Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal();
  return v;
}

Matrix first_difference(Index d) {
  if (d < 2) throw ParameterError("first difference needs d >= 2");
  Matrix D = Matrix::Zero(d - 1, d);
  for (Index i = 0; i + 1 < d; ++i) {
    D(i, i) = 1.0;
    D(i, i + 1) = -1.0;
  }
  return D;
}

Matrix second_difference(Index d) {
  if (d < 3) throw ParameterError("trend filtering needs d >= 3");
  Matrix D = Matrix::Zero(d - 2, d);
  for (Index i = 0; i + 2 < d; ++i) {
    D(i, i) = 1.0;
    D(i, i + 1) = -2.0;
    D(i, i + 2) = 1.0;
  }
  return D;
}

ProblemSpec scalar_lasso() {
  return build_generalized_lasso(Matrix::Ones(1, 1), Vector::Ones(1), Matrix::Identity(1, 1), 1.0);
}

ProblemSpec random_lasso(Index rows, Index d, Index sparsity, std::uint64_t seed) {
  require_positive(rows, "rows");
  require_positive(d, "d");
  NormalStream rng(seed);
  const Matrix A = rng.normal_matrix(rows, d) / std::sqrt(static_cast<double>(rows));
  const Vector x_true = sparse_truth(rng, d, sparsity);
  const Vector b = A * x_true + 0.01 * rng.normal_vector(rows);
  double w = 0.2 * (2.0 * A.transpose() * b).lpNorm<Eigen::Infinity>();
  if (!(w > 0.0)) w = 1.0;
  return build_generalized_lasso(A, b, Matrix::Identity(d, d), w);
}

ProblemSpec tv_denoising(Index d, std::uint64_t seed, double w) {
  const Matrix F = first_difference(d);
  NormalStream rng(seed);
  Vector signal(d);
  const Index blocks = std::min<Index>(4, d);
  for (Index k = 0; k < blocks; ++k) {
    const double level = 2.0 * rng.normal();
    const Index lo = k * d / blocks;
    const Index hi = (k + 1) * d / blocks;
    for (Index i = lo; i < hi; ++i) signal(i) = level;
  }
  const Vector b = signal + 0.1 * rng.normal_vector(d);
  return build_generalized_lasso(Matrix::Identity(d, d), b, F, w);
}

ProblemSpec trend_filtering(Index d, std::uint64_t seed, double w) {
  const Matrix F = second_difference(d);
  NormalStream rng(seed);
  Vector signal(d);
  const Index pieces = std::min<Index>(3, d);
  double value = rng.normal();
  double slope = 0.0;
  for (Index k = 0; k < pieces; ++k) {
    slope = 0.2 * rng.normal();
    const Index lo = k * d / pieces;
    const Index hi = (k + 1) * d / pieces;
    for (Index i = lo; i < hi; ++i) {
      signal(i) = value;
      value += slope;
    }
  }
  const Vector b = signal + 0.1 * rng.normal_vector(d);
  return build_generalized_lasso(Matrix::Identity(d, d), b, F, w);
}

ProblemSpec random_basis_pursuit(Index rows, Index d, Index sparsity, std::uint64_t seed) {
  require_positive(rows, "rows");
  require_positive(d, "d");
  NormalStream rng(seed);
  const Matrix A = rng.normal_matrix(rows, d) / std::sqrt(static_cast<double>(rows));
  const Vector x_true = sparse_truth(rng, d, sparsity);
  return build_basis_pursuit(A, A * x_true);
}

ProblemSpec rank_deficient_lasso(Index d, std::uint64_t seed) {
  if (d < 3) throw ParameterError("rank-deficient Lasso needs d >= 3");
  NormalStream rng(seed);
  Matrix A = rng.normal_matrix(d - 1, d);
  const Vector ones = Vector::Ones(d) / std::sqrt(static_cast<double>(d));
  A -= (A * ones) * ones.transpose();
  const Vector b = rng.normal_vector(d - 1);
  return build_generalized_lasso(A, b, first_difference(d), 0.5);
}

std::vector<NamedInstance> library_instances() {
  std::vector<NamedInstance> out;
  out.push_back({"scalar_lasso", scalar_lasso()});
  out.push_back({"lasso_20x50", random_lasso(20, 50, 5, kLassoSeed)});
  out.push_back({"tv_50", tv_denoising(50, kTvSeed)});
  out.push_back({"trend_50", trend_filtering(50, kTrendSeed)});
  out.push_back({"basis_pursuit_10x30", random_basis_pursuit(10, 30, 3, kBasisPursuitSeed)});
  return out;
}

std::vector<NamedInstance> strongly_convex_instances() {
  std::vector<NamedInstance> out;
  out.push_back({"scalar_lasso", scalar_lasso()});
  out.push_back({"lasso_40x10", random_lasso(40, 10, 3, kTallSeed)});
  return out;
}

std::vector<NamedInstance> small_instances() {
  std::vector<NamedInstance> out;
  out.push_back({"scalar_lasso", scalar_lasso()});
  out.push_back({"lasso_40x10", random_lasso(40, 10, 3, kTallSeed)});
  out.push_back({"lasso_6x8", random_lasso(6, 8, 2, kLassoSeed + 100)});
  out.push_back({"tv_8", tv_denoising(8, kTvSeed + 100)});
  out.push_back({"trend_10", trend_filtering(10, kTrendSeed + 100)});
  out.push_back({"basis_pursuit_4x8", random_basis_pursuit(4, 8, 2, kBasisPursuitSeed + 100)});
  return out;
}

}  // namespace admmcert
