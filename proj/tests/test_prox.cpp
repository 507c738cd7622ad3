#include <cmath>

#include <gtest/gtest.h>

#include "admmcert/errors.hpp"
#include "admmcert/instances.hpp"
#include "admmcert/oracle.hpp"
#include "admmcert/prox.hpp"
#include "admmcert/solver.hpp"
#include "support.hpp"

using namespace admmcert;
using namespace admmcert::testing;

TEST(SoftThreshold, Examples) {
  EXPECT_EQ(soft_threshold(vec({3}), 1.0)(0), 2.0);
  EXPECT_EQ(soft_threshold(vec({-0.5}), 1.0)(0), 0.0);
  EXPECT_EQ(soft_threshold(vec({0}), 5.0)(0), 0.0);
  EXPECT_EQ(soft_threshold(vec({1.0}), 1.0)(0), 0.0);
  EXPECT_EQ(soft_threshold(vec({-4}), 1.5)(0), -2.5);
  EXPECT_THROW(soft_threshold(vec({1}), -1e-3), ParameterError);
}

TEST(SoftThreshold, Nonexpansive) {
  NormalStream rng(21);
  for (int i = 0; i < 200; ++i) {
    const Vector u = rng.normal_vector(5);
    const Vector v = rng.normal_vector(5);
    const double t = 2.0 * rng.uniform();
    EXPECT_LE((soft_threshold(u, t) - soft_threshold(v, t)).norm(), (u - v).norm() + 1e-15);
  }
}

TEST(HuberProx, MatchesScalarMinimizer) {
  // Bisection on the derivative of s_w * huber(y) + (y - u)^2 / 2.
  const double sw = 0.8;
  const double dh = 0.3;
  auto dhuber = [dh](double y) { return std::abs(y) <= dh ? y / dh : (y > 0 ? 1.0 : -1.0); };
  for (double u : {-3.0, -0.9, -0.2, 0.0, 0.05, 0.5, 1.2, 4.0}) {
    auto slope = [&](double y) { return sw * dhuber(y) + (y - u); };
    double lo = -10.0;
    double hi = 10.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) < 0 ? lo : hi) = mid;
    }
    EXPECT_NEAR(huber_prox(vec({u}), sw, dh)(0), 0.5 * (lo + hi), 1e-14) << "u = " << u;
  }
}

TEST(QuadraticXUpdate, HandSolvedScalar) {
  // f = x^2, F = 1, G = -1, h = 0, s = 1, y = 2, lambda = 0: 2x + (x - 2) = 0.
  const ProblemSpec p = build_generalized_lasso(one(1), vec({0}), one(1), 1.0);
  FactorizationCache cache;
  EXPECT_NEAR(quadratic_x_update(p, vec({2}), vec({0}), 1.0, cache)(0), 2.0 / 3.0, 1e-15);
}

TEST(QuadraticXUpdate, ZeroDataFixedPoint) {
  const ProblemSpec p = random_lasso(8, 5, 2, 4);
  const ProblemSpec z = build_generalized_lasso(p.f().data_matrix(), Vector::Zero(8), p.F(), 1.0);
  FactorizationCache cache;
  EXPECT_EQ(quadratic_x_update(z, Vector::Zero(5), Vector::Zero(5), 1.0, cache).norm(), 0.0);
}

TEST(QuadraticXUpdate, StationarityAtSaddle) {
  const ProblemSpec p = random_lasso(20, 8, 3, 9);
  const SaddlePoint sp = saddle_point_oracle(p, 1e-11);
  FactorizationCache cache;
  const double s = 0.7;
  const Vector x = quadratic_x_update(p, sp.y_star, sp.lambda_star, s, cache);
  const Vector stat =
      s * p.f().gradient(x) + p.F().transpose() * (p.F() * x + p.G() * sp.y_star - p.h() +
                                                   s * sp.lambda_star);
  EXPECT_LE(stat.norm(), 1e-10);
  EXPECT_LE((x - sp.x_star).norm(), 1e-8);
}

TEST(QuadraticXUpdate, MatchesDenseSolve) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ProblemSpec p = trend_filtering(12, seed);
    NormalStream rng(seed + 100);
    const Vector y = rng.normal_vector(p.d2());
    const Vector l = rng.normal_vector(p.m());
    const double s = 0.5 + rng.uniform();
    FactorizationCache cache;
    const Vector x = quadratic_x_update(p, y, l, s, cache);
    const Matrix& A = p.f().data_matrix();
    const Matrix M = 2 * s * A.transpose() * A + p.F().transpose() * p.F();
    const Vector rhs = 2 * s * A.transpose() * p.f().data_vector() -
                       p.F().transpose() * (p.G() * y - p.h() + s * l);
    const Vector ref = M.fullPivLu().solve(rhs);
    EXPECT_LE((x - ref).norm() / ref.norm(), 1e-10);
  }
}

TEST(QuadraticXUpdate, SingularSystemPointsToProximalVariant) {
  const ProblemSpec p = rank_deficient_lasso(4, 1);
  FactorizationCache cache;
  try {
    quadratic_x_update(p, Vector::Zero(p.d2()), Vector::Zero(p.m()), 1.0, cache);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("proximal"), std::string::npos) << e.what();
  }
}

TEST(IndicatorXUpdate, PointFeasibleSet) {
  const ProblemSpec p = build_basis_pursuit(Matrix::Identity(3, 3), vec({1, -2, 5}));
  NormalStream rng(2);
  for (int i = 0; i < 5; ++i) {
    const Vector x = indicator_x_update(p, rng.normal_vector(3), rng.normal_vector(3), 1.0);
    EXPECT_LE((x - vec({1, -2, 5})).norm(), 1e-12);
  }
}

TEST(IndicatorXUpdate, ProjectionOntoLine) {
  // Target h - G y - s lambda = (2, 0) with y = (2, 0), lambda = 0.
  const ProblemSpec p = build_basis_pursuit(mat(1, 2, {1, 1}), vec({0}));
  const Vector x = indicator_x_update(p, vec({2, 0}), vec({0, 0}), 1.0);
  EXPECT_NEAR(x(0), 1.0, 1e-14);
  EXPECT_NEAR(x(1), -1.0, 1e-14);
}

TEST(IndicatorXUpdate, MatchesDenseKktSolve) {
  const ProblemSpec p = random_basis_pursuit(3, 5, 2, 8);
  NormalStream rng(81);
  const Matrix& A = p.f().data_matrix();
  const Vector& b = p.f().data_vector();
  for (int i = 0; i < 5; ++i) {
    const Vector y = rng.normal_vector(5);
    const Vector l = rng.normal_vector(5);
    const double s = 0.3 + rng.uniform();
    const Vector x = indicator_x_update(p, y, l, s);
    // min ||F x - t||^2 s.t. A x = b by the full KKT matrix.
    const Vector t = p.h() - p.G() * y - s * l;
    Matrix K = Matrix::Zero(8, 8);
    K.topLeftCorner(5, 5) = p.F().transpose() * p.F();
    K.topRightCorner(5, 3) = A.transpose();
    K.bottomLeftCorner(3, 5) = A;
    Vector rhs(8);
    rhs << p.F().transpose() * t, b;
    const Vector ref = K.fullPivLu().solve(rhs).head(5);
    EXPECT_LE((x - ref).norm(), 1e-8);
    EXPECT_LE((A * x - b).norm(), 1e-10);
  }
}

TEST(L1YUpdate, ScalarHandValue) {
  const ProblemSpec p = build_generalized_lasso(one(1), vec({1}), one(1), 1.0);
  EXPECT_EQ(l1_y_update(p, vec({0.5}), vec({0}), 1.0)(0), 0.0);
}

TEST(L1YUpdate, ZeroWeightIsPlainSolve) {
  // w -> 0 limit: a tiny weight leaves y = sigma (h - F x - s lambda) up to w.
  const ProblemSpec p = random_lasso(4, 3, 1, 2);
  const ProblemSpec q = build_generalized_lasso(p.f().data_matrix(), p.f().data_vector(), p.F(),
                                                1e-300);
  const Vector x = vec({0.3, -1.0, 2.0});
  const Vector l = vec({0.1, 0.2, -0.4});
  const Vector y = l1_y_update(q, x, l, 1.0);
  EXPECT_LE((y - (-(q.h() - q.F() * x - l))).norm(), 1e-15);
}

TEST(L1YUpdate, OptimalityMembership) {
  NormalStream rng(33);
  for (int i = 0; i < 100; ++i) {
    const ProblemSpec p = random_lasso(5, 4, 2, 1000 + static_cast<std::uint64_t>(i));
    const Vector x = rng.normal_vector(4);
    const Vector l = rng.normal_vector(4);
    const double s = 0.2 + 2.0 * rng.uniform();
    const Vector y = l1_y_update(p, x, l, s);
    const Vector v = -p.G().transpose() * (p.F() * x + p.G() * y - p.h() + s * l) / s;
    EXPECT_LE(p.g().subgradient_distance(y, v), 1e-10);
  }
}

TEST(L1YUpdate, RejectsGeneralG) {
  const ProblemSpec p(SeparableFunction::quadratic(one(1), vec({1})),
                      SeparableFunction::scaled_l1(1.0), one(1), one(2), vec({0}));
  EXPECT_THROW(l1_y_update(p, vec({1}), vec({0}), 1.0), UsageError);
}

TEST(ProximalXUpdate, BoundaryCoefficientRejected) {
  const ProblemSpec p = tv_denoising(6, 3);
  FactorizationCache cache;
  const Vector z1 = Vector::Zero(p.d1());
  const Vector zm = Vector::Zero(p.m());
  try {
    proximal_x_update_general(p, z1, zm, zm, 1.0, p.ftf_norm(), cache);
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("greater than the maximum eigenvalue"), std::string::npos);
  }
  EXPECT_NO_THROW(proximal_x_update_general(p, z1, zm, zm, 1.0, 1.01 * p.ftf_norm(), cache));
}

TEST(ProximalXUpdate, HandSolvedWithoutDataTerm) {
  // A = 0 makes f constant; F = 1, r = 2 gives x = (t + x_k) / 2.
  const ProblemSpec p = build_generalized_lasso(one(0), vec({0}), one(1), 1.0);
  FactorizationCache cache;
  const double s = 0.8;
  const Vector xk = vec({0.4});
  const Vector yk = vec({1.5});
  const Vector lk = vec({-0.25});
  const double t = 0.0 + yk(0) - s * lk(0);
  const Vector x = proximal_x_update_general(p, xk, yk, lk, s, 2.0, cache);
  EXPECT_NEAR(x(0), 0.5 * (t + xk(0)), 1e-15);

  // After the full step: x+ = x_k + G (y+ - y_k) - s lambda+.
  const IterateState next = general_admm_step(IterateState{xk, yk, lk, 0}, p, s, 2.0, cache);
  EXPECT_NEAR(next.x(0), xk(0) + p.G()(0, 0) * (next.y(0) - yk(0)) - s * next.lambda(0), 1e-14);
}

TEST(ProximalXUpdate, SystemMatrixHasNoCoupling) {
  const ProblemSpec p = rank_deficient_lasso(5, 2);
  FactorizationCache cache;
  const double r = 1.5 * p.ftf_norm();
  const auto factor = cache.get(p, 0.5, r);
  const Matrix& A = p.f().data_matrix();
  const Matrix expect = 2 * 0.5 * A.transpose() * A + r * Matrix::Identity(5, 5);
  EXPECT_LE((factor->system - expect).norm(), 1e-14 * expect.norm());
}

TEST(FactorizationCache, ReconstructsAndReuses) {
  const ProblemSpec p = trend_filtering(15, 4);
  FactorizationCache cache;
  const auto f1 = cache.get(p, 1.0, std::nullopt);
  EXPECT_LE((f1->reconstructed() - f1->system).norm(), 1e-12 * f1->system.norm());
  const auto f2 = cache.get(p, 1.0, std::nullopt);
  EXPECT_EQ(f1.get(), f2.get());
  EXPECT_EQ(cache.misses(), 1u);
  EXPECT_EQ(cache.hits(), 1u);
  cache.get(p, 2.0, std::nullopt);
  cache.get(p, 1.0, 3.0 * p.ftf_norm());
  EXPECT_EQ(cache.size(), 3u);
}

TEST(FactorizationCache, HitAndMissGiveIdenticalSolves) {
  const ProblemSpec p = random_lasso(30, 12, 3, 6);
  NormalStream rng(7);
  const Vector y = rng.normal_vector(12);
  const Vector l = rng.normal_vector(12);
  FactorizationCache warm;
  const Vector a = quadratic_x_update(p, y, l, 1.0, warm);
  const Vector b = quadratic_x_update(p, y, l, 1.0, warm);
  FactorizationCache cold;
  const Vector c = quadratic_x_update(p, y, l, 1.0, cold);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}
