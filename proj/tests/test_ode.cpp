#include <cmath>

#include <gtest/gtest.h>

#include "admmcert/diagnostics.hpp"
#include "admmcert/errors.hpp"
#include "admmcert/instances.hpp"
#include "admmcert/ode.hpp"
#include "admmcert/oracle.hpp"
#include "admmcert/solver.hpp"
#include "support.hpp"

using namespace admmcert;
using namespace admmcert::testing;

namespace {

constexpr double kHuber = 1e-3;

ProblemSpec smooth_scalar() { return scalar_lasso().smoothed(kHuber); }

IntegratorConfig config(double delta, double T, double s = 1.0) {
  IntegratorConfig c;
  c.s = s;
  c.delta = delta;
  c.T = T;
  return c;
}

ContinuousState off_hyperplane(const ProblemSpec& p) {
  return consistent_initial_state(p, Vector::Zero(p.d1()), Vector::Constant(p.d2(), 0.5));
}

}  // namespace

TEST(IntegratorConfig, Validation) {
  EXPECT_NO_THROW(config(0.1, 1.0).validate());
  EXPECT_THROW(config(2.0, 1.0).validate(), ParameterError);
  EXPECT_THROW(config(0.0, 1.0).validate(), ParameterError);
  IntegratorConfig c = config(0.1, 1.0);
  c.inner_tol = 1e-8;
  EXPECT_THROW(c.validate(), ParameterError);
  EXPECT_EQ(config(0.01, 20.0).steps(), 2000);
}

TEST(ImplicitStep, UnitRatioIsAdmm) {
  for (const auto& inst : library_instances()) {
    FactorizationCache cache;
    IterateState a = IterateState::zeros(inst.spec);
    ContinuousState c{a.x, a.y, a.lambda, 0.0};
    for (int k = 0; k < 100; ++k) {
      a = admm_step(a, inst.spec, 1.0, cache);
      c = high_res_implicit_step(c, inst.spec, 1.0, 1.0, cache);
      ASSERT_EQ(c.X, a.x) << inst.name << " k=" << k;
      ASSERT_EQ(c.Y, a.y);
      ASSERT_EQ(c.Lambda, a.lambda);
    }
  }
}

TEST(ImplicitStep, SmoothedSaddleIsStationary) {
  const ProblemSpec p = random_lasso(12, 6, 2, 3).smoothed(kHuber);
  const SaddlePoint sp = saddle_point_oracle(p, 1e-12);
  FactorizationCache cache;
  const ContinuousState st{sp.x_star, sp.y_star, sp.lambda_star, 0.0};
  const ContinuousState next = high_res_implicit_step(st, p, 1.0, 0.05, cache);
  EXPECT_LE((next.X - st.X).norm(), 1e-9);
  EXPECT_LE((next.Y - st.Y).norm(), 1e-9);
  EXPECT_LE((next.Lambda - st.Lambda).norm(), 1e-9);
}

TEST(ImplicitStep, RequiresSmoothRegularizerBelowUnitRatio) {
  const ProblemSpec p = scalar_lasso();
  FactorizationCache cache;
  const ContinuousState st{vec({0}), vec({0}), vec({0}), 0.0};
  EXPECT_THROW(high_res_implicit_step(st, p, 1.0, 0.5, cache), UsageError);
}

TEST(ImplicitStep, LocalErrorIsSecondOrder) {
  // One implicit Euler step from a fixed state: error against a fine
  // reference shrinks by about 4 when delta halves.
  const ProblemSpec p = random_lasso(10, 4, 2, 6).smoothed(0.5);
  const ContinuousState init = off_hyperplane(p);
  FactorizationCache cache;
  auto advance = [&](double h, int n) {
    ContinuousState st = init;
    for (int i = 0; i < n; ++i) st = high_res_implicit_step(st, p, 1.0, h, cache);
    return st;
  };
  const double h = 0.02;
  const ContinuousState ref = advance(h / 64, 64);
  const double e1 = (advance(h, 1).X - ref.X).norm();
  const double e2 = (advance(h / 2, 1).X - advance(h / 2 / 32, 32).X).norm();
  const double ratio = e1 / e2;
  EXPECT_GT(ratio, 3.0);
  EXPECT_LT(ratio, 5.0);
}

TEST(ImplicitStep, InnerBudgetExhaustionThrows) {
  const ProblemSpec p = tv_denoising(30, 4).smoothed(kHuber);
  FactorizationCache cache;
  EXPECT_THROW(high_res_implicit_step(off_hyperplane(p), p, 1.0, 0.3, cache, 1e-14, 1),
               NumericalError);
}

TEST(HighRes, AlgebraicConstraintAndDeviation) {
  const ProblemSpec p = smooth_scalar();
  const SaddlePoint sp = saddle_point_oracle(p, 1e-12);
  const ContinuousTrace t = simulate_high_res(p, config(0.01, 20.0), off_hyperplane(p), &sp);
  ASSERT_EQ(t.states.size(), 2001u);
  for (const auto& st : t.states) {
    const Vector alg = p.G().transpose() * st.Lambda + p.g().gradient(st.Y);
    ASSERT_LE(alg.norm(), 1e-11) << "t = " << st.t;
  }
  EXPECT_GT(t.deviation.front(), 0.0);
  EXPECT_LE(t.deviation.back(), t.deviation.front());
  EXPECT_TRUE(check_continuous_energy_monotone(t, sp).pass);

  // Y0 = 0.5 already sits at (y*, lambda*); start further out for the decay.
  const ContinuousTrace u = simulate_high_res(
      p, config(0.01, 5.0), consistent_initial_state(p, vec({0}), vec({2})), &sp);
  EXPECT_GT(u.lyapunov.front(), 0.1);
  EXPECT_LT(u.lyapunov.back(), u.lyapunov.front());
  EXPECT_TRUE(check_continuous_energy_monotone(u, sp).pass);
}

TEST(HighRes, EquilibriumStart) {
  const ProblemSpec p = smooth_scalar();
  const SaddlePoint sp = saddle_point_oracle(p, 1e-12);
  const ContinuousTrace t = simulate_high_res(
      p, config(0.05, 2.0), ContinuousState{sp.x_star, sp.y_star, sp.lambda_star, 0.0}, &sp);
  for (double d : t.deviation) EXPECT_LE(d, 1e-10);
  for (std::size_t i = 1; i + 1 < t.states.size(); ++i) {
    EXPECT_LE(continuous_ne_lyapunov(t, i, p, 1.0), 1e-18);
  }
}

TEST(HighRes, DeviationIsScaledMultiplierVelocity) {
  const ProblemSpec p = random_lasso(8, 3, 1, 2).smoothed(kHuber);
  const double s = 1.0;
  const double delta = 0.02;
  const ContinuousTrace t = simulate_high_res(p, config(delta, 1.0, s), off_hyperplane(p));
  for (std::size_t i = 1; i < t.states.size(); ++i) {
    const double vel = s * s * (t.states[i].Lambda - t.states[i - 1].Lambda).norm() / delta;
    EXPECT_NEAR(t.deviation[i], vel, 1e-9 * (1 + vel));
  }
}

TEST(LowRes, StaysOnHyperplane) {
  const ProblemSpec p = random_lasso(30, 6, 2, 4).smoothed(kHuber);
  const SaddlePoint sp = saddle_point_oracle(p, 1e-12);
  const ContinuousTrace t = simulate_low_res(p, config(0.01, 10.0), Vector::Zero(6), &sp);
  for (double d : t.deviation) ASSERT_LE(d, 1e-10);
}

TEST(LowRes, EquilibriumIsSmoothedSaddle) {
  const ProblemSpec p = random_lasso(30, 6, 2, 4).smoothed(kHuber);
  const SaddlePoint sp = saddle_point_oracle(p, 1e-12);
  const ContinuousTrace t = simulate_low_res(p, config(0.01, 0.02), sp.x_star, &sp);
  EXPECT_LE((t.states.back().X - sp.x_star).norm(), 1e-8);
}

TEST(LowRes, FourthOrderEndpoint) {
  const ProblemSpec p = random_lasso(10, 3, 1, 5).smoothed(0.5);
  auto endpoint = [&](double h) {
    return simulate_low_res(p, config(h, 1.0), Vector::Zero(3)).states.back().X;
  };
  const Vector ref = endpoint(0.1 / 32);
  const double e1 = (endpoint(0.1) - ref).norm();
  const double e2 = (endpoint(0.05) - ref).norm();
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(LowRes, NeedsInvertibleCoupling) {
  const ProblemSpec p = tv_denoising(10, 1).smoothed(kHuber);
  EXPECT_THROW(simulate_low_res(p, config(0.1, 1.0), Vector::Zero(10)), NumericalError);
}

TEST(ContinuousLyapunov, MatchesDiscreteFormula) {
  const ProblemSpec p = tv_denoising(6, 2);
  NormalStream rng(3);
  const Vector yr = rng.normal_vector(5);
  const Vector lr = rng.normal_vector(5);
  for (int i = 0; i < 20; ++i) {
    const IterateState d{rng.normal_vector(6), rng.normal_vector(5), rng.normal_vector(5), 0};
    const ContinuousState c{d.x, d.y, d.lambda, 0.0};
    EXPECT_EQ(continuous_lyapunov(c, yr, lr, p, 0.7), discrete_lyapunov(d, yr, lr, p, 0.7));
  }
  const ContinuousState same{Vector::Zero(6), yr, lr, 0.0};
  EXPECT_EQ(continuous_lyapunov(same, yr, lr, p, 1.0), 0.0);
}

TEST(ContinuousNe, BoundaryRejectedAndDifferenceConsistent) {
  const ProblemSpec p = smooth_scalar();
  const ContinuousTrace t = simulate_high_res(p, config(0.01, 1.0), off_hyperplane(p));
  EXPECT_THROW(continuous_ne_lyapunov(t, 0, p, 1.0), UsageError);
  EXPECT_THROW(continuous_ne_lyapunov(t, t.states.size() - 1, p, 1.0), UsageError);
  EXPECT_TRUE(std::isnan(t.ne_continuous.front()));
  // Lambda' from the constraint vs a central difference.
  for (std::size_t i = 10; i + 10 < t.states.size(); i += 10) {
    const double formula = (hyperplane_deviation(t.states[i], p));
    const double diff =
        (t.states[i + 1].Lambda - t.states[i - 1].Lambda).norm() / (2 * t.delta);
    EXPECT_NEAR(formula, diff, 0.05 * formula + 1e-6);
  }
}

TEST(HyperplaneDeviation, Arithmetic) {
  const ProblemSpec p = build_generalized_lasso(Matrix::Identity(2, 2), vec({0, 0}),
                                                Matrix::Identity(2, 2), 1.0);
  EXPECT_EQ(hyperplane_deviation(ContinuousState{vec({1, 2}), vec({1, 2}), vec({0, 0}), 0}, p), 0.0);
  EXPECT_EQ(hyperplane_deviation(ContinuousState{vec({3, 4}), vec({0, 0}), vec({0, 0}), 0}, p), 5.0);
}

TEST(ContinuousRates, ScalarStrongAndWeakAverages) {
  const ProblemSpec p = smooth_scalar();
  const SaddlePoint sp = saddle_point_oracle(p, 1e-12);
  const ContinuousTrace t = simulate_high_res(p, config(0.01, 50.0), off_hyperplane(p), &sp);
  EXPECT_TRUE(check_continuous_weak_average(t, sp, sp.x_star, sp.y_star, "saddle").pass);
  const CertificateEntry e = check_continuous_strong_average(t, sp, 2.0);
  EXPECT_TRUE(e.pass) << e.worst_slack;
  EXPECT_THROW(check_continuous_strong_average(t, sp, 0.0), ParameterError);

  const ContinuousTrace z = simulate_high_res(
      p, config(0.05, 5.0), ContinuousState{sp.x_star, sp.y_star, sp.lambda_star, 0.0}, &sp);
  for (double l : check_continuous_strong_average(z, sp, 2.0).lhs) EXPECT_LE(l, 1e-20);
}

TEST(ContinuousRates, AverageStableUnderRefinement) {
  // Implicit Euler is first order: halving delta moves the time average by
  // about delta / 200 here, so the 1e-6 level is reached at delta = 1e-4.
  const ProblemSpec p = smooth_scalar();
  const ContinuousTrace a = simulate_high_res(p, config(1e-4, 50.0), off_hyperplane(p));
  const ContinuousTrace b = simulate_high_res(p, config(5e-5, 50.0), off_hyperplane(p));
  EXPECT_LE((time_averages(a).X.back() - time_averages(b).X.back()).norm(), 1e-6);
  const ContinuousTrace c = simulate_high_res(p, config(2e-2, 50.0), off_hyperplane(p));
  const ContinuousTrace d = simulate_high_res(p, config(1e-2, 50.0), off_hyperplane(p));
  const double coarse = (time_averages(c).X.back() - time_averages(d).X.back()).norm();
  EXPECT_GT(coarse, 1e-6);
  EXPECT_LT(coarse, 1e-3);
}

TEST(SampleIndices, QuarterHalfEnd) {
  const ProblemSpec p = smooth_scalar();
  const ContinuousTrace t = simulate_high_res(p, config(0.1, 4.0), off_hyperplane(p));
  EXPECT_EQ(sample_indices(t), (std::vector<std::size_t>{10, 20, 40}));
}
