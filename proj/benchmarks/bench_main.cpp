#include <benchmark/benchmark.h>

#include "admmcert/diagnostics.hpp"
#include "admmcert/instances.hpp"
#include "admmcert/ode.hpp"
#include "admmcert/oracle.hpp"
#include "admmcert/solver.hpp"

namespace {

using namespace admmcert;

ProblemSpec lasso_for(benchmark::State& st) {
  const auto d = static_cast<Index>(st.range(0));
  return random_lasso(d / 2, d, std::max<Index>(1, d / 10), 3);
}

void BM_AdmmStep(benchmark::State& st) {
  const ProblemSpec p = lasso_for(st);
  FactorizationCache cache;
  IterateState s = IterateState::zeros(p);
  for (auto _ : st) {
    s = admm_step(s, p, 1.0, cache);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_AdmmStep)->Arg(16)->Arg(64)->Arg(256);

void BM_GeneralStep(benchmark::State& st) {
  const ProblemSpec p = lasso_for(st);
  FactorizationCache cache;
  const double r = 1.5 * p.ftf_norm();
  IterateState s = IterateState::zeros(p);
  for (auto _ : st) {
    s = general_admm_step(s, p, 1.0, r, cache);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_GeneralStep)->Arg(16)->Arg(64)->Arg(256);

void BM_FactorizationMiss(benchmark::State& st) {
  const ProblemSpec p = lasso_for(st);
  for (auto _ : st) {
    FactorizationCache cache;
    benchmark::DoNotOptimize(cache.get(p, 1.0, std::nullopt).get());
  }
}
BENCHMARK(BM_FactorizationMiss)->Arg(64)->Arg(256);

void BM_TvImplicitStep(benchmark::State& st) {
  const ProblemSpec p = tv_denoising(static_cast<Index>(st.range(0)), 2).smoothed(1e-3);
  FactorizationCache cache;
  ContinuousState s =
      consistent_initial_state(p, Vector::Zero(p.d1()), Vector::Constant(p.d2(), 0.5));
  for (auto _ : st) {
    s = high_res_implicit_step(s, p, 1.0, 0.01, cache);
    benchmark::DoNotOptimize(s.X.data());
  }
}
BENCHMARK(BM_TvImplicitStep)->Arg(50)->Arg(200);

void BM_CertifyTrace(benchmark::State& st) {
  const ProblemSpec p = tv_denoising(50, 2);
  const SaddlePoint sp = saddle_point_oracle(p, 1e-10);
  SolverConfig cfg;
  cfg.N = st.range(0);
  const Trace t = run(p, cfg, IterateState::zeros(p), &sp);
  for (auto _ : st) {
    benchmark::DoNotOptimize(certify_standard_trace(t, sp, p, 1.0).all_pass());
  }
}
BENCHMARK(BM_CertifyTrace)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
