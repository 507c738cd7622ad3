#include "admmcert/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "admmcert/diagnostics.hpp"

namespace admmcert {
namespace {

void check_dims(const IterateState& st, const ProblemSpec& spec) {
  if (st.x.size() != spec.d1() || st.y.size() != spec.d2() || st.lambda.size() != spec.m()) {
    std::ostringstream os;
    os << "state dims (" << st.x.size() << ", " << st.y.size() << ", " << st.lambda.size()
       << ") do not match spec (" << spec.d1() << ", " << spec.d2() << ", " << spec.m() << ")";
    throw DimensionError(os.str());
  }
}

IterateState finish_step(const IterateState& state, const ProblemSpec& spec, double s, Vector x,
                         Vector y) {
  IterateState next;
  next.lambda = state.lambda + spec.constraint_residual(x, y) / s;
  next.x = std::move(x);
  next.y = std::move(y);
  next.k = state.k + 1;
  return next;
}

void record(Trace& trace, const IterateState& st, const ProblemSpec& spec, double s,
            const SaddlePoint* ref, double ne) {
  const KktResiduals kkt = kkt_residuals(spec, st.x, st.y, st.lambda);
  auto& d = trace.diagnostics;
  d["primal_res"].push_back(kkt.primal);
  d["dual_x_res"].push_back(kkt.dual_x);
  d["dual_y_res"].push_back(kkt.dual_y);
  d["objective"].push_back(objective(spec, st.x, st.y));
  d["lyapunov"].push_back(ref ? discrete_lyapunov(st, ref->y_star, ref->lambda_star, spec, s)
                              : std::numeric_limits<double>::quiet_NaN());
  d["ne"].push_back(ne);
  trace.states.push_back(st);
}

}  // namespace

IterateState IterateState::zeros(const ProblemSpec& spec) {
  return {Vector::Zero(spec.d1()), Vector::Zero(spec.d2()), Vector::Zero(spec.m()), 0};
}

void SolverConfig::validate(const ProblemSpec& spec) const {
  if (!(s > 0.0) || !std::isfinite(s)) throw ParameterError("step size s must be positive");
  if (N < 1) throw ParameterError("iteration count N must be at least 1");
  if (record_every < 1) throw ParameterError("record_every must be positive");
  if (variant == Variant::General) require_proximal_coefficient(spec, effective_r(spec));
}

double SolverConfig::effective_r(const ProblemSpec& spec) const {
  if (r) return *r;
  const double base = spec.ftf_norm();
  return base > 0.0 ? 1.5 * base : 1.0;
}

bool Trace::is_consecutive() const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].k != states.front().k + static_cast<std::int64_t>(i)) return false;
  }
  return true;
}

IterateState admm_step(const IterateState& state, const ProblemSpec& spec, double s,
                       FactorizationCache& cache) {
  check_dims(state, spec);
  Vector x = x_subproblem(spec, x_target(spec, state.y, state.lambda, s), s, cache);
  Vector y = l1_y_update(spec, x, state.lambda, s);
  return finish_step(state, spec, s, std::move(x), std::move(y));
}

IterateState general_admm_step(const IterateState& state, const ProblemSpec& spec, double s,
                               double r, FactorizationCache& cache) {
  check_dims(state, spec);
  Vector x = proximal_x_update_general(spec, state.x, state.y, state.lambda, s, r, cache);
  Vector y = l1_y_update(spec, x, state.lambda, s);
  return finish_step(state, spec, s, std::move(x), std::move(y));
}

Trace run(const ProblemSpec& spec, const SolverConfig& config, const IterateState& init,
          const SaddlePoint* reference, FactorizationCache* cache) {
  config.validate(spec);
  check_dims(init, spec);
  FactorizationCache local;
  FactorizationCache& fc = cache ? *cache : local;
  const double s = config.s;
  const double r = config.effective_r(spec);

  Trace trace;
  trace.spec = std::make_shared<const ProblemSpec>(spec);
  trace.config = config;
  trace.config.r = config.variant == Variant::General ? std::optional<double>(r) : std::nullopt;
  trace.states.reserve(static_cast<std::size_t>(config.N / config.record_every + 2));
  record(trace, init, spec, s, reference, 0.0);

  IterateState cur = init;
  for (std::int64_t i = 0; i < config.N; ++i) {
    IterateState next;
    try {
      next = config.variant == Variant::General ? general_admm_step(cur, spec, s, r, fc)
                                                : admm_step(cur, spec, s, fc);
    } catch (const Error& e) {
      trace.stop_reason = std::string("kernel error: ") + e.what();
      throw RunError(e.what(), std::move(trace));
    }
    const double ne = numerical_error(cur, next, spec, s);
    cur = std::move(next);

    const bool last = i + 1 == config.N;
    bool stop = false;
    if (config.stop_tol) {
      stop = kkt_residuals(spec, cur.x, cur.y, cur.lambda).max() <= *config.stop_tol;
    }
    if (last || stop || cur.k % config.record_every == 0) {
      record(trace, cur, spec, s, reference, ne);
    }
    if (stop) {
      trace.stop_reason = "kkt tolerance reached";
      return trace;
    }
  }
  trace.stop_reason = "iteration budget";
  return trace;
}

RunningAverages running_average(const Trace& trace) {
  if (trace.states.empty()) throw UsageError("running_average on empty trace");
  RunningAverages out;
  const auto& first = trace.states.front();
  Vector sx = Vector::Zero(first.x.size());
  Vector sy = Vector::Zero(first.y.size());
  Vector sl = Vector::Zero(first.lambda.size());
  for (std::size_t n = 0; n < trace.states.size(); ++n) {
    const auto& st = trace.states[n];
    sx += st.x;
    sy += st.y;
    sl += st.lambda;
    const double count = static_cast<double>(n + 1);
    out.x.push_back(sx / count);
    out.y.push_back(sy / count);
    out.lambda.push_back(sl / count);
  }
  return out;
}

}  // namespace admmcert
