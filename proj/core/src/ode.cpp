#include "admmcert/ode.hpp"

#include <cmath>
#include <sstream>

#include "admmcert/errors.hpp"

namespace admmcert {
namespace {

double require_sign(const ProblemSpec& spec, const char* who) {
  const auto sigma = spec.g_identity_sign();
  if (!sigma) throw UsageError(std::string(who) + " needs G = +-I");
  return *sigma;
}

double huber_delta(const SeparableFunction& g) {
  return std::get<HuberSmoothedL1>(g.variant()).delta;
}

/// Derivative of the Huber prox with respect to its argument.
Vector huber_prox_slope(const Vector& u, double s_w, double dh) {
  Vector out(u.size());
  const double inner = 1.0 / (1.0 + s_w / dh);
  for (Index i = 0; i < u.size(); ++i) out(i) = std::abs(u(i)) <= dh + s_w ? inner : 1.0;
  return out;
}

struct ReducedPoint {
  Vector Y;
  Vector Lambda;
  Vector R0;  ///< stationarity reads grad f(X) + R0 = 0
  Vector u;   ///< prox argument
};

ContinuousState newton_step(const ContinuousState& state, const ProblemSpec& spec, double s,
                            double delta, double inner_tol, int inner_max) {
  const auto& f = spec.f();
  const auto& g = spec.g();
  if (!g.is_huber()) {
    throw UsageError("high-resolution step with delta < s needs a smooth g; smooth the problem first");
  }
  if (!(f.is_quadratic() || f.is_indicator())) {
    throw UsageError("high-resolution step needs f quadratic or affine indicator");
  }
  const double sigma = require_sign(spec, "high-resolution step");
  const Matrix& F = spec.F();
  const Vector& h = spec.h();
  const double c = delta / (s * s);
  const double s_eff = 1.0 / c;
  const double w = g.weight();
  const double dh = huber_delta(g);

  auto evaluate = [&](const Vector& X) {
    ReducedPoint p;
    const Vector target = h - F * X - s_eff * state.Lambda;
    p.u = sigma * target;
    p.Y = huber_prox(p.u, s_eff * w, dh);
    p.Lambda = state.Lambda + c * (F * X + sigma * p.Y - h);
    p.R0 = F.transpose() * p.Lambda - sigma * (F.transpose() * (p.Y - state.Y)) / delta;
    return p;
  };

  const bool indicator = f.is_indicator();
  Matrix A;
  Vector b;
  Eigen::LDLT<Matrix> aat;
  if (indicator) {
    A = f.data_matrix();
    b = f.data_vector();
    aat.compute(A * A.transpose());
  }
  auto merit = [&](const Vector& X, const ReducedPoint& p) {
    if (indicator) {
      const Vector proj = p.R0 - A.transpose() * aat.solve(A * p.R0);
      return proj.norm() + (A * X - b).norm();
    }
    return (f.gradient(X) + p.R0).norm();
  };

  const Index d1 = spec.d1();
  Vector X = state.X;
  ReducedPoint p = evaluate(X);
  double phi = merit(X, p);
  for (int it = 0; it < inner_max; ++it) {
    // Increment form delta * (grad f + F^T Lambda+) - F^T G dY; the unscaled
    // residual has a rounding floor of order eps s^2 / delta^2.
    if (delta * phi <= inner_tol * (1.0 + delta * p.R0.norm())) {
      return {X, p.Y, p.Lambda, state.t + delta};
    }
    const Vector slope = huber_prox_slope(p.u, s_eff * w, dh);
    const Matrix FtPF = F.transpose() * slope.asDiagonal() * F;
    Matrix J = c * (F.transpose() * F - FtPF) + FtPF / delta;
    Vector dX;
    if (indicator) {
      const Index m1 = A.rows();
      Matrix K = Matrix::Zero(d1 + m1, d1 + m1);
      K.topLeftCorner(d1, d1) = J;
      K.topRightCorner(d1, m1) = A.transpose();
      K.bottomLeftCorner(m1, d1) = A;
      Vector rhs(d1 + m1);
      rhs << -p.R0, b - A * X;
      dX = K.partialPivLu().solve(rhs).head(d1);
    } else {
      J += f.hessian(X);
      dX = J.ldlt().solve(-(f.gradient(X) + p.R0));
    }
    double step = 1.0;
    Vector trial = X + dX;
    ReducedPoint q = evaluate(trial);
    double trial_phi = merit(trial, q);
    for (int bt = 0; bt < 30 && !(trial_phi < phi); ++bt) {
      step *= 0.5;
      trial = X + step * dX;
      q = evaluate(trial);
      trial_phi = merit(trial, q);
    }
    X = std::move(trial);
    p = std::move(q);
    phi = trial_phi;
  }
  std::ostringstream os;
  os << "high-resolution inner solve did not reach " << inner_tol << " in " << inner_max
     << " iterations (scaled residual " << delta * phi << ")";
  throw NumericalError(os.str());
}

void fill_columns(ContinuousTrace& trace, const SaddlePoint* reference) {
  const ProblemSpec& spec = *trace.spec;
  const std::size_t n = trace.states.size();
  trace.deviation.resize(n);
  trace.lyapunov.resize(n);
  trace.ne_continuous.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& st = trace.states[i];
    trace.deviation[i] = hyperplane_deviation(st, spec);
    trace.lyapunov[i] = reference ? continuous_lyapunov(st, reference->y_star,
                                                        reference->lambda_star, spec, trace.s)
                                  : std::numeric_limits<double>::quiet_NaN();
    if (i > 0 && i + 1 < n) trace.ne_continuous[i] = continuous_ne_lyapunov(trace, i, spec, trace.s);
  }
}

CertificateEntry continuous_entry(const std::string& name, const ContinuousTrace& trace, double C) {
  CertificateEntry e;
  e.theorem = name;
  e.tolerance = 10.0 * trace.delta;
  e.constants.C = C;
  e.constants.s = trace.s;
  return e;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(s > 0.0) || !std::isfinite(s)) throw ParameterError("system parameter s must be positive");
  if (!(delta > 0.0) || delta > s) throw ParameterError("time step needs 0 < delta <= s");
  if (!(T >= delta)) throw ParameterError("horizon must cover at least one step");
  if (!(inner_tol > 0.0) || inner_tol > 1e-10) {
    throw ParameterError("inner tolerance must lie in (0, 1e-10]");
  }
  if (inner_max < 1) throw ParameterError("inner_max must be positive");
}

std::int64_t IntegratorConfig::steps() const { return std::llround(T / delta); }

ContinuousState high_res_implicit_step(const ContinuousState& state, const ProblemSpec& spec,
                                       double s, double delta, FactorizationCache& cache,
                                       double inner_tol, int inner_max) {
  if (!(s > 0.0)) throw ParameterError("system parameter s must be positive");
  if (!(delta > 0.0) || delta > s) throw ParameterError("time step needs 0 < delta <= s");
  if (state.X.size() != spec.d1() || state.Y.size() != spec.d2() ||
      state.Lambda.size() != spec.m()) {
    throw DimensionError("continuous state does not match the problem dimensions");
  }
  if (delta == s) {
    // One sweep x -> y -> lambda solves the coupled system exactly.
    Vector X = x_subproblem(spec, x_target(spec, state.Y, state.Lambda, s), s, cache);
    Vector Y = l1_y_update(spec, X, state.Lambda, s);
    Vector L = state.Lambda + spec.constraint_residual(X, Y) / s;
    return {std::move(X), std::move(Y), std::move(L), state.t + delta};
  }
  return newton_step(state, spec, s, delta, inner_tol, inner_max);
}

ContinuousState consistent_initial_state(const ProblemSpec& spec, const Vector& X0,
                                         const Vector& Y0) {
  const double sigma = require_sign(spec, "consistent initialization");
  if (X0.size() != spec.d1() || Y0.size() != spec.d2()) {
    throw DimensionError("initial X or Y has wrong length");
  }
  Vector grad;
  if (spec.g().is_huber()) {
    grad = spec.g().gradient(Y0);
  } else if (spec.g().is_l1()) {
    // Minimum-norm subgradient.
    grad = spec.g().weight() * Y0.array().sign().matrix();
  } else {
    throw UsageError("consistent initialization needs g l1 or huber");
  }
  return {X0, Y0, -sigma * grad, 0.0};
}

ContinuousTrace simulate_high_res(const ProblemSpec& spec, const IntegratorConfig& config,
                                  const ContinuousState& init, const SaddlePoint* reference) {
  config.validate();
  ContinuousTrace trace;
  trace.spec = std::make_shared<const ProblemSpec>(spec);
  trace.s = config.s;
  trace.delta = config.delta;
  const std::int64_t n = config.steps();
  trace.states.reserve(static_cast<std::size_t>(n + 1));
  ContinuousState cur = init;
  cur.t = 0.0;
  trace.states.push_back(cur);
  FactorizationCache cache;
  for (std::int64_t i = 1; i <= n; ++i) {
    cur = high_res_implicit_step(cur, spec, config.s, config.delta, cache, config.inner_tol,
                                 config.inner_max);
    cur.t = static_cast<double>(i) * config.delta;
    trace.states.push_back(cur);
  }
  fill_columns(trace, reference);
  return trace;
}

ContinuousTrace simulate_low_res(const ProblemSpec& spec, const IntegratorConfig& config,
                                 const Vector& init_x, const SaddlePoint* reference) {
  config.validate();
  const double sigma = require_sign(spec, "low-resolution flow");
  if (!spec.f().is_quadratic()) throw UsageError("low-resolution flow needs f quadratic");
  if (!spec.g().is_smooth()) throw UsageError("low-resolution flow needs a smooth g");
  if (init_x.size() != spec.d1()) throw DimensionError("initial X has wrong length");
  const Matrix& F = spec.F();
  const Vector& h = spec.h();
  const Matrix ftf = F.transpose() * F;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(ftf, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxConditionNumber) {
    throw NumericalError("low-resolution flow needs F^T F invertible");
  }
  const Eigen::LLT<Matrix> llt(ftf);

  auto y_of = [&](const Vector& X) -> Vector { return sigma * (h - F * X); };
  auto field = [&](const Vector& X) -> Vector {
    const Vector Y = y_of(X);
    return llt.solve(-spec.f().gradient(X) + sigma * (F.transpose() * spec.g().gradient(Y)));
  };
  auto node = [&](const Vector& X, double t) {
    Vector Y = y_of(X);
    Vector L = -sigma * spec.g().gradient(Y);
    return ContinuousState{X, std::move(Y), std::move(L), t};
  };

  ContinuousTrace trace;
  trace.spec = std::make_shared<const ProblemSpec>(spec);
  trace.s = config.s;
  trace.delta = config.delta;
  const std::int64_t n = config.steps();
  const double dt = config.delta;
  trace.states.reserve(static_cast<std::size_t>(n + 1));
  Vector X = init_x;
  trace.states.push_back(node(X, 0.0));
  for (std::int64_t i = 1; i <= n; ++i) {
    const Vector k1 = field(X);
    const Vector k2 = field(X + 0.5 * dt * k1);
    const Vector k3 = field(X + 0.5 * dt * k2);
    const Vector k4 = field(X + dt * k3);
    X += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    trace.states.push_back(node(X, static_cast<double>(i) * dt));
  }
  fill_columns(trace, reference);
  return trace;
}

double continuous_lyapunov(const ContinuousState& state, const Vector& y_ref,
                           const Vector& lambda_ref, const ProblemSpec& spec, double s) {
  if (state.Y.size() != spec.d2() || y_ref.size() != spec.d2() ||
      state.Lambda.size() != spec.m() || lambda_ref.size() != spec.m()) {
    throw DimensionError("lyapunov: state or reference has wrong length");
  }
  return quadratic_energy(spec.G(), state.Y, y_ref, state.Lambda, lambda_ref, s);
}

double continuous_ne_lyapunov(const ContinuousTrace& trace, std::size_t index,
                              const ProblemSpec& spec, double s) {
  if (index == 0 || index + 1 >= trace.states.size()) {
    throw UsageError("continuous numerical error needs an interior node");
  }
  const auto& prev = trace.states[index - 1];
  const auto& cur = trace.states[index];
  const auto& next = trace.states[index + 1];
  const Vector ydot = (next.Y - prev.Y) / (next.t - prev.t);
  const Vector ldot = spec.constraint_residual(cur.X, cur.Y) / (s * s);
  return 0.5 * s * (spec.G() * ydot).squaredNorm() + 0.5 * s * s * s * ldot.squaredNorm();
}

double hyperplane_deviation(const ContinuousState& state, const ProblemSpec& spec) {
  return spec.constraint_residual(state.X, state.Y).norm();
}

ContinuousAverages time_averages(const ContinuousTrace& trace) {
  if (trace.states.empty()) throw UsageError("time averages of an empty trajectory");
  ContinuousAverages out;
  const auto& first = trace.states.front();
  Vector ix = Vector::Zero(first.X.size());
  Vector iy = Vector::Zero(first.Y.size());
  Vector il = Vector::Zero(first.Lambda.size());
  out.X.push_back(first.X);
  out.Y.push_back(first.Y);
  out.Lambda.push_back(first.Lambda);
  for (std::size_t i = 1; i < trace.states.size(); ++i) {
    const auto& a = trace.states[i - 1];
    const auto& b = trace.states[i];
    const double dt = b.t - a.t;
    ix += 0.5 * dt * (a.X + b.X);
    iy += 0.5 * dt * (a.Y + b.Y);
    il += 0.5 * dt * (a.Lambda + b.Lambda);
    out.X.push_back(ix / b.t);
    out.Y.push_back(iy / b.t);
    out.Lambda.push_back(il / b.t);
  }
  return out;
}

std::vector<std::size_t> sample_indices(const ContinuousTrace& trace) {
  const std::size_t last = trace.states.size() - 1;
  return {last / 4, last / 2, last};
}

CertificateEntry check_continuous_energy_monotone(const ContinuousTrace& trace,
                                                  const SaddlePoint& saddle) {
  const ProblemSpec& spec = *trace.spec;
  const auto& st = trace.states;
  const double C = (spec.G() * (st.front().Y - saddle.y_star)).squaredNorm() +
                   trace.s * trace.s * (st.front().Lambda - saddle.lambda_star).squaredNorm();
  auto e = continuous_entry("continuous_energy_monotone", trace, C);
  double prev = continuous_lyapunov(st.front(), saddle.y_star, saddle.lambda_star, spec, trace.s);
  for (std::size_t i = 1; i < st.size(); ++i) {
    const double cur = continuous_lyapunov(st[i], saddle.y_star, saddle.lambda_star, spec, trace.s);
    e.observe(static_cast<std::int64_t>(i - 1), cur, prev);
    prev = cur;
  }
  return e;
}

CertificateEntry check_continuous_weak_average(const ContinuousTrace& trace,
                                               const SaddlePoint& saddle, const Vector& probe_x,
                                               const Vector& probe_y, const std::string& name) {
  const ProblemSpec& spec = *trace.spec;
  const Matrix& F = spec.F();
  const Matrix& G = spec.G();
  const double s = trace.s;
  const auto& init = trace.states.front();
  const double C = (G * (init.Y - probe_y)).squaredNorm() + s * s * init.Lambda.squaredNorm();
  auto e = continuous_entry(name, trace, C);
  const auto avg = time_averages(trace);
  const double fx = spec.f().value(probe_x);
  const double gy = spec.g().value(probe_y);
  const Vector probe_dev = F * (probe_x - saddle.x_star) + G * (probe_y - saddle.y_star);
  for (std::size_t i : sample_indices(trace)) {
    const double t = trace.states[i].t;
    if (!(t > 0.0)) continue;
    // Time average of Lambda - s G Y'; the derivative part telescopes.
    const Vector mult = avg.Lambda[i] - s * G * (trace.states[i].Y - init.Y) / t;
    const double lhs = spec.f().value(avg.X[i]) - fx + spec.g().value(avg.Y[i]) - gy -
                       mult.dot(probe_dev);
    e.observe(static_cast<std::int64_t>(i), lhs, C / (2.0 * t));
  }
  return e;
}

CertificateEntry check_continuous_strong_average(const ContinuousTrace& trace,
                                                 const SaddlePoint& saddle, double mu,
                                                 CertificateEntry* alternative) {
  if (!(mu > 0.0)) {
    throw ParameterError("strong convexity certificate unavailable: f has no positive modulus");
  }
  const ProblemSpec& spec = *trace.spec;
  const double s = trace.s;
  const auto& init = trace.states.front();
  const double lam0 = s * s * (init.Lambda - saddle.lambda_star).squaredNorm();
  const double C = (init.X - saddle.x_star).squaredNorm() + lam0;
  const double C_alt = (spec.G() * (init.Y - saddle.y_star)).squaredNorm() + lam0;
  auto e = continuous_entry("continuous_strong_average", trace, C);
  e.constants.mu = mu;
  auto alt = continuous_entry("continuous_strong_average_energy_constant", trace, C_alt);
  alt.constants.mu = mu;
  const auto avg = time_averages(trace);
  for (std::size_t i : sample_indices(trace)) {
    const double t = trace.states[i].t;
    if (!(t > 0.0)) continue;
    const double lhs = (avg.X[i] - saddle.x_star).squaredNorm();
    e.observe(static_cast<std::int64_t>(i), lhs, C / (mu * t));
    alt.observe(static_cast<std::int64_t>(i), lhs, C_alt / (mu * t));
  }
  if (alternative) *alternative = std::move(alt);
  return e;
}

}  // namespace admmcert
