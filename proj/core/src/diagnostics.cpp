#include "admmcert/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "admmcert/errors.hpp"

namespace admmcert {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json entry_json(const CertificateEntry& e) {
  ordered_json j;
  j["theorem"] = e.theorem;
  j["pass"] = e.pass;
  j["worst_slack"] = number_or_null(e.worst_slack);
  j["worst_index"] = e.worst_index;
  j["tolerance"] = e.tolerance;
  ordered_json c;
  c["C"] = number_or_null(e.constants.C);
  c["s"] = number_or_null(e.constants.s);
  c["r"] = number_or_null(e.constants.r);
  c["mu"] = number_or_null(e.constants.mu);
  j["constants"] = std::move(c);
  return j;
}

void require_consecutive(const Trace& trace, const char* who) {
  if (!trace.is_consecutive()) {
    throw UsageError(std::string(who) + " needs a trace recorded at every step");
  }
}

CertificateEntry make_entry(const std::string& name, double tol, double C, double s) {
  CertificateEntry e;
  e.theorem = name;
  e.tolerance = tol;
  e.constants.C = C;
  e.constants.s = s;
  return e;
}

/// ||G dy||^2 + s^2 ||d lambda||^2 between two states.
double step_dual_norm(const Matrix& G, const IterateState& a, const IterateState& b, double s) {
  return (G * (b.y - a.y)).squaredNorm() + s * s * (b.lambda - a.lambda).squaredNorm();
}

/// ||G(y0 - y*)||^2 + s^2 ||lambda0 - lambda*||^2.
double dual_constant(const Matrix& G, const IterateState& init, const SaddlePoint& saddle,
                     double s) {
  return (G * (init.y - saddle.y_star)).squaredNorm() +
         s * s * (init.lambda - saddle.lambda_star).squaredNorm();
}

double metric_sq(const Vector& v, const Matrix& F, double r) {
  return r * v.squaredNorm() - (F * v).squaredNorm();
}

}  // namespace

double quadratic_energy(const Matrix& G, const Vector& y, const Vector& y_ref, const Vector& lambda,
                        const Vector& lambda_ref, double s) {
  if (!(s > 0.0)) throw ParameterError("step size s must be positive");
  return (G * (y - y_ref)).squaredNorm() / (2.0 * s) + 0.5 * s * (lambda - lambda_ref).squaredNorm();
}

double discrete_lyapunov(const IterateState& state, const Vector& y_ref, const Vector& lambda_ref,
                         const ProblemSpec& spec, double s) {
  if (state.y.size() != spec.d2() || y_ref.size() != spec.d2() ||
      state.lambda.size() != spec.m() || lambda_ref.size() != spec.m()) {
    throw DimensionError("lyapunov: state or reference has wrong length");
  }
  return quadratic_energy(spec.G(), state.y, y_ref, state.lambda, lambda_ref, s);
}

double numerical_error(const IterateState& prev, const IterateState& next, const ProblemSpec& spec,
                       double s) {
  if (next.k != prev.k + 1) {
    std::ostringstream os;
    os << "numerical error needs consecutive states, got k=" << prev.k << " and k=" << next.k;
    throw UsageError(os.str());
  }
  return quadratic_energy(spec.G(), next.y, prev.y, next.lambda, prev.lambda, s);
}

double extended_lyapunov(const IterateState& state, const SaddlePoint& saddle,
                         const ProblemSpec& spec, double s, double r) {
  require_proximal_coefficient(spec, r);
  const double base = discrete_lyapunov(state, saddle.y_star, saddle.lambda_star, spec, s);
  return base + metric_sq(state.x - saddle.x_star, spec.F(), r) / (2.0 * s);
}

double extended_numerical_error(const IterateState& prev, const IterateState& next,
                                const ProblemSpec& spec, double s, double r) {
  const double base = numerical_error(prev, next, spec, s);
  return base + metric_sq(next.x - prev.x, spec.F(), r) / (2.0 * s);
}

void CertificateEntry::observe(std::int64_t index, double lhs_value, double rhs_value) {
  lhs.push_back(lhs_value);
  rhs.push_back(rhs_value);
  double slack = lhs_value - rhs_value;
  if (std::isnan(slack)) slack = std::numeric_limits<double>::infinity();
  if (worst_index < 0 || slack > worst_slack) {
    worst_slack = slack;
    worst_index = index;
  }
  pass = worst_slack <= tolerance;
}

bool CertificateReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

std::vector<std::string> CertificateReport::failures() const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (!e.pass) out.push_back(e.theorem);
  }
  return out;
}

void CertificateReport::append(const CertificateReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
  informational.insert(informational.end(), other.informational.begin(),
                       other.informational.end());
}

std::string CertificateReport::to_json() const {
  ordered_json j;
  j["all_pass"] = all_pass();
  j["certificates"] = ordered_json::array();
  for (const auto& e : entries) j["certificates"].push_back(entry_json(e));
  j["informational"] = ordered_json::array();
  for (const auto& e : informational) j["informational"].push_back(entry_json(e));
  return j.dump(2);
}

CertificateEntry check_energy_descent(const Trace& trace, const SaddlePoint& saddle, double s) {
  require_consecutive(trace, "energy descent check");
  const ProblemSpec& spec = *trace.spec;
  const auto& st = trace.states;
  auto e = make_entry("energy_descent", kStepTolerance,
                      dual_constant(spec.G(), st.front(), saddle, s), s);
  double prev = discrete_lyapunov(st.front(), saddle.y_star, saddle.lambda_star, spec, s);
  for (std::size_t k = 0; k + 1 < st.size(); ++k) {
    const double next = discrete_lyapunov(st[k + 1], saddle.y_star, saddle.lambda_star, spec, s);
    const double ne = numerical_error(st[k], st[k + 1], spec, s);
    e.observe(st[k].k, next - prev + ne, 0.0);
    prev = next;
  }
  return e;
}

CertificateEntry check_iterative_inequality(const Trace& trace, const ProblemSpec& spec, double s,
                                            const SaddlePoint& saddle, const Probe& probe,
                                            const std::string& name) {
  require_consecutive(trace, "iterative inequality check");
  const auto& st = trace.states;
  const Matrix& F = spec.F();
  const Matrix& G = spec.G();
  auto e = make_entry(name, kStepTolerance, dual_constant(G, st.front(), saddle, s), s);

  const double fx = spec.f().value(probe.x);
  const double gy = spec.g().value(probe.y);
  const Vector probe_dev = F * (probe.x - saddle.x_star) + G * (probe.y - saddle.y_star);
  for (std::size_t k = 0; k + 1 < st.size(); ++k) {
    const IterateState& a = st[k];
    const IterateState& b = st[k + 1];
    const double lhs = discrete_lyapunov(b, probe.y, probe.lambda, spec, s) -
                       discrete_lyapunov(a, probe.y, probe.lambda, spec, s);
    const Vector gdy = G * (b.y - a.y);
    const Vector iter_dev = F * (b.x - saddle.x_star) + G * (b.y - saddle.y_star);
    const double rhs = fx - spec.f().value(b.x) + gy - spec.g().value(b.y) +
                       (b.lambda - gdy / s).dot(probe_dev) - probe.lambda.dot(iter_dev) -
                       numerical_error(a, b, spec, s);
    e.observe(a.k, lhs, rhs);
  }
  return e;
}

CertificateEntry check_ergodic_rate(const Trace& trace, const SaddlePoint& saddle, double s) {
  require_consecutive(trace, "ergodic rate check");
  const ProblemSpec& spec = *trace.spec;
  const auto& st = trace.states;
  const double C = dual_constant(spec.G(), st.front(), saddle, s);
  auto e = make_entry("ergodic_rate", kStepTolerance, C, s);
  double sum = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n + 1 < st.size(); ++n) {
    const double d = step_dual_norm(spec.G(), st[n], st[n + 1], s);
    sum += d;
    best = std::min(best, d);
    const double count = static_cast<double>(n + 1);
    // The average dominates the minimum, so the average carries the slack.
    e.observe(static_cast<std::int64_t>(n), std::max(sum / count, best), C / count);
  }
  return e;
}

CertificateEntry check_weak_average_gap(const Trace& trace, const SaddlePoint& saddle,
                                        const ProblemSpec& spec, double s, const Vector& probe_x,
                                        const Vector& probe_y, const std::string& name) {
  require_consecutive(trace, "weak average check");
  const auto& st = trace.states;
  const Matrix& F = spec.F();
  const Matrix& G = spec.G();
  const IterateState& init = st.front();
  const double C = (G * (init.y - probe_y)).squaredNorm() + s * s * init.lambda.squaredNorm();
  auto e = make_entry(name, kStepTolerance, C, s);

  const double fx = spec.f().value(probe_x);
  const double gy = spec.g().value(probe_y);
  const Vector probe_dev = F * (probe_x - saddle.x_star) + G * (probe_y - saddle.y_star);
  Vector sx = Vector::Zero(init.x.size());
  Vector sy = Vector::Zero(init.y.size());
  Vector sl = Vector::Zero(init.lambda.size());
  for (std::size_t n = 0; n + 1 < st.size(); ++n) {
    const IterateState& b = st[n + 1];
    sx += b.x;
    sy += b.y;
    sl += b.lambda;
    const double count = static_cast<double>(n + 1);
    const Vector xbar = sx / count;
    const Vector ybar = sy / count;
    const Vector lbar = sl / count;
    const Vector gdy_bar = G * (b.y - init.y) / count;
    const double lhs = spec.f().value(xbar) - fx + spec.g().value(ybar) - gy -
                       (lbar - gdy_bar / s).dot(probe_dev);
    e.observe(static_cast<std::int64_t>(n), lhs, C / (2.0 * s * count));
  }
  return e;
}

CertificateEntry check_strong_average(const Trace& trace, const SaddlePoint& saddle, double s,
                                      double mu, CertificateEntry* shifted) {
  if (!(mu > 0.0)) {
    throw ParameterError("strong convexity certificate unavailable: f has no positive modulus");
  }
  require_consecutive(trace, "strong average check");
  const auto& st = trace.states;
  const IterateState& init = st.front();
  const double lam0 = s * s * (init.lambda - saddle.lambda_star).squaredNorm();
  const double C = (init.x - saddle.x_star).squaredNorm() + lam0;
  auto e = make_entry("strong_average", kStepTolerance, C, s);
  e.constants.mu = mu;
  CertificateEntry alt = make_entry("strong_average_shifted", kStepTolerance, C, s);
  alt.constants.mu = mu;

  Vector sum_all = init.x;
  Vector sum_tail = Vector::Zero(init.x.size());
  for (std::size_t n = 0; n + 1 < st.size(); ++n) {
    sum_all += st[n + 1].x;
    sum_tail += st[n + 1].x;
    const double count = static_cast<double>(n + 1);
    const double rhs = C / (mu * s * count);
    const double lhs = (sum_all / (count + 1.0) - saddle.x_star).squaredNorm();
    e.observe(static_cast<std::int64_t>(n), lhs, rhs);
    alt.observe(static_cast<std::int64_t>(n), (sum_tail / count - saddle.x_star).squaredNorm(), rhs);
  }
  if (shifted) *shifted = std::move(alt);
  return e;
}

CertificateEntry check_numerical_error_monotone(const Trace& trace, const ProblemSpec& spec,
                                                double s) {
  require_consecutive(trace, "numerical error monotonicity check");
  const auto& st = trace.states;
  auto e = make_entry("numerical_error_monotone", kMonotoneTolerance, 0.0, s);
  for (std::size_t k = 0; k + 2 < st.size(); ++k) {
    const double a = numerical_error(st[k], st[k + 1], spec, s);
    const double b = numerical_error(st[k + 1], st[k + 2], spec, s);
    e.observe(st[k + 1].k, b, a);
  }
  return e;
}

CertificateEntry check_last_iterate_rate(const Trace& trace, const SaddlePoint& saddle, double s) {
  require_consecutive(trace, "last iterate check");
  const ProblemSpec& spec = *trace.spec;
  const auto& st = trace.states;
  const double C = dual_constant(spec.G(), st.front(), saddle, s);
  auto e = make_entry("last_iterate_rate", kStepTolerance, C, s);
  for (std::size_t n = 0; n + 1 < st.size(); ++n) {
    e.observe(static_cast<std::int64_t>(n), step_dual_norm(spec.G(), st[n], st[n + 1], s),
              C / static_cast<double>(n + 1));
  }
  return e;
}

CertificateEntry check_three_point_inequality(const Trace& trace, double s) {
  require_consecutive(trace, "three point check");
  const ProblemSpec& spec = *trace.spec;
  const auto& st = trace.states;
  auto e = make_entry("three_point_inequality", kStepTolerance, 0.0, s);
  for (std::size_t k = 0; k + 2 < st.size(); ++k) {
    const Vector dl0 = st[k + 1].lambda - st[k].lambda;
    const Vector dl1 = st[k + 2].lambda - st[k + 1].lambda;
    const Vector gdy0 = spec.G() * (st[k + 1].y - st[k].y);
    const Vector gdy1 = spec.G() * (st[k + 2].y - st[k + 1].y);
    const Vector fdx1 = spec.F() * (st[k + 2].x - st[k + 1].x);
    e.observe(st[k].k, s * s * dl1.dot(dl1 - dl0), (gdy1 - gdy0).dot(fdx1));
  }
  return e;
}

CertificateEntry check_telescoped_numerical_error(const Trace& trace, const SaddlePoint& saddle,
                                                  double s) {
  require_consecutive(trace, "telescoped numerical error check");
  const ProblemSpec& spec = *trace.spec;
  const auto& st = trace.states;
  const double C = dual_constant(spec.G(), st.front(), saddle, s);
  auto e = make_entry("telescoped_numerical_error", kStepTolerance, C, s);
  const double e0 = discrete_lyapunov(st.front(), saddle.y_star, saddle.lambda_star, spec, s);
  double sum = 0.0;
  for (std::size_t n = 0; n + 1 < st.size(); ++n) {
    sum += numerical_error(st[n], st[n + 1], spec, s);
    e.observe(static_cast<std::int64_t>(n), sum, e0);
  }
  return e;
}

CertificateReport check_proximal_rates(const Trace& trace, const SaddlePoint& saddle,
                                       const ProblemSpec& spec, double s, double r) {
  if (trace.config.variant != Variant::General) {
    throw UsageError("proximal certificates need a trace of the general variant");
  }
  require_consecutive(trace, "proximal rate check");
  require_proximal_coefficient(spec, r);
  const auto& st = trace.states;
  const Matrix& G = spec.G();
  const IterateState& init = st.front();
  const double Cr = r * (init.x - saddle.x_star).squaredNorm() + dual_constant(G, init, saddle, s);
  const double gap = r - spec.ftf_norm();

  auto named = [&](const std::string& name, double tol) {
    auto e = make_entry(name, tol, Cr, s);
    e.constants.r = r;
    return e;
  };
  auto avg = named("proximal_step_average", kStepTolerance);
  auto last = named("proximal_step_last", kStepTolerance);
  auto dual = named("proximal_dual_rate", kStepTolerance);
  auto ne_mono = named("extended_numerical_error_monotone", kMonotoneTolerance);
  auto energy = named("extended_energy_descent", kStepTolerance);

  double sum_dx = 0.0;
  double min_dx = std::numeric_limits<double>::infinity();
  double sum_dual = 0.0;
  double min_dual = std::numeric_limits<double>::infinity();
  double prev_ne = 0.0;
  double prev_energy = extended_lyapunov(init, saddle, spec, s, r);
  for (std::size_t n = 0; n + 1 < st.size(); ++n) {
    const IterateState& a = st[n];
    const IterateState& b = st[n + 1];
    const auto idx = static_cast<std::int64_t>(n);
    const double count = static_cast<double>(n + 1);
    const double dx = (b.x - a.x).squaredNorm();
    const double dd = step_dual_norm(G, a, b, s);
    sum_dx += dx;
    min_dx = std::min(min_dx, dx);
    sum_dual += dd;
    min_dual = std::min(min_dual, dd);
    const double bound_x = Cr / (count * gap);
    avg.observe(idx, std::max(sum_dx / count, min_dx), bound_x);
    last.observe(idx, dx, bound_x);
    dual.observe(idx, std::max(sum_dual / count, min_dual), Cr / count);

    const double ne = extended_numerical_error(a, b, spec, s, r);
    if (n > 0) ne_mono.observe(idx, ne, prev_ne);
    prev_ne = ne;
    const double next_energy = extended_lyapunov(b, saddle, spec, s, r);
    energy.observe(idx, next_energy - prev_energy + ne, 0.0);
    prev_energy = next_energy;
  }
  CertificateReport report;
  report.entries = {avg, last, dual, ne_mono, energy};
  return report;
}

CertificateReport certify_standard_trace(const Trace& trace, const SaddlePoint& saddle,
                                         const ProblemSpec& spec, double s) {
  CertificateReport report;
  auto& out = report.entries;
  out.push_back(check_energy_descent(trace, saddle, s));
  const Vector zero_lambda = Vector::Zero(spec.m());
  out.push_back(check_iterative_inequality(trace, spec, s, saddle,
                                           {saddle.x_star, saddle.y_star, zero_lambda},
                                           "iterative_inequality_zero_multiplier"));
  out.push_back(check_iterative_inequality(trace, spec, s, saddle,
                                           {saddle.x_star, saddle.y_star, saddle.lambda_star},
                                           "iterative_inequality_saddle"));
  out.push_back(check_ergodic_rate(trace, saddle, s));
  out.push_back(check_weak_average_gap(trace, saddle, spec, s, saddle.x_star, saddle.y_star,
                                       "weak_average_gap_saddle"));
  out.push_back(check_numerical_error_monotone(trace, spec, s));
  out.push_back(check_last_iterate_rate(trace, saddle, s));
  out.push_back(check_three_point_inequality(trace, s));
  out.push_back(check_telescoped_numerical_error(trace, saddle, s));
  const double mu = spec.f().strong_convexity_modulus();
  if (mu > 0.0) {
    CertificateEntry shifted;
    out.push_back(check_strong_average(trace, saddle, s, mu, &shifted));
    report.informational.push_back(std::move(shifted));
  }
  return report;
}

CertificateReport certify_general_trace(const Trace& trace, const SaddlePoint& saddle,
                                        const ProblemSpec& spec, double s, double r) {
  return check_proximal_rates(trace, saddle, spec, s, r);
}

}  // namespace admmcert
