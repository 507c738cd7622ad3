#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "admmcert/acceptance.hpp"
#include "admmcert/diagnostics.hpp"
#include "admmcert/errors.hpp"
#include "admmcert/instances.hpp"
#include "admmcert/manifest.hpp"
#include "admmcert/ode.hpp"
#include "admmcert/oracle.hpp"
#include "admmcert/problem_io.hpp"
#include "admmcert/trace_io.hpp"

namespace admmcert::cli {
namespace {

namespace fs = std::filesystem;

struct Dims {
  Index rows = 0;
  Index d = 0;
};

Dims parse_dims(const std::string& text) {
  Dims out;
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) {
      out.d = std::stoll(text);
    } else {
      out.rows = std::stoll(text.substr(0, x));
      out.d = std::stoll(text.substr(x + 1));
    }
  } catch (const std::exception&) {
    throw UsageError("dims must look like 'd' or 'rows x d', got '" + text + "'");
  }
  if (out.d < 1 || (x != std::string::npos && out.rows < 1)) {
    throw UsageError("dims must be positive, got '" + text + "'");
  }
  return out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

void write_metadata(const fs::path& dir, const std::string& command) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::ostringstream stamp;
  stamp << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
  nlohmann::ordered_json j;
  j["command"] = command;
  j["created_utc"] = stamp.str();
  write_text(dir / "metadata.json", j.dump(2));
}

RunManifest resolve_manifest(const RunOptions& opt) {
  RunManifest m = opt.manifest ? read_manifest_file(*opt.manifest) : RunManifest{};
  if (opt.spec) m.spec_path = *opt.spec;
  if (opt.out) m.out_dir = *opt.out;
  if (opt.s) m.s = *opt.s;
  if (opt.N) m.N = *opt.N;
  if (opt.variant) {
    if (*opt.variant == "standard") {
      m.variant = Variant::Standard;
    } else if (*opt.variant == "general") {
      m.variant = Variant::General;
    } else {
      throw UsageError("--variant must be standard or general");
    }
  }
  if (opt.r) m.r = *opt.r;
  if (opt.delta) m.delta = *opt.delta;
  if (opt.horizon) m.horizon = *opt.horizon;
  if (opt.tol) m.oracle_tol = *opt.tol;
  if (m.spec_path.empty()) throw UsageError("no problem file given (--spec or [problem] spec)");
  return m;
}

void print_report(std::ostream& log, const CertificateReport& rep) {
  for (const auto& e : rep.entries) {
    log << (e.pass ? "PASS " : "FAIL ") << e.theorem << "  worst slack " << e.worst_slack
        << " at " << e.worst_index << '\n';
  }
}

}  // namespace

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << '\n';
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitCertificateFailure;
  }
  return kExitUsage;
}

int cmd_generate(const GenerateOptions& opt, std::ostream& log) {
  const Dims dims = parse_dims(opt.dims);
  auto rows_or = [&](Index fallback) { return dims.rows > 0 ? dims.rows : fallback; };
  std::optional<ProblemSpec> spec;
  if (opt.kind == "lasso") {
    spec = random_lasso(rows_or(std::max<Index>(1, dims.d / 2)), dims.d,
                        std::max<Index>(1, dims.d / 10), opt.seed);
  } else if (opt.kind == "tv") {
    if (dims.d < 2) throw UsageError("tv needs d >= 2");
    spec = tv_denoising(dims.d, opt.seed);
  } else if (opt.kind == "trend") {
    if (dims.d < 3) throw UsageError("trend filtering needs d >= 3");
    spec = trend_filtering(dims.d, opt.seed);
  } else if (opt.kind == "basis_pursuit") {
    const Index rows = rows_or(std::max<Index>(1, dims.d / 3));
    if (rows > dims.d) throw UsageError("basis pursuit needs rows <= d");
    spec = random_basis_pursuit(rows, dims.d, std::max<Index>(1, rows / 3), opt.seed);
  } else {
    throw UsageError("unknown kind '" + opt.kind + "' (lasso, tv, trend, basis_pursuit)");
  }
  if (opt.out.empty()) {
    write_problem(log, *spec);
  } else {
    if (opt.out.has_parent_path()) fs::create_directories(opt.out.parent_path());
    write_problem_file(opt.out, *spec);
    log << "wrote " << opt.out.string() << '\n';
  }
  return kExitPass;
}

int cmd_solve(const RunOptions& opt, std::ostream& log) {
  const RunManifest m = resolve_manifest(opt);
  const ProblemSpec spec = read_problem_file(m.spec_path);
  const SolverConfig cfg = m.solver_config();
  cfg.validate(spec);
  const SaddlePoint saddle = saddle_point_oracle(spec, m.oracle_tol);
  const Trace trace = run(spec, cfg, IterateState::zeros(spec), &saddle);

  fs::create_directories(m.out_dir);
  {
    auto out = open_out(m.out_dir / "trace.csv");
    write_trace_csv(out, trace);
  }
  {
    auto out = open_out(m.out_dir / "trace.json");
    write_trace_json(out, trace);
  }
  write_metadata(m.out_dir, "solve");

  if (!m.certify) {
    log << "trace written to " << m.out_dir.string() << " (certificates disabled)\n";
    return kExitPass;
  }
  if (!trace.is_consecutive()) {
    throw UsageError("certificates need record_every = 1 and no early stop");
  }
  const CertificateReport rep =
      cfg.variant == Variant::General
          ? certify_general_trace(trace, saddle, spec, cfg.s, *trace.config.r)
          : certify_standard_trace(trace, saddle, spec, cfg.s);
  write_text(m.out_dir / "certificates.json", rep.to_json());
  print_report(log, rep);
  if (!rep.all_pass()) {
    for (const auto& name : rep.failures()) log << "failed: " << name << '\n';
    return kExitCertificateFailure;
  }
  return kExitPass;
}

int cmd_simulate(const RunOptions& opt, std::ostream& log) {
  const RunManifest m = resolve_manifest(opt);
  ProblemSpec spec = read_problem_file(m.spec_path);
  if (m.delta < m.s && spec.g().is_l1()) spec = spec.smoothed(m.huber_delta);

  IntegratorConfig ic;
  ic.s = m.s;
  ic.delta = m.delta;
  ic.T = m.horizon;
  ic.validate();
  const SaddlePoint saddle = saddle_point_oracle(spec, m.oracle_tol);

  const Vector X0 = Vector::Zero(spec.d1());
  const Vector Y0 = Vector::Constant(spec.d2(), 0.5);
  const ContinuousState init = consistent_initial_state(spec, X0, Y0);
  const ContinuousTrace hi = simulate_high_res(spec, ic, init, &saddle);

  SolverConfig cfg;
  cfg.s = m.s;
  cfg.N = std::max<std::int64_t>(1, std::llround(m.horizon / m.s));
  const Trace discrete = run(spec, cfg, IterateState{init.X, init.Y, init.Lambda, 0}, &saddle);

  std::optional<ContinuousTrace> lo;
  try {
    lo = simulate_low_res(spec, ic, X0, &saddle);
  } catch (const Error& e) {
    log << "low-resolution flow skipped: " << e.what() << '\n';
  }

  fs::create_directories(m.out_dir);
  {
    auto out = open_out(m.out_dir / "discrete.csv");
    write_trace_csv(out, discrete);
  }
  {
    auto out = open_out(m.out_dir / "high_res.csv");
    write_continuous_csv(out, hi);
  }
  if (lo) {
    auto out = open_out(m.out_dir / "low_res.csv");
    write_continuous_csv(out, *lo);
  }

  auto out = open_out(m.out_dir / "summary.csv");
  out << "t,discrete_deviation,high_res_deviation,low_res_deviation,discrete_lyapunov,"
         "high_res_lyapunov,low_res_lyapunov\n";
  log << std::setw(8) << "t" << std::setw(16) << "admm dev" << std::setw(16) << "high-res dev"
      << std::setw(16) << "low-res dev" << '\n';
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& st : discrete.states) {
    const double t = static_cast<double>(st.k) * m.s;
    const auto idx = static_cast<std::size_t>(std::llround(t / m.delta));
    if (idx >= hi.states.size()) break;
    const double d_dev = spec.constraint_residual(st.x, st.y).norm();
    const double d_lyap = discrete.diagnostics.at("lyapunov").at(static_cast<std::size_t>(st.k));
    const double lo_dev = lo ? lo->deviation.at(idx) : nan;
    const double lo_lyap = lo ? lo->lyapunov.at(idx) : nan;
    out << format_double(t) << ',' << format_double(d_dev) << ',' << format_double(hi.deviation[idx])
        << ',' << format_double(lo_dev) << ',' << format_double(d_lyap) << ','
        << format_double(hi.lyapunov[idx]) << ',' << format_double(lo_lyap) << '\n';
    log << std::setw(8) << t << std::setw(16) << d_dev << std::setw(16) << hi.deviation[idx]
        << std::setw(16) << lo_dev << '\n';
  }
  write_metadata(m.out_dir, "simulate");
  return kExitPass;
}

int cmd_verify(const VerifyOptions& opt, std::ostream& log) {
  const AcceptanceReport rep = run_acceptance();
  fs::create_directories(opt.out);
  write_text(opt.out / "certificates.json", rep.to_json());
  write_text(opt.out / "timings.json", rep.timing_json());
  write_metadata(opt.out, "verify");
  for (const auto& c : rep.criteria) {
    log << (c.pass ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << "  ("
        << std::fixed << std::setprecision(2) << c.seconds << " s) " << std::defaultfloat
        << c.detail << '\n';
  }
  if (!rep.all_pass()) {
    for (const auto& f : rep.failures()) log << "failed: " << f << '\n';
    return kExitCertificateFailure;
  }
  return kExitPass;
}

int cmd_report(const fs::path& certificate_json, std::ostream& log) {
  std::ifstream in(certificate_json);
  if (!in) throw FormatError("cannot open " + certificate_json.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed certificate json: ") + e.what());
  }
  // Accept both the solve layout and the verify layout.
  const nlohmann::json& body = j.contains("report") ? j["report"] : j;
  if (!body.contains("certificates")) throw FormatError("no certificates array in file");
  bool ok = true;
  for (const auto& e : body["certificates"]) {
    const bool pass = e.at("pass").get<bool>();
    ok = ok && pass;
    log << (pass ? "PASS " : "FAIL ") << e.at("theorem").get<std::string>() << "  worst slack ";
    if (e.at("worst_slack").is_null()) {
      log << "n/a";
    } else {
      log << e.at("worst_slack").get<double>();
    }
    log << "  tol " << e.at("tolerance").get<double>() << '\n';
  }
  if (j.contains("criteria")) {
    for (const auto& c : j["criteria"]) {
      const bool pass = c.at("pass").get<bool>();
      ok = ok && pass;
      log << (pass ? "PASS" : "FAIL") << " criterion " << c.at("id").get<int>() << ' '
          << c.at("name").get<std::string>() << '\n';
    }
  }
  return ok ? kExitPass : kExitCertificateFailure;
}

}  // namespace admmcert::cli
