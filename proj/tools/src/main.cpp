#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace admmcert::cli;
  CLI::App app{"Two-block ADMM solver with convergence certificates"};
  app.require_subcommand(1);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "write a random instance file");
  generate->add_option("--kind", gen.kind, "lasso | tv | trend | basis_pursuit")->required();
  generate->add_option("--dims", gen.dims, "d or rows x d, e.g. 20x50")->required();
  generate->add_option("--seed", gen.seed, "64-bit seed");
  generate->add_option("--out", gen.out, "instance file (stdout when omitted)");

  RunOptions run;
  auto add_run_flags = [&run](CLI::App* cmd) {
    cmd->add_option("--manifest", run.manifest, "key=value run manifest");
    cmd->add_option("--spec", run.spec, "problem instance file");
    cmd->add_option("--out", run.out, "output directory");
    cmd->add_option("--s", run.s, "step size s > 0");
    cmd->add_option("--N", run.N, "iteration count");
    cmd->add_option("--variant", run.variant, "standard | general");
    cmd->add_option("--r", run.r, "proximal coefficient of the general variant");
    cmd->add_option("--delta", run.delta, "ODE time step");
    cmd->add_option("--horizon", run.horizon, "ODE horizon T");
    cmd->add_option("--tol", run.tol, "saddle oracle KKT tolerance");
  };
  auto* solve = app.add_subcommand("solve", "run ADMM and certify the trace");
  add_run_flags(solve);
  auto* simulate = app.add_subcommand("simulate", "integrate the high- and low-resolution ODEs");
  add_run_flags(simulate);

  VerifyOptions ver;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--out", ver.out, "output directory");

  std::string report_path;
  auto* report = app.add_subcommand("report", "summarize a certificate JSON file");
  report->add_option("file", report_path, "certificates.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  return guarded(std::cerr, [&]() -> int {
    if (*generate) return cmd_generate(gen, std::cout);
    if (*solve) return cmd_solve(run, std::cout);
    if (*simulate) return cmd_simulate(run, std::cout);
    if (*verify) return cmd_verify(ver, std::cout);
    return cmd_report(report_path, std::cout);
  });
}
