#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "admmcert/solver.hpp"

namespace admmcert {

/// Run description read from a flat key=value file with section headers:
///
///   [problem]  spec = path/to/instance.txt
///   [solver]   s, N, variant (standard|general), r, record_every, stop_tol
///   [simulate] delta, horizon, huber_delta
///   [oracle]   tol
///   [output]   dir
///   [run]      seed, certify (true|false)
///
/// Relative paths resolve against the manifest's directory. `#` starts a
/// comment line. Unknown sections or keys are errors.
struct RunManifest {
  std::filesystem::path spec_path;
  double s = 1.0;
  std::int64_t N = 1000;
  Variant variant = Variant::Standard;
  std::optional<double> r;
  std::int64_t record_every = 1;
  std::optional<double> stop_tol;
  double delta = 0.01;
  double horizon = 20.0;
  double huber_delta = 1e-3;
  double oracle_tol = 1e-10;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  bool certify = true;

  SolverConfig solver_config() const;
};

RunManifest parse_manifest(std::istream& in, const std::filesystem::path& base_dir = {});
RunManifest read_manifest_file(const std::filesystem::path& path);
void write_manifest(std::ostream& out, const RunManifest& manifest);

}  // namespace admmcert
