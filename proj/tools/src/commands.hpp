#pragma once

#include <cstdint>
#include <functional>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace admmcert::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCertificateFailure = 1;
inline constexpr int kExitUsage = 2;

struct GenerateOptions {
  std::string kind;  ///< lasso | tv | trend | basis_pursuit
  std::string dims;  ///< "d" or "rows x d"
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

/// Flags override the manifest when both are given.
struct RunOptions {
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> spec;
  std::optional<std::filesystem::path> out;
  std::optional<double> s;
  std::optional<std::int64_t> N;
  std::optional<std::string> variant;
  std::optional<double> r;
  std::optional<double> delta;
  std::optional<double> horizon;
  std::optional<double> tol;
};

struct VerifyOptions {
  std::filesystem::path out = "verify_out";
};

int cmd_generate(const GenerateOptions& opt, std::ostream& log);
int cmd_solve(const RunOptions& opt, std::ostream& log);
int cmd_simulate(const RunOptions& opt, std::ostream& log);
int cmd_verify(const VerifyOptions& opt, std::ostream& log);
int cmd_report(const std::filesystem::path& certificate_json, std::ostream& log);

/// Runs `body` and maps library exceptions to exit codes.
int guarded(std::ostream& err, const std::function<int()>& body);

}  // namespace admmcert::cli
