#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "admmcert/instances.hpp"
#include "admmcert/problem_io.hpp"
#include "commands.hpp"

using namespace admmcert;
using namespace admmcert::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / "admmcert_cli_tests" / info->name();
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(parse_double(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

int generate(const std::string& kind, const std::string& dims, std::uint64_t seed,
             const fs::path& out) {
  std::ostringstream log;
  std::ostringstream err;
  return guarded(err, [&] { return cmd_generate({kind, dims, seed, out}, log); });
}

}  // namespace

TEST(Generate, DifferenceOperators) {
  const fs::path dir = scratch();
  ASSERT_EQ(generate("tv", "4", 1, dir / "tv.txt"), kExitPass);
  const Matrix F = read_problem_file(dir / "tv.txt").F();
  Matrix expect(3, 4);
  expect << 1, -1, 0, 0, 0, 1, -1, 0, 0, 0, 1, -1;
  EXPECT_EQ(F, expect);

  ASSERT_EQ(generate("trend", "4", 1, dir / "trend.txt"), kExitPass);
  Matrix expect2(2, 4);
  expect2 << 1, -2, 1, 0, 0, 1, -2, 1;
  EXPECT_EQ(read_problem_file(dir / "trend.txt").F(), expect2);
}

TEST(Generate, DeterministicPerSeed) {
  const fs::path dir = scratch();
  for (const char* kind : {"lasso", "tv", "trend", "basis_pursuit"}) {
    ASSERT_EQ(generate(kind, "6x12", 77, dir / "a.txt"), kExitPass) << kind;
    ASSERT_EQ(generate(kind, "6x12", 77, dir / "b.txt"), kExitPass);
    ASSERT_EQ(generate(kind, "6x12", 78, dir / "c.txt"), kExitPass);
    EXPECT_EQ(slurp(dir / "a.txt"), slurp(dir / "b.txt")) << kind;
    EXPECT_NE(slurp(dir / "a.txt"), slurp(dir / "c.txt")) << kind;
  }
}

TEST(Generate, RejectsUnsupportedDims) {
  const fs::path dir = scratch();
  EXPECT_EQ(generate("trend", "2", 1, dir / "x.txt"), kExitUsage);
  EXPECT_EQ(generate("lasso", "0", 1, dir / "x.txt"), kExitUsage);
  EXPECT_EQ(generate("lasso", "abc", 1, dir / "x.txt"), kExitUsage);
  EXPECT_EQ(generate("spline", "5", 1, dir / "x.txt"), kExitUsage);
}

TEST(Solve, ScalarLassoManifestPasses) {
  const fs::path dir = scratch();
  write_problem_file(dir / "scalar.txt", scalar_lasso());
  std::ofstream(dir / "run.ini") << "[problem]\nspec = scalar.txt\n[solver]\nN = 500\n"
                                    "[output]\ndir = out\n";
  RunOptions opt;
  opt.manifest = dir / "run.ini";
  std::ostringstream log;
  std::ostringstream err;
  ASSERT_EQ(guarded(err, [&] { return cmd_solve(opt, log); }), kExitPass) << err.str() << log.str();
  const auto j = nlohmann::json::parse(slurp(dir / "out" / "certificates.json"));
  EXPECT_TRUE(j.at("all_pass").get<bool>());
  for (const auto& e : j.at("certificates")) EXPECT_TRUE(e.at("pass").get<bool>());
  EXPECT_TRUE(fs::exists(dir / "out" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "trace.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "metadata.json"));

  // Identical artifacts on rerun; only the sidecar carries a timestamp.
  const std::string first = slurp(dir / "out" / "trace.csv") + slurp(dir / "out" / "trace.json") +
                            slurp(dir / "out" / "certificates.json");
  ASSERT_EQ(guarded(err, [&] { return cmd_solve(opt, log); }), kExitPass);
  EXPECT_EQ(first, slurp(dir / "out" / "trace.csv") + slurp(dir / "out" / "trace.json") +
                       slurp(dir / "out" / "certificates.json"));
}

TEST(Solve, ProximalCoefficientBelowThreshold) {
  const fs::path dir = scratch();
  write_problem_file(dir / "tv.txt", tv_denoising(8, 2));
  RunOptions opt;
  opt.spec = dir / "tv.txt";
  opt.out = dir / "out";
  opt.variant = "general";
  opt.r = 1.0;
  std::ostringstream log;
  std::ostringstream err;
  EXPECT_NE(guarded(err, [&] { return cmd_solve(opt, log); }), kExitPass);
  EXPECT_NE(err.str().find("greater than the maximum eigenvalue"), std::string::npos) << err.str();
}

TEST(Solve, GeneralVariantCertifies) {
  const fs::path dir = scratch();
  write_problem_file(dir / "tv.txt", tv_denoising(8, 2));
  RunOptions opt;
  opt.spec = dir / "tv.txt";
  opt.out = dir / "out";
  opt.variant = "general";
  opt.N = 300;
  std::ostringstream log;
  std::ostringstream err;
  EXPECT_EQ(guarded(err, [&] { return cmd_solve(opt, log); }), kExitPass) << err.str();
  EXPECT_NE(log.str().find("proximal_step_average"), std::string::npos);
}

TEST(Solve, MissingSpecIsUsageError) {
  std::ostringstream log;
  std::ostringstream err;
  EXPECT_EQ(guarded(err, [&] { return cmd_solve(RunOptions{}, log); }), kExitUsage);
}

TEST(Simulate, AlignedFilesAndColumns) {
  const fs::path dir = scratch();
  const auto strong = strongly_convex_instances();
  write_problem_file(dir / "lasso.txt", strong[1].spec);
  RunOptions opt;
  opt.spec = dir / "lasso.txt";
  opt.out = dir / "out";
  opt.delta = 0.05;
  opt.horizon = 5.0;
  std::ostringstream log;
  std::ostringstream err;
  ASSERT_EQ(guarded(err, [&] { return cmd_simulate(opt, log); }), kExitPass) << err.str();
  for (const char* f : {"discrete.csv", "high_res.csv", "low_res.csv", "summary.csv"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  }
  const auto summary = read_csv(dir / "out" / "summary.csv");
  ASSERT_EQ(summary.size(), 6u);
  EXPECT_GT(summary.front()[2], 0.0);
  for (const auto& row : summary) EXPECT_LE(row[3], 1e-10);
}

TEST(Simulate, UnitRatioMatchesDiscreteFile) {
  const fs::path dir = scratch();
  write_problem_file(dir / "tv.txt", tv_denoising(6, 3));
  RunOptions opt;
  opt.spec = dir / "tv.txt";
  opt.out = dir / "out";
  opt.delta = 1.0;
  opt.horizon = 30.0;
  std::ostringstream log;
  std::ostringstream err;
  ASSERT_EQ(guarded(err, [&] { return cmd_simulate(opt, log); }), kExitPass) << err.str();
  const auto disc = read_csv(dir / "out" / "discrete.csv");
  const auto hi = read_csv(dir / "out" / "high_res.csv");
  ASSERT_EQ(disc.size(), hi.size());
  const std::size_t width = 6 + 5 + 5;
  for (std::size_t k = 0; k < disc.size(); ++k) {
    for (std::size_t c = 1; c <= width; ++c) {
      EXPECT_NEAR(disc[k][c], hi[k][c], 1e-12 * (1 + std::abs(disc[k][c])));
    }
  }
}

TEST(Report, ExitCodeFollowsCertificates) {
  const fs::path dir = scratch();
  std::ofstream(dir / "ok.json")
      << R"({"all_pass":true,"certificates":[{"theorem":"a","pass":true,"worst_slack":-1,"tolerance":1e-9}]})";
  std::ofstream(dir / "bad.json")
      << R"({"all_pass":false,"certificates":[{"theorem":"a","pass":false,"worst_slack":null,"tolerance":1e-9}]})";
  std::ofstream(dir / "junk.json") << "{not json";
  std::ostringstream log;
  std::ostringstream err;
  EXPECT_EQ(guarded(err, [&] { return cmd_report(dir / "ok.json", log); }), kExitPass);
  EXPECT_EQ(guarded(err, [&] { return cmd_report(dir / "bad.json", log); }),
            kExitCertificateFailure);
  EXPECT_EQ(guarded(err, [&] { return cmd_report(dir / "junk.json", log); }), kExitUsage);
  EXPECT_EQ(guarded(err, [&] { return cmd_report(dir / "missing.json", log); }), kExitUsage);
}
