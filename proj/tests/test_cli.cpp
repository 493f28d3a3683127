#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "branchkit/cli.hpp"

using namespace branchkit;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("branchkit-cli-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig command(const std::string& name, const fs::path& out) {
  RunConfig rc;
  rc.command = name;
  rc.out = out;
  return rc;
}

}  // namespace

TEST(Cli, VerifyZorderPasses) {
  RunConfig rc = command("verify", scratch("zorder"));
  rc.suite = "zorder";
  rc.seed = 7;
  const RunOutcome o = run(rc);
  EXPECT_EQ(o.exit_code, 0) << o.summary.dump();
  EXPECT_TRUE(fs::exists(*rc.out / "verify_zorder.csv"));
}

TEST(Cli, VerifyTablesAreReproducible) {
  RunConfig a = command("verify", scratch("repro_a"));
  RunConfig b = command("verify", scratch("repro_b"));
  a.suite = b.suite = "representation";
  a.seed = b.seed = 11;
  ASSERT_EQ(run(a).exit_code, 0);
  ASSERT_EQ(run(b).exit_code, 0);
  EXPECT_EQ(slurp(*a.out / "verify_representation.csv"), slurp(*b.out / "verify_representation.csv"));
}

TEST(Cli, UnknownSuiteIsInvalidInput) {
  RunConfig rc = command("verify", scratch("nosuite"));
  rc.suite = "nonsense";
  const RunOutcome o = run(rc);
  EXPECT_EQ(o.exit_code, 2);
  EXPECT_EQ(o.summary.at("code"), "InvalidInput");
}

TEST(Cli, AnalyzePureBranchReportsLimitedIndex) {
  RunConfig rc = command("analyze", scratch("pure"));
  rc.fixture = "pure:1";
  const RunOutcome o = run(rc);
  EXPECT_EQ(o.exit_code, 0) << o.summary.dump();
  EXPECT_EQ(o.summary.at("iota").get<std::string>().rfind("≥", 0), 0u);
  EXPECT_TRUE(fs::exists(*rc.out / "branch_report.json"));
}

TEST(Cli, BuildThenAnalyzeRoundTrip) {
  RunConfig build = command("build", scratch("round_trip"));
  build.fixture = "weierstrass:2,1";
  ASSERT_EQ(run(build).exit_code, 0);
  RunConfig analyze = command("analyze", scratch("round_trip_analyze"));
  analyze.input = *build.out / "map.json";
  const RunOutcome o = run(analyze);
  ASSERT_EQ(o.exit_code, 0) << o.summary.dump();
  EXPECT_EQ(o.summary.at("iota"), "3");
  EXPECT_EQ(o.summary.at("rho"), "2");
  EXPECT_EQ(o.summary.at("estimate"), "equality");
}

TEST(Cli, CurvatureClassifiesDivergentFixture) {
  RunConfig rc = command("curvature", scratch("curv"));
  rc.fixture = "weierstrass:1,1";
  const RunOutcome o = run(rc);
  EXPECT_EQ(o.exit_code, 0) << o.summary.dump();
  EXPECT_EQ(o.summary.at("classification"), "Divergent");
  for (const char* f : {"curvature_report.json", "annuli.csv", "curvature_fields.csv", "sec_heatmap.pgm"})
    EXPECT_TRUE(fs::exists(*rc.out / f)) << f;
  EXPECT_EQ(slurp(*rc.out / "sec_heatmap.pgm").substr(0, 2), "P5");
}

TEST(Cli, NormalizeWritesDiffeo) {
  RunConfig rc = command("normalize", scratch("norm"));
  rc.fixture = "weierstrass:1,2";
  const RunOutcome o = run(rc);
  EXPECT_EQ(o.exit_code, 0) << o.summary.dump();
  EXPECT_TRUE(fs::exists(*rc.out / "diffeo.json"));
}

TEST(Cli, ConfigFileDrivesTheRun) {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  std::ofstream(dir / "run.json") << R"({"schema_version": 1, "command": "analyze",
    "map": {"type": "weierstrass", "s": 1, "k": 3}, "grid": {"n_r": 64, "n_theta": 64}, "out": "result"})";
  RunConfig rc;
  rc.command = "analyze";
  rc.config = dir / "run.json";
  const RunOutcome o = run(rc);
  EXPECT_EQ(o.exit_code, 0) << o.summary.dump();
  EXPECT_EQ(o.summary.at("iota"), "4");
  EXPECT_TRUE(fs::exists(dir / "result" / "branch_report.json"));
}

TEST(Cli, InvalidConfigsExitTwo) {
  const fs::path dir = scratch("bad_config");
  fs::create_directories(dir);
  const char* bad[] = {
      R"({"schema_version": 1, "surprise": true})",
      R"({"schema_version": 2})",
      R"({"schema_version": 1, "grid": {"n_r": 8}})",
      R"({"schema_version": 1, "map": {"type": "torus"}})",
      "not json",
  };
  int i = 0;
  for (const char* text : bad) {
    const fs::path p = dir / ("c" + std::to_string(i++) + ".json");
    std::ofstream(p) << text;
    RunConfig rc = command("analyze", dir / "out");
    rc.config = p;
    const RunOutcome o = run(rc);
    EXPECT_EQ(o.exit_code, 2) << text;
    EXPECT_EQ(o.summary.at("status"), "error");
  }
}

TEST(Cli, MissingMapAndBadFixture) {
  EXPECT_EQ(run(command("analyze", scratch("nomap"))).exit_code, 2);
  RunConfig rc = command("analyze", scratch("badfix"));
  rc.fixture = "weierstrass:1";
  EXPECT_EQ(run(rc).exit_code, 2);
}

TEST(Cli, ImmersionIsNotABranchPoint) {
  const fs::path dir = scratch("immersion");
  fs::create_directories(dir);
  // fhat = (x, y, 0): an immersion, so there is no branch point to analyze.
  std::ofstream(dir / "map.json") << R"({"schema_version": 1, "label": "plane", "s": 1, "n": 3,
    "radius": 1.0, "halvings": 0, "metric": "euclidean", "jet_order": 4, "components": [
    {"order": 4, "real": true, "coeffs": [[1, 0, 0.5, 0], [0, 1, 0.5, 0]]},
    {"order": 4, "real": true, "coeffs": [[1, 0, 0, -0.5], [0, 1, 0, 0.5]]},
    {"order": 4, "real": true, "coeffs": []}]})";
  RunConfig rc = command("analyze", dir / "out");
  rc.input = dir / "map.json";
  const RunOutcome o = run(rc);
  EXPECT_EQ(o.exit_code, 1) << o.summary.dump();
  EXPECT_EQ(o.summary.at("code"), "NotABranchPoint");
  EXPECT_TRUE(fs::exists(dir / "out" / "error.json"));
}

TEST(Cli, ExitCodeMapping) {
  EXPECT_EQ(exit_code_for(ErrorCode::InvalidInput), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::GridTooCoarse), 2);
  EXPECT_EQ(exit_code_for(ErrorCode::NewtonDiverged), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::SolverDiverged), 3);
  EXPECT_EQ(exit_code_for(ErrorCode::NotABranchPoint), 1);
  EXPECT_EQ(exit_code_for(ErrorCode::QuasiBoundViolated), 1);
}
