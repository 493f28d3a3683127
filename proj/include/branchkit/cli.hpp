#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "branchkit/error.hpp"
#include "branchkit/io.hpp"

namespace branchkit {

// Bounds applied by the commands when deciding between exit 0 and 1.
struct Tolerances {
  double frame = kFrameTolerance;
  double relation = kRelationTolerance;
  double brioschi = kBrioschiTolerance;
  double diffeo = kDiffeoTolerance;
  double beltrami = 1e-6;
};

// Command-line flags. Set fields override the config file, which overrides the
// defaults.
struct RunConfig {
  std::string command;  // build, analyze, normalize, curvature, verify
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> input;  // SurfaceMap JSON
  std::optional<std::string> fixture;          // e.g. weierstrass:1,2
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> suite;
  std::optional<std::pair<int, int>> grid;
  std::optional<double> radius;
  std::optional<int> jet_order;
};

inline constexpr std::uint64_t kDefaultSeed = 7;
inline constexpr int kConfigSchemaVersion = 1;

struct RunOutcome {
  int exit_code = 0;
  Json summary;  // printed on stdout; an error object on failure
};

// 1 for failed mathematical checks, 2 for invalid input, 3 for numerical failure.
int exit_code_for(ErrorCode code);

// Never throws; errors come back as an error summary with the matching exit code,
// also written to error.json in the output directory when possible.
RunOutcome run(const RunConfig& config);

}  // namespace branchkit
