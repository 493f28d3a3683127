#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace branchkit {

// One row of a verification table: a measured value against its bound. Counts of
// violated cases use tolerance 0.
struct SuiteCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SuiteResult {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<SuiteCheck> checks;
  bool pass() const;
  // "suite,seed,check,value,tolerance,status" rows with round-trip precision.
  std::string table() const;
};

const std::vector<std::string>& suite_names();
// Throws InvalidInput for an unknown suite name.
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

// Worst residual per identity of the frame-field algebra over random fields: the
// frame matrix, right product and metric product rules. Equivalence items count
// disagreeing nodes.
std::map<std::string, double> frame_algebra_residuals(std::mt19937_64& rng, int trials);

}  // namespace branchkit
