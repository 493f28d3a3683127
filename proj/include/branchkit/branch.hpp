#pragma once

#include <string>
#include <vector>

#include "branchkit/builder.hpp"

namespace branchkit {

// Scan of the branch-coordinate conditions (4.1) and (4.2) over polar nodes.
struct BranchConditions {
  bool frontal_ok = false;
  bool quasiregular_ok = false;
  double min_frontal_det = 0.0;   // over nodes; equals 1 at the origin
  double min_denominator = 0.0;   // min |1 + (d'_1 + d'_2)/2|
  double sup_ratio = 0.0;         // sup |(d'_1 - d'_2)/2| / |1 + (d'_1 + d'_2)/2|
  bool ok() const { return frontal_ok && quasiregular_ok; }
};

BranchConditions scan_branch_conditions(const SurfaceMap& f, double radius, int n_r = 128,
                                        int n_theta = 128);

struct BranchData {
  int s = 0;
  int n = 0;
  std::vector<BiJet> d;  // dfhat/dz = (s+1) z^s d
  BiJet d1p;             // 2 d_1 - 1
  BiJet d2p;             // 2i d_2 - 1
  std::vector<BiJet> l;  // d^2 fhat / dzbar dz = |z|^{2s} l
  GridPtr grid;
  GridField d_grid;
  GridField l_grid;
  double l_imag = 0.0;   // max |Im l| over the grid
  BranchConditions conditions;
};

// Throws AmbientFrameMismatch, carrying the angle, when the leading vector is a
// block rotation of the canonical one.
int detect_branch_order(const SurfaceMap& f);
BranchData extract_branch_data(const SurfaceMap& f);

inline constexpr double kNonRealTolerance = 1e-6;

struct DistinguishedCoefficient {
  BiJet jet;          // jet of the extension, valid to order `smoothness`
  GridField grid;
  int smoothness = 0; // largest m with d^j conj(d'_1 - d'_2)/dzbar^j (0) = 0, j <= m, capped
  int leading_zbar_order = 0;  // first j with d^j conj(d'_1 - d'_2)/dzbar^j (0) != 0
  bool leading_limited = false;
  double sup = 0.0;
};

DistinguishedCoefficient distinguished_coefficient(const BranchData& bd);

struct BranchIndex {
  ZOrder iota = ZOrder::finite(0);  // ord_z(fhat_3, ..., fhat_n) - 1
  ZOrder rho = ZOrder::finite(0);   // ord_z(conj a) - (s+1)
};

BranchIndex index_and_degree(const SurfaceMap& f);

// |d^t G d| per node, G = e^{2 phi} Id.
GridField conformality_residual(const SurfaceMap& f, const BranchData& bd);
inline constexpr double kConformalTolerance = 1e-6;

struct MeanCurvatureExtension {
  GridField H;                 // n real components per node
  Eigen::VectorXd at_origin;   // from jets
  double denominator_origin = 0.0;
  double min_denominator_ratio = 0.0;
};

MeanCurvatureExtension mean_curvature_extension(const SurfaceMap& f, const BranchData& bd);

enum class EstimateStatus { Holds, Equality, Violated, Inconclusive };

struct EstimateReport {
  EstimateStatus status = EstimateStatus::Inconclusive;
  bool inequality = false;  // rho >= 2(iota - s)
  bool equality = false;    // rho == 2(iota - s)
  std::string detail;
};

EstimateReport check_estimate(const BranchIndex& inv, int s, int n);
const char* estimate_status_name(EstimateStatus status);

}  // namespace branchkit
