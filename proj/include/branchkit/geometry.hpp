#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "branchkit/branch.hpp"

namespace branchkit {

// Per-node real matrices of one shape. Tuples of sections of R^n are stored by
// their standard-coordinate matrices, one column per section.
class MatrixField {
 public:
  MatrixField() = default;
  MatrixField(GridPtr grid, int rows, int cols, std::size_t count);
  // Adopts per-node values; throws ShapeMismatch unless every shape agrees.
  MatrixField(GridPtr grid, std::vector<Eigen::MatrixXd> values);

  const GridPtr& grid_ptr() const { return grid_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t node_count() const { return values_.size(); }
  Eigen::MatrixXd& at(std::size_t i) { return values_[i]; }
  const Eigen::MatrixXd& at(std::size_t i) const { return values_[i]; }
  double max_abs() const;

 private:
  GridPtr grid_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Eigen::MatrixXd> values_;
};

// Matrix field of U in the frame E: E^{-1} U. Throws RankDeficient when E is
// not a frame at some node.
MatrixField frame_matrix(const MatrixField& E, const MatrixField& U);
// U B, the tuple with j-th section sum_i B_ij U_i.
MatrixField right_product(const MatrixField& U, const MatrixField& B);
// U^t G V for an ambient metric matrix G.
MatrixField gram(const MatrixField& U, const MatrixField& V, const MatrixField& G);
// Largest entrywise difference; throws ShapeMismatch.
double max_difference(const MatrixField& a, const MatrixField& b);

// Jacobian decomposition J_fhat = W J' on the analysis grid.
struct FrontalFrame {
  int s = 0;
  int n = 0;
  MatrixField W;    // (2 Re d | -2 Im d)
  MatrixField Jp;   // multiplication by (s+1) z^s as a real 2x2 matrix
  MatrixField G;    // ambient metric at fhat
  Eigen::MatrixXd G0;  // ambient metric at fhat(0)
  GridField lambda; // det J'
  double reconstruction_residual = 0.0;  // max |J_fhat - W J'| / max(1, |J_fhat|)
};

inline constexpr double kFrameTolerance = 1e-8;

FrontalFrame frontal_frame_from_branch(const SurfaceMap& f, const BranchData& bd);

struct PrincipalParts {
  BiJet a_jet;              // fhat_1 + i fhat_2
  GridField a;
  std::vector<BiJet> b_jet; // complex co-principal part, h = 3..n
  GridField b;              // n-2 components; B_k1 = Re b_k, B_k2 = Im b_k
  double min_denominator = 0.0;
};

PrincipalParts principal_coprincipal(const SurfaceMap& f, const BranchData& bd);

struct NormalFrame {
  MatrixField xi;                   // n x (n-2), G^{-1} (-B^t; Id)
  Eigen::MatrixXd gram_at_origin;   // (xi . xi)(0), from the jets
  double orthogonality_residual = 0.0;  // max |W . xi|
};

NormalFrame normal_frame(const FrontalFrame& ff, const PrincipalParts& pp);

// Curvature data of one normal section relative to the frame W.
struct RelativeCurvature {
  Eigen::Matrix2d frakJ;              // -I_W^{-1} II_V
  std::array<cplx, 2> principal{};    // eigenvalues of -adj(J') frakJ
  double H = 0.0;                     // -tr(adj(J') frakJ) / 2
  double K = 0.0;                     // det frakJ
  double sigma2 = 0.0;                // product of the relative principal curvatures
};

RelativeCurvature relative_curvature(const Eigen::Matrix2d& Jp, const Eigen::Matrix2d& I_W,
                                     const Eigen::Matrix2d& II_V);

struct ClassicalCurvature {
  Eigen::Matrix2d A;  // shape operator I^{-1} II
  double H = 0.0;
  double K = 0.0;
};

// Everything the curvature machinery knows at one point z != 0. Normal data is
// listed per section of xi and per section of the orthonormalized xi' = xi D.
struct PointGeometry {
  cplx z;
  Eigen::VectorXd y;
  Eigen::MatrixXd Jf;            // n x 2
  Eigen::MatrixXd W;             // n x 2
  std::array<Eigen::MatrixXd, 2> dW;
  Eigen::Matrix2d Jp;
  double lambda = 0.0;
  Eigen::MatrixXd G;
  Eigen::MatrixXd B;             // (n-2) x 2, W_low W_top^{-1}
  std::array<Eigen::MatrixXd, 2> dB;
  Eigen::MatrixXd xi;            // n x (n-2)
  Eigen::MatrixXd D;             // upper triangular, xi' = xi D orthonormal
  Eigen::MatrixXd xi_orth;
  Eigen::Matrix2d I, I_W;
  std::vector<Eigen::Matrix2d> II_V;        // -W . nabla xi_k
  std::vector<Eigen::Matrix2d> II_V_coprincipal;  // W_top^t J_{B_k}; Euclidean only
  std::vector<Eigen::Matrix2d> II;          // xi_k . (f_ij + Gamma(f_i, f_j))
  std::vector<Eigen::Matrix2d> II_V_orth;
  std::vector<Eigen::Matrix2d> II_orth;
  std::vector<RelativeCurvature> relative;  // for xi'
  std::vector<ClassicalCurvature> classical;  // for xi'
  Eigen::VectorXd H_rel;         // sum_j H_V^{xi'_j} xi'_j
  Eigen::VectorXd H;             // mean curvature vector
  double ambient_sec = 0.0;      // ambient sectional curvature of span W
  double sec = 0.0;              // ambient_sec + sum_j K_V^{xi'_j} / lambda
  double sec_classical = 0.0;    // ambient_sec + sum_j det II^{xi'_j} / det I
};

// Pointwise evaluation from the jets of fhat and of d. Exact-path maps are
// polynomials, so the jets are the map; numeric-path maps use their Taylor fits.
class GeometryEvaluator {
 public:
  GeometryEvaluator(const SurfaceMap& f, const BranchData& bd);

  const SurfaceMap& map() const { return f_; }
  int s() const { return s_; }
  int n() const { return n_; }
  // Throws SingularNode at z = 0.
  PointGeometry at(cplx z) const;
  // -W . nabla eta for a section eta with partial derivatives deta[0], deta[1].
  Eigen::Matrix2d second_form(const PointGeometry& p, const Eigen::VectorXd& eta,
                              const std::array<Eigen::VectorXd, 2>& deta) const;
  // Gauss curvature of the induced metric by the Brioschi formula.
  double brioschi(cplx z) const;
  // d^{a+b} fhat / dx^a dy^b at z, a + b <= 3.
  Eigen::VectorXd partial(cplx z, int a, int b) const;

 private:
  SurfaceMap f_;
  int s_ = 0;
  int n_ = 0;
  // partial_[a][b][c] = d^{a+b} fhat_c / dx^a dy^b for a + b <= 3
  std::array<std::array<std::vector<BiJet>, 4>, 4> partial_;
  std::vector<BiJet> d_, d_z_, d_zbar_;
};

inline constexpr double kRelationTolerance = 1e-6;
inline constexpr double kBrioschiTolerance = 1e-4;
// The Brioschi check skips |z| < kBrioschiInnerFraction R.
inline constexpr double kBrioschiInnerFraction = 0.125;

// Worst relative defects of the curvature identities over a node set, each
// measured as |a - b| / max(1, |a|, |b|) with max-abs matrix norms.
struct IdentityResiduals {
  double frame = 0.0;           // J_fhat = W J'
  double first_form = 0.0;      // I = J'^t I_W J'
  double second_form = 0.0;     // II = J'^t II_V
  double two_path = 0.0;        // II_V = W_top^t J_{B_k}; Euclidean only
  double orthogonality = 0.0;   // W . xi = 0
  double corollary = 0.0;       // -adj(J') frakJ = lambda I^{-1} II
  double scaling_H = 0.0;       // H_V = lambda H
  double scaling_K = 0.0;       // K_V = lambda K
  double scaling_sigma2 = 0.0;  // sigma_2 of relative curvatures = lambda^2 K
  double mean_vector = 0.0;     // H_V vector = lambda H vector
  double gauss = 0.0;           // relative and classical Sec agree
  double eigen_product = 0.0;   // product of relative principal curvatures = det
  void absorb(const IdentityResiduals& o);
  double worst_relation() const;  // max of all but frame
};

double relative_gap(double a, double b);
double relative_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

IdentityResiduals identity_residuals(const PointGeometry& p, bool euclidean);

// Curvature data on the analysis grid.
struct CurvatureFields {
  GridField lambda;
  MatrixField I, I_W;
  std::vector<MatrixField> II;        // per xi'_k, x-coordinates
  std::vector<MatrixField> II_V;      // per xi'_k, relative to W
  GridField H;                        // H^{xi'_k}, n-2 components
  GridField K;                        // K^{xi'_k}
  GridField H_rel, K_rel;             // relative versions
  GridField sec;
  GridField mean_curvature;           // n components
  IdentityResiduals residuals;
};

CurvatureFields curvature_fields(const GeometryEvaluator& ev, const GridPtr& grid);

// Largest relative gap between the Gauss-equation Sec and the Brioschi curvature
// on nodes with |z| >= inner.
double brioschi_gap(const GeometryEvaluator& ev, const GridPtr& grid, double inner);

// Values at the branch point from the jets of b, available when
// db/dz is divisible by z^s. Euclidean ambient only.
struct OriginCurvature {
  std::vector<double> K;  // K^{xi_k}(0)
  double sec = 0.0;
};

std::optional<OriginCurvature> curvature_at_origin(const SurfaceMap& f, const BranchData& bd,
                                                   const PrincipalParts& pp);

// Co-principal part J_low J_top^{-1} of any map at a regular point.
Eigen::MatrixXd coprincipal_from_jacobian(const SurfaceMap& f, cplx z);

enum class CurvatureClass { BoundedLipschitz, Divergent, Inconclusive };
const char* curvature_class_name(CurvatureClass c);

struct AnnulusStat {
  int j = 0;
  double r = 0.0;
  double sup_abs = 0.0;   // max |Sec| on the ring
  double mean_abs = 0.0;
  double mean = 0.0;
  double growth = 0.0;    // sup_abs(r/2) / sup_abs(r)
  double q = 0.0;         // max |Sec(r) - Sec(r/2)| / r over angles
  double lipschitz = 0.0; // running max of q from the outer ring inward
};

inline constexpr int kAnnulusFirst = 3;
inline constexpr int kAnnulusLast = 8;
inline constexpr int kAnnulusAngles = 64;
inline constexpr double kDivergenceGrowth = 4.0;
inline constexpr double kLipschitzVariation = 0.2;
// Ring differences below this relative size are round-off and count as zero.
inline constexpr double kSecNoise = 1e-10;

struct CurvatureReport {
  std::string label;
  int s = 0;
  int n = 0;
  ZOrder iota = ZOrder::finite(0);
  std::string ambient;
  double radius = 0.0;
  CurvatureFields fields;
  std::vector<AnnulusStat> annuli;
  double growth_exponent = 0.0;  // slope of log|Sec| against log(1/r)
  double min_growth = 0.0;
  double lipschitz_variation = 0.0;
  int sec_sign = 0;              // sign of Sec on the innermost ring
  CurvatureClass predicted = CurvatureClass::Inconclusive;
  CurvatureClass empirical = CurvatureClass::Inconclusive;
  bool agree = false;
  double max_mean_curvature = 0.0;  // max |H vector| over the grid
  double brioschi_gap = 0.0;
  double brioschi_inner = 0.0;
  std::optional<OriginCurvature> origin;
  Eigen::VectorXd mean_curvature_origin;  // empty unless the map is conformal
};

CurvatureClass predicted_class(const ZOrder& iota, int s);

// Fills the annulus statistics and empirical class from ring samples of Sec.
void classify_annuli(CurvatureReport& report, const GeometryEvaluator& ev);

CurvatureReport classify_branch_curvature(const SurfaceMap& f);

}  // namespace branchkit
