#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "branchkit/ambient.hpp"
#include "branchkit/fields.hpp"
#include "branchkit/jets.hpp"

namespace branchkit {

// A branched map fhat: disk -> R^n around a declared branch point of order s.
struct SurfaceMap {
  int n = 3;
  int s = 1;
  std::vector<BiJet> components;  // real-flagged
  GridField samples;              // optional; empty when node_count() == 0
  AmbientMetric metric;
  double radius = 1.0;  // domain radius after shrinking
  int halvings = 0;
  std::string label;

  int jet_order() const { return components.empty() ? 0 : components.front().order(); }
  bool has_samples() const { return samples.node_count() > 0; }
  // fhat(z) from the jets.
  Eigen::VectorXd eval(cplx z) const;
  // Largest |samples - jets| on |z| <= R/2; zero without samples.
  double sample_mismatch() const;
};

inline constexpr double kSampleTolerance = 1e-6;
inline constexpr int kMaxHalvings = 8;

struct BuildOptions {
  double radius = 1.0;
  int n_r = 128;
  int n_theta = 128;
  int jet_order = 0;  // 0 selects 2s + 6
  bool sample = true;
  bool shrink = true;
};

// phi_h as polynomial jets (exact path). The numeric path adds polar grid fields
// phi_grid; the jets then hold their Taylor fits.
struct RepresentationData {
  int s = 1;
  std::vector<BiJet> phi;
  std::vector<GridField> phi_grid;
  std::vector<std::vector<cplx>> F;  // holomorphic coefficients F_h(z) = sum F[h][m] z^m

  int n() const;
  bool numeric() const { return !phi_grid.empty(); }
  // (-1)^s s! d^{s+1}phi_h/dz^{s+1}(0) + F_h(0) and phi_h(0), per component.
  std::vector<double> constraint_defects() const;
};

inline constexpr double kConstraintTolerance = 1e-10;

// Numeric representation data from prescribed l_h: phi_h by iterated Poisson, then
// phi_h(0) and F_h(0) adjusted so the constraint holds. Polynomial F_h keeps its
// remaining coefficients.
RepresentationData representation_from_laplacian(const std::vector<GridField>& l, int s,
                                                  std::vector<std::vector<cplx>> F,
                                                  int fit_order = 0);

SurfaceMap build_from_representation(const RepresentationData& data,
                                     const BuildOptions& opts = {});

// Conformal minimal surface from g = scale z^k and eta = 2(s+1) z^s dz.
SurfaceMap build_weierstrass_minimal(int s, int k, double scale = 1.0,
                                     const BuildOptions& opts = {});
// (Re z^{s+1}, Im z^{s+1}, 0, ..., 0).
SurfaceMap build_pure_branch(int s, int n = 3, const BuildOptions& opts = {});
// Inverse stereographic image of w = z^{s+1} on the sphere of radius rho through
// the origin, centred at (0, 0, rho). Optionally placed in the round ambient metric.
SurfaceMap build_sphere_patch(int s, double rho, bool round_ambient,
                              const BuildOptions& opts = {});

// fhat o h for a jet germ h = z e(z) with e(0) != 0.
SurfaceMap reparametrize(const SurfaceMap& f, const BiJet& h);
// M fhat for M = diag(D, G), D in O(2), G in O(n-2).
SurfaceMap ambient_rotate(const SurfaceMap& f, const Eigen::MatrixXd& M);

// Halves the radius until the branch-coordinate conditions hold on the grid.
void shrink_to_branch_coordinates(SurfaceMap& f, const BuildOptions& opts);

}  // namespace branchkit
