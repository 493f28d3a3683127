#pragma once

#include <vector>

#include "branchkit/branch.hpp"

namespace branchkit {

// The change of parameter c with (fhat_1 + i fhat_2)(c(w)) = w^{s+1} and its
// inverse e(z) = z (a(z)/z^{s+1})^{1/(s+1)}.
struct Diffeo {
  int s = 1;
  GridField e;       // on the analysis grid of the map, radius R
  GridField c;       // on a polar w-grid of radius radius_w
  BiJet e_jet;
  BiJet c_jet;
  int jet_valid = 0;  // both jets are exact through this order
  double radius_w = 0.0;
  double newton_residual = 0.0;    // max |e(c(w)) - w| over w-nodes
  double inverse_residual = 0.0;   // max |c(e(z)) - z| on |z| <= R/2
  double composition_residual = 0.0;  // max |a(c(w)) - w^{s+1}| on |w| <= radius_w/2
  double min_root_modulus = 0.0;   // min |a(z)/z^{s+1}| over z-nodes

  // c(w) = w c_0(w); the constant term of c_0.
  cplx c0_at_origin() const { return c_jet.coeff(1, 0); }
};

inline constexpr double kDiffeoTolerance = 1e-6;
inline constexpr int kNewtonMaxIterations = 50;

Diffeo build_normalizing_diffeo(const SurfaceMap& f, const BranchData& bd);

// Per node |de/dzbar - varpi de/dz| / max(1, |de/dz|), derivatives by finite
// differences of d.e; varpi must live on the same grid.
GridField beltrami_residual(const Diffeo& d, const GridField& varpi);
// Largest value of a one-component field on |z| <= radius.
double sup_on_disk(const GridField& f, double radius);

struct NormalizedComponent {
  BiJet jet;       // b_h
  GridField grid;  // b_h on the w-grid
  double reconstruction_residual = 0.0;  // on |w| <= radius_w/2
};

// b_h = conj(2 d(fhat_h o c)/dw / ((s+1) w^s)) for h = 3..n.
std::vector<NormalizedComponent> normalized_components(const SurfaceMap& f, const Diffeo& d);

}  // namespace branchkit
