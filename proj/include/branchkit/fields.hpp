#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "branchkit/jets.hpp"

namespace branchkit {

enum class GridMode { Polar, Cartesian };
enum class RadialSpacing { Uniform, Geometric };

// Sample points of a punctured disk. Polar nodes are indexed ring-major:
// node = ir * n_theta + it. The origin is never a node.
class DiskGrid {
 public:
  // Uniform rings sit at r_i = (i + 1/2) dr with the last ring on |z| = R, so the
  // reflection r -> -r maps the radial line onto itself.
  static std::shared_ptr<const DiskGrid> polar(double radius, int n_r, int n_theta,
                                               RadialSpacing spacing = RadialSpacing::Uniform,
                                               double rho = 0.97);
  static std::shared_ptr<const DiskGrid> cartesian(double radius, int n, double epsilon = 0.0);

  GridMode mode() const { return mode_; }
  RadialSpacing spacing() const { return spacing_; }
  double radius() const { return radius_; }
  double epsilon() const { return epsilon_; }
  std::size_t node_count() const { return nodes_.size(); }
  cplx node(std::size_t i) const { return nodes_[i]; }

  int n_r() const { return n_r_; }
  int n_theta() const { return n_theta_; }
  const std::vector<double>& radii() const { return radii_; }
  double theta(int it) const;
  std::size_t polar_index(int ir, int it) const {
    return static_cast<std::size_t>(ir) * n_theta_ + it;
  }

  int n_cart() const { return n_cart_; }
  double spacing_h() const { return h_; }
  // Cartesian lattice lookup; -1 when (ix, iy) is not a node.
  long cart_index(int ix, int iy) const;

  // Radial stencils along the signed diameter line, per ring: extended indices
  // into [0, 2 n_r) and weights for the first and second derivative.
  struct Stencil {
    std::vector<int> idx;
    std::vector<double> d1;
    std::vector<double> d2;
  };
  const std::vector<Stencil>& radial_stencils() const { return radial_; }

 private:
  DiskGrid() = default;
  void build_polar_stencils();

  GridMode mode_ = GridMode::Polar;
  RadialSpacing spacing_ = RadialSpacing::Uniform;
  double radius_ = 1.0;
  double epsilon_ = 0.0;
  int n_r_ = 0;
  int n_theta_ = 0;
  int n_cart_ = 0;
  double h_ = 0.0;
  std::vector<double> radii_;
  std::vector<cplx> nodes_;
  std::vector<long> cart_lookup_;
  std::vector<Stencil> radial_;
};

using GridPtr = std::shared_ptr<const DiskGrid>;

class GridField {
 public:
  GridField() = default;
  GridField(GridPtr grid, int components, bool real = false);

  const DiskGrid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  int components() const { return m_; }
  std::size_t node_count() const { return grid_ ? grid_->node_count() : 0; }
  bool real_flag() const { return real_; }
  void set_real_flag(bool real) { real_ = real; }

  cplx& at(std::size_t node, int comp = 0) { return values_[node * m_ + comp]; }
  cplx at(std::size_t node, int comp = 0) const { return values_[node * m_ + comp]; }
  const std::vector<cplx>& values() const { return values_; }

  GridField component(int comp) const;
  double max_abs(int comp = -1) const;
  bool has_nan() const;

 private:
  GridPtr grid_;
  int m_ = 0;
  bool real_ = false;
  std::vector<cplx> values_;
};

GridField sample(GridPtr grid, int components, const std::function<cplx(cplx, int)>& fn);
GridField sample_jet(GridPtr grid, const BiJet& f);
GridField sample_jets(GridPtr grid, const std::vector<BiJet>& fs);

// Minimum nodes per direction accepted by the derivative operators.
inline constexpr int kMinGridResolution = 16;

GridField dz_grid(const GridField& f);
GridField dzbar_grid(const GridField& f);

// Evaluates a polar field off-node: trigonometric interpolation along rings and
// Lagrange interpolation along the signed diameter through the origin.
class PolarInterpolator {
 public:
  PolarInterpolator(const GridField& f, int comp = 0);
  cplx operator()(cplx z) const;

 private:
  GridPtr grid_;
  std::vector<std::vector<cplx>> spectra_;
  cplx ring_value(int ir, double theta) const;
};

struct LineIntegral {
  cplx value;
  double discrepancy;
  double tolerance;
};

// Integral of w^s F(w) dw from 0 to z along the radial-then-circular path,
// checked against a second radial-then-circular path.
LineIntegral line_integral(const std::function<cplx(cplx)>& F, cplx z, int s);
LineIntegral line_integral(const GridField& F, cplx z, int s, int comp = 0);
LineIntegral line_integral(const BiJet& F, cplx z, int s);

struct PoissonStats {
  int iterations = 0;
  double defect = 0.0;
};

// Solves Laplace(phi) = rhs with phi = 0 on |z| = R. Polar uniform grids only.
GridField poisson_solve(const GridField& rhs, PoissonStats* stats = nullptr);
// phi with Laplace^{s+1} phi = 4^{s+1} l, by s+1 chained solves.
GridField iterated_poisson(const GridField& l, int s);
// Whole chain: stage 0 is 4^{s+1} l, stage n solves Laplace f_n = f_{n-1}.
std::vector<GridField> iterated_poisson_stages(const GridField& l, int s);
// Sum over stages of the relative residual of Laplace f_n = f_{n-1}, measured
// with laplacian_grid on inner_radius <= |z| <= outer_radius.
double compounded_poisson_residual(const std::vector<GridField>& stages, double inner_radius,
                                   double outer_radius);
GridField laplacian_grid(const GridField& f);

struct JetFit {
  BiJet jet;
  double residual = 0.0;
  double condition = 0.0;
};

inline constexpr double kMaxFitCondition = 1e8;

// Least-squares Taylor fit of one component on rings with r <= fit_radius
// (default: R/2).
JetFit fit_jet(const GridField& f, int order, int comp = 0, double fit_radius = 0.0);

void write_csv(std::ostream& os, const GridField& f);

}  // namespace branchkit
