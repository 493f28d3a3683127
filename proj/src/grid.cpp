#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "branchkit/error.hpp"
#include "branchkit/fields.hpp"
#include "fornberg.hpp"

namespace branchkit {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_resolution(int n, const char* what) {
  if (n < kMinGridResolution)
    throw Error(ErrorCode::GridTooCoarse, std::string(what) + " below the minimum resolution",
                {{"n", std::to_string(n)}, {"min", std::to_string(kMinGridResolution)}});
}

}  // namespace

std::shared_ptr<const DiskGrid> DiskGrid::polar(double radius, int n_r, int n_theta,
                                                RadialSpacing spacing, double rho) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidInput, "grid radius must be positive");
  require_resolution(n_r, "radial count");
  require_resolution(n_theta, "angular count");
  if (!is_power_of_two(n_theta))
    throw Error(ErrorCode::InvalidInput, "angular count must be a power of two");
  if (spacing == RadialSpacing::Geometric && !(rho > 0.0 && rho < 1.0))
    throw Error(ErrorCode::InvalidInput, "geometric ratio must lie in (0,1)");

  std::shared_ptr<DiskGrid> g(new DiskGrid());
  g->mode_ = GridMode::Polar;
  g->spacing_ = spacing;
  g->radius_ = radius;
  g->n_r_ = n_r;
  g->n_theta_ = n_theta;
  g->radii_.resize(n_r);
  if (spacing == RadialSpacing::Uniform) {
    const double dr = radius / (n_r - 0.5);
    for (int i = 0; i < n_r; ++i) g->radii_[i] = (i + 0.5) * dr;
    g->radii_.back() = radius;
  } else {
    for (int i = 0; i < n_r; ++i) g->radii_[i] = radius * std::pow(rho, n_r - 1 - i);
  }
  g->epsilon_ = g->radii_.front();
  g->nodes_.resize(static_cast<std::size_t>(n_r) * n_theta);
  for (int ir = 0; ir < n_r; ++ir)
    for (int it = 0; it < n_theta; ++it)
      g->nodes_[g->polar_index(ir, it)] = std::polar(g->radii_[ir], g->theta(it));
  g->build_polar_stencils();
  return g;
}

std::shared_ptr<const DiskGrid> DiskGrid::cartesian(double radius, int n, double epsilon) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidInput, "grid radius must be positive");
  require_resolution(n, "lattice size");
  std::shared_ptr<DiskGrid> g(new DiskGrid());
  g->mode_ = GridMode::Cartesian;
  g->radius_ = radius;
  g->n_cart_ = n;
  g->h_ = 2.0 * radius / n;
  g->epsilon_ = epsilon > 0.0 ? epsilon : radius / n;
  g->cart_lookup_.assign(static_cast<std::size_t>(n) * n, -1);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const cplx z(-radius + (ix + 0.5) * g->h_, -radius + (iy + 0.5) * g->h_);
      const double r = std::abs(z);
      if (r < g->epsilon_ || r > radius) continue;
      g->cart_lookup_[static_cast<std::size_t>(iy) * n + ix] = static_cast<long>(g->nodes_.size());
      g->nodes_.push_back(z);
    }
  return g;
}

double DiskGrid::theta(int it) const { return 2.0 * std::numbers::pi * it / n_theta_; }

long DiskGrid::cart_index(int ix, int iy) const {
  if (ix < 0 || iy < 0 || ix >= n_cart_ || iy >= n_cart_) return -1;
  return cart_lookup_[static_cast<std::size_t>(iy) * n_cart_ + ix];
}

void DiskGrid::build_polar_stencils() {
  // Signed radial coordinate: extended index q < n_r is the mirrored ring
  // n_r - 1 - q on the opposite ray.
  const int ne = 2 * n_r_;
  std::vector<double> s(ne);
  for (int q = 0; q < ne; ++q) s[q] = q < n_r_ ? -radii_[n_r_ - 1 - q] : radii_[q - n_r_];
  radial_.resize(n_r_);
  for (int i = 0; i < n_r_; ++i) {
    const int p = n_r_ + i;
    int lo = std::min(p - 2, ne - 5);
    Stencil st;
    for (int q = lo; q < lo + 5; ++q) st.idx.push_back(q);
    std::vector<double> xs;
    for (int q : st.idx) xs.push_back(s[q]);
    const auto w = fornberg_weights(s[p], xs, 2);
    st.d1 = w[1];
    st.d2 = w[2];
    radial_[i] = std::move(st);
  }
}

GridField::GridField(GridPtr grid, int components, bool real)
    : grid_(std::move(grid)), m_(components), real_(real) {
  if (!grid_) throw Error(ErrorCode::InvalidInput, "field without a grid");
  if (components < 1) throw Error(ErrorCode::ShapeMismatch, "field needs at least one component");
  values_.assign(grid_->node_count() * m_, cplx(0.0, 0.0));
}

GridField GridField::component(int comp) const {
  GridField out(grid_, 1, real_);
  for (std::size_t i = 0; i < node_count(); ++i) out.at(i) = at(i, comp);
  return out;
}

double GridField::max_abs(int comp) const {
  double m = 0.0;
  for (std::size_t i = 0; i < node_count(); ++i)
    for (int c = 0; c < m_; ++c)
      if (comp < 0 || c == comp) m = std::max(m, std::abs(at(i, c)));
  return m;
}

bool GridField::has_nan() const {
  return std::any_of(values_.begin(), values_.end(),
                     [](const cplx& v) { return std::isnan(v.real()) || std::isnan(v.imag()); });
}

GridField sample(GridPtr grid, int components, const std::function<cplx(cplx, int)>& fn) {
  GridField out(grid, components);
  for (std::size_t i = 0; i < out.node_count(); ++i)
    for (int c = 0; c < components; ++c) out.at(i, c) = fn(grid->node(i), c);
  return out;
}

GridField sample_jet(GridPtr grid, const BiJet& f) {
  GridField out = sample(std::move(grid), 1, [&](cplx z, int) { return f.eval(z); });
  if (f.real_flag()) {
    for (std::size_t i = 0; i < out.node_count(); ++i) out.at(i) = out.at(i).real();
    out.set_real_flag(true);
  }
  return out;
}

GridField sample_jets(GridPtr grid, const std::vector<BiJet>& fs) {
  GridField out(grid, static_cast<int>(fs.size()));
  bool real = true;
  for (std::size_t i = 0; i < out.node_count(); ++i)
    for (std::size_t c = 0; c < fs.size(); ++c) {
      const cplx v = fs[c].eval(grid->node(i));
      out.at(i, static_cast<int>(c)) = fs[c].real_flag() ? cplx(v.real(), 0.0) : v;
    }
  for (const BiJet& f : fs) real = real && f.real_flag();
  out.set_real_flag(real);
  return out;
}

void write_csv(std::ostream& os, const GridField& f) {
  os << "r,theta";
  for (int c = 0; c < f.components(); ++c) os << ",comp" << c << "_re,comp" << c << "_im";
  os << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < f.node_count(); ++i) {
    const cplx z = f.grid().node(i);
    double th = std::arg(z);
    if (th < 0.0) th += 2.0 * std::numbers::pi;
    os << std::abs(z) << ',' << th;
    for (int c = 0; c < f.components(); ++c) os << ',' << f.at(i, c).real() << ',' << f.at(i, c).imag();
    os << '\n';
  }
}

}  // namespace branchkit
