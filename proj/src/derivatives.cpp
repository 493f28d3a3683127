#include <algorithm>
#include <cmath>
#include <numbers>

#include "branchkit/error.hpp"
#include "branchkit/fields.hpp"
#include "fft.hpp"
#include "fornberg.hpp"

namespace branchkit {

namespace {

constexpr cplx kI(0.0, 1.0);

struct Partials {
  std::vector<cplx> a;  // d/dr (polar) or d/dx (Cartesian)
  std::vector<cplx> b;  // d/dtheta (polar) or d/dy (Cartesian)
};

Partials polar_partials(const GridField& f, int comp) {
  const DiskGrid& g = f.grid();
  const int nr = g.n_r(), nt = g.n_theta();
  Partials p;
  p.a.assign(g.node_count(), 0.0);
  p.b.assign(g.node_count(), 0.0);

  RingFFT fft(nt);
  std::vector<cplx> ring(nt);
  for (int ir = 0; ir < nr; ++ir) {
    for (int it = 0; it < nt; ++it) ring[it] = f.at(g.polar_index(ir, it), comp);
    fft.forward(ring);
    for (int k = 0; k < nt; ++k) {
      const int m = fft.wavenumber(k);
      ring[k] *= (k == nt / 2) ? cplx(0.0) : kI * static_cast<double>(m) / static_cast<double>(nt);
    }
    fft.backward(ring);
    for (int it = 0; it < nt; ++it) p.b[g.polar_index(ir, it)] = ring[it];
  }

  const auto& st = g.radial_stencils();
  for (int ir = 0; ir < nr; ++ir)
    for (int it = 0; it < nt; ++it) {
      cplx acc = 0.0;
      for (std::size_t q = 0; q < st[ir].idx.size(); ++q) {
        const int e = st[ir].idx[q];
        const cplx v = e >= nr ? f.at(g.polar_index(e - nr, it), comp)
                               : f.at(g.polar_index(nr - 1 - e, (it + nt / 2) % nt), comp);
        acc += st[ir].d1[q] * v;
      }
      p.a[g.polar_index(ir, it)] = acc;
    }
  return p;
}

// One-dimensional derivative along a lattice line through (ix, iy), using up
// to five consecutive nodes of the run that contains the node.
cplx lattice_derivative(const GridField& f, int comp, int ix, int iy, int dx, int dy) {
  const DiskGrid& g = f.grid();
  int lo = 0, hi = 0;
  while (lo > -2 && g.cart_index(ix + (lo - 1) * dx, iy + (lo - 1) * dy) >= 0) --lo;
  while (hi < 2 && g.cart_index(ix + (hi + 1) * dx, iy + (hi + 1) * dy) >= 0) ++hi;
  // Extend one side when the other is cut short.
  while (hi - lo < 4 && g.cart_index(ix + (hi + 1) * dx, iy + (hi + 1) * dy) >= 0) ++hi;
  while (hi - lo < 4 && g.cart_index(ix + (lo - 1) * dx, iy + (lo - 1) * dy) >= 0) --lo;
  if (hi == lo) return 0.0;
  std::vector<double> xs;
  for (int t = lo; t <= hi; ++t) xs.push_back(t * g.spacing_h());
  const auto w = fornberg_weights(0.0, xs, 1);
  cplx acc = 0.0;
  for (int t = lo; t <= hi; ++t)
    acc += w[1][t - lo] * f.at(static_cast<std::size_t>(g.cart_index(ix + t * dx, iy + t * dy)), comp);
  return acc;
}

Partials cartesian_partials(const GridField& f, int comp) {
  const DiskGrid& g = f.grid();
  Partials p;
  p.a.assign(g.node_count(), 0.0);
  p.b.assign(g.node_count(), 0.0);
  for (int iy = 0; iy < g.n_cart(); ++iy)
    for (int ix = 0; ix < g.n_cart(); ++ix) {
      const long i = g.cart_index(ix, iy);
      if (i < 0) continue;
      p.a[i] = lattice_derivative(f, comp, ix, iy, 1, 0);
      p.b[i] = lattice_derivative(f, comp, ix, iy, 0, 1);
    }
  return p;
}

GridField wirtinger_grid(const GridField& f, bool conjugate) {
  const DiskGrid& g = f.grid();
  if (g.mode() == GridMode::Polar) {
    if (g.n_r() < kMinGridResolution || g.n_theta() < kMinGridResolution)
      throw Error(ErrorCode::GridTooCoarse, "grid too coarse for differentiation");
  } else if (g.n_cart() < kMinGridResolution) {
    throw Error(ErrorCode::GridTooCoarse, "grid too coarse for differentiation");
  }
  const double sgn = conjugate ? 1.0 : -1.0;
  GridField out(f.grid_ptr(), f.components());
  for (int c = 0; c < f.components(); ++c) {
    if (g.mode() == GridMode::Polar) {
      const Partials p = polar_partials(f, c);
      for (std::size_t i = 0; i < g.node_count(); ++i) {
        const cplx z = g.node(i);
        const double r = std::abs(z);
        const cplx rot = std::polar(1.0, sgn * std::arg(z));
        out.at(i, c) = 0.5 * rot * (p.a[i] + sgn * kI * p.b[i] / r);
      }
    } else {
      const Partials p = cartesian_partials(f, c);
      for (std::size_t i = 0; i < g.node_count(); ++i)
        out.at(i, c) = 0.5 * (p.a[i] + sgn * kI * p.b[i]);
    }
  }
  return out;
}

}  // namespace

GridField dz_grid(const GridField& f) { return wirtinger_grid(f, false); }
GridField dzbar_grid(const GridField& f) { return wirtinger_grid(f, true); }

GridField laplacian_grid(const GridField& f) {
  GridField out = dz_grid(dzbar_grid(f));
  for (std::size_t i = 0; i < out.node_count(); ++i)
    for (int c = 0; c < out.components(); ++c) out.at(i, c) *= 4.0;
  return out;
}

PolarInterpolator::PolarInterpolator(const GridField& f, int comp) : grid_(f.grid_ptr()) {
  if (grid_->mode() != GridMode::Polar)
    throw Error(ErrorCode::InvalidInput, "interpolation needs a polar grid");
  const int nr = grid_->n_r(), nt = grid_->n_theta();
  RingFFT fft(nt);
  spectra_.resize(nr);
  for (int ir = 0; ir < nr; ++ir) {
    std::vector<cplx> ring(nt);
    for (int it = 0; it < nt; ++it) ring[it] = f.at(grid_->polar_index(ir, it), comp);
    fft.forward(ring);
    for (cplx& v : ring) v /= static_cast<double>(nt);
    spectra_[ir] = std::move(ring);
  }
}

cplx PolarInterpolator::ring_value(int ir, double theta) const {
  const int nt = grid_->n_theta();
  const auto& c = spectra_[ir];
  cplx acc = c[nt / 2] * std::cos(0.5 * nt * theta) + c[0];
  // Phases by recurrence, renormalized so rounding does not drift the modulus.
  const cplx u = std::polar(1.0, theta);
  cplx up = 1.0;
  for (int k = 1; k < nt / 2; ++k) {
    up *= u;
    if (k % 16 == 0) up /= std::abs(up);
    acc += c[k] * up + c[nt - k] * std::conj(up);
  }
  return acc;
}

cplx PolarInterpolator::operator()(cplx z) const {
  const auto& radii = grid_->radii();
  const int nr = grid_->n_r();
  const double r = std::abs(z);
  if (r > grid_->radius() * (1.0 + 1e-12))
    throw Error(ErrorCode::InvalidInput, "interpolation point outside the disk");
  const double th = std::arg(z);
  // Signed radial nodes; pick six neighbours of r on the diameter line.
  const int ne = 2 * nr;
  const int p = nr + static_cast<int>(std::lower_bound(radii.begin(), radii.end(), r) - radii.begin());
  int lo = std::clamp(p - 3, 0, ne - 6);
  std::vector<double> xs;
  std::vector<cplx> vs;
  for (int q = lo; q < lo + 6; ++q) {
    if (q >= nr) {
      xs.push_back(radii[q - nr]);
      vs.push_back(ring_value(q - nr, th));
    } else {
      xs.push_back(-radii[nr - 1 - q]);
      vs.push_back(ring_value(nr - 1 - q, th + std::numbers::pi));
    }
  }
  const auto w = fornberg_weights(r, xs, 0);
  cplx acc = 0.0;
  for (std::size_t q = 0; q < xs.size(); ++q) acc += w[0][q] * vs[q];
  return acc;
}

}  // namespace branchkit
