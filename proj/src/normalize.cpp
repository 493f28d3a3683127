#include "branchkit/normalize.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "branchkit/error.hpp"

namespace branchkit {

namespace {

using Gauss32 = boost::math::quadrature::gauss<double, 32>;

constexpr double kRootTol = 1e-10;
constexpr double kNewtonTol = 1e-14;
constexpr int kMaxReportedNodes = 8;

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// The (s+1)-th root of q nearest to ref, and the margin to the midpoint between
// neighbouring roots (positive when the choice is unambiguous).
struct Root {
  cplx value;
  double margin;
};

Root nearest_root(cplx q, cplx ref, int s) {
  const int p = s + 1;
  const double base = std::pow(std::abs(q), 1.0 / p);
  const double th = std::arg(q) / p;
  Root best{0.0, 0.0};
  double dist = std::numeric_limits<double>::infinity();
  for (int k = 0; k < p; ++k) {
    const cplx r = std::polar(base, th + 2.0 * std::numbers::pi * k / p);
    if (std::abs(r - ref) < dist) {
      dist = std::abs(r - ref);
      best.value = r;
    }
  }
  const double half_gap = base * std::sin(std::numbers::pi / p);
  best.margin = p == 1 ? base : half_gap - dist;
  return best;
}

// Pointwise pieces of e(z) = z (a/z^{s+1})^{1/(s+1)} from the jets.
struct Pieces {
  BiJet a;
  BiJet P;
  BiJet delta;
  int s;

  cplx q(cplx z) const { return a.eval(z) / std::pow(z, s + 1); }
  // de/dz and de/dzbar for the root r of q.
  std::pair<cplx, cplx> jacobian(cplx z, cplx r) const {
    const cplx p = P.eval(z);
    const cplx varpi = std::pow(std::conj(z) / z, s) * 0.5 * std::conj(delta.eval(z)) / p;
    const cplx ez = p * std::pow(r, -s);
    return {ez, varpi * ez};
  }
};

// Six-point Lagrange interpolation on ascending nodes xs.
double lagrange6(const std::vector<double>& xs, const std::vector<double>& vs, double x) {
  const int n = static_cast<int>(xs.size());
  const int p = static_cast<int>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
  const int lo = std::clamp(p - 3, 0, n - 6);
  double acc = 0.0;
  for (int a = lo; a < lo + 6; ++a) {
    double l = 1.0;
    for (int b = lo; b < lo + 6; ++b)
      if (b != a) l *= (x - xs[b]) / (xs[a] - xs[b]);
    acc += l * vs[a];
  }
  return acc;
}

}  // namespace

Diffeo build_normalizing_diffeo(const SurfaceMap& f, const BranchData& bd) {
  const int s = bd.s;
  const int N = f.jet_order();
  Pieces pc{f.components[0] + f.components[1] * cplx(0.0, 1.0),
            BiJet::constant(bd.d1p.order(), 1.0) + (bd.d1p + bd.d2p) * cplx(0.5, 0.0),
            bd.d1p - bd.d2p, s};
  Diffeo out;
  out.s = s;

  // Jets: q = a/z^{s+1} is polynomial up to the degree below the first term of a
  // that z^{s+1} does not divide.
  int M = N - s - 1;
  for (int deg = 0; deg <= N; ++deg)
    for (int j = 0; j <= s && j <= deg; ++j)
      if (std::abs(pc.a.coeff(j, deg - j)) > kRootTol) M = std::min(M, deg - s - 2);
  if (M < 0)
    throw Error(ErrorCode::NonExtendable, "a(z)/z^{s+1} has no jet at the origin",
                {{"s", std::to_string(s)}});
  const BiJet q = divide_z_pow(pc.a.truncated(M + s + 1), s + 1, kRootTol);
  if (std::abs(q.coeff(0, 0) - 1.0) > kRootTol)
    throw Error(ErrorCode::RootBranchAmbiguous, "a(z)/z^{s+1} does not tend to 1");
  const BiJet r = jet_pow(q, 1.0 / (s + 1));
  out.e_jet = mul_monomial(r, 1, 0);
  BiJet c = BiJet::monomial(M + 1, 1, 0);
  // Each pass of c = w / r(c) fixes one more degree.
  for (int it = 0; it <= M + 1; ++it) c = mul_monomial(jet_reciprocal(jet_compose(r, c)), 1, 0);
  out.c_jet = c;
  out.jet_valid = M + 1;

  // e on the analysis grid, the root lifted continuously outward from 1 along rays.
  const DiskGrid& zg = *bd.grid;
  const int nr = zg.n_r(), nt = zg.n_theta();
  out.e = GridField(bd.grid, 1);
  out.min_root_modulus = std::numeric_limits<double>::infinity();
  std::vector<cplx> roots(zg.node_count());
  for (int it = 0; it < nt; ++it) {
    cplx ref = 1.0;
    for (int ir = 0; ir < nr; ++ir) {
      const std::size_t i = zg.polar_index(ir, it);
      const cplx z = zg.node(i);
      const cplx qz = pc.q(z);
      out.min_root_modulus = std::min(out.min_root_modulus, std::abs(qz));
      if (std::abs(qz) <= kRootTol)
        throw Error(ErrorCode::RootBranchAmbiguous, "a(z)/z^{s+1} vanishes on the grid",
                    {{"re", num(z.real())}, {"im", num(z.imag())}});
      const Root rt = nearest_root(qz, ref, s);
      if (rt.margin <= 0.0)
        throw Error(ErrorCode::RootBranchAmbiguous, "root branch jumps along a ray",
                    {{"re", num(z.real())}, {"im", num(z.imag())}});
      roots[i] = rt.value;
      out.e.at(i) = z * rt.value;
      ref = rt.value;
    }
  }
  // Monodromy: along each ring the lifted roots must stay on one branch.
  for (int ir = 0; ir < nr; ++ir)
    for (int it = 0; it < nt; ++it) {
      const cplx r0 = roots[zg.polar_index(ir, it)];
      const cplx r1 = roots[zg.polar_index(ir, (it + 1) % nt)];
      if (std::abs(r1 - r0) >= std::abs(r0) * std::sin(std::numbers::pi / (s + 1)))
        throw Error(ErrorCode::RootBranchAmbiguous, "root branch has monodromy around a ring",
                    {{"ring_radius", num(zg.radii()[ir])}});
    }

  // c by Newton inversion of e on a w-disk inside e(disk of radius R).
  out.radius_w = std::numeric_limits<double>::infinity();
  for (int it = 0; it < nt; ++it)
    out.radius_w = std::min(out.radius_w, std::abs(out.e.at(zg.polar_index(nr - 1, it))));
  const GridPtr wg = DiskGrid::polar(out.radius_w, nr, nt);
  out.c = GridField(wg, 1);
  std::vector<std::string> failed;
  const double R = zg.radius();
  for (int it = 0; it < nt; ++it) {
    cplx z = 0.0, w_prev = 0.0;
    for (int ir = 0; ir < nr; ++ir) {
      const std::size_t i = wg->polar_index(ir, it);
      const cplx w = wg->node(i);
      z = ir == 0 ? w : z * (w / w_prev);
      bool ok = false;
      for (int k = 0; k < kNewtonMaxIterations; ++k) {
        const cplx rt = nearest_root(pc.q(z), w / z, s).value;
        const cplx res = w - z * rt;
        if (std::abs(res) <= kNewtonTol * std::abs(w)) {
          ok = true;
          break;
        }
        const auto [ez, ezb] = pc.jacobian(z, rt);
        const double det = std::norm(ez) - std::norm(ezb);
        z += (std::conj(ez) * res - ezb * std::conj(res)) / det;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 1.5 * R) break;
      }
      if (!ok) {
        if (failed.size() < kMaxReportedNodes)
          failed.push_back("[" + num(w.real()) + "," + num(w.imag()) + "]");
        z = w;
      }
      out.c.at(i) = z;
      const cplx rt = nearest_root(pc.q(z), w / z, s).value;
      out.newton_residual = std::max(out.newton_residual, std::abs(w - z * rt));
      out.composition_residual =
          std::abs(w) <= 0.5 * out.radius_w
              ? std::max(out.composition_residual, std::abs(pc.a.eval(z) - std::pow(w, s + 1)))
              : out.composition_residual;
      w_prev = w;
    }
  }
  if (!failed.empty()) {
    std::string list = "[";
    for (std::size_t k = 0; k < failed.size(); ++k) list += (k ? "," : "") + failed[k];
    throw Error(ErrorCode::NewtonDiverged, "Newton inversion of e did not converge",
                {{"nodes", list + "]"}});
  }

  const PolarInterpolator ci(out.c);
  for (std::size_t i = 0; i < zg.node_count(); ++i) {
    const cplx z = zg.node(i);
    const cplx ez = out.e.at(i);
    if (std::abs(z) > 0.5 * R || std::abs(ez) > out.radius_w) continue;
    out.inverse_residual = std::max(out.inverse_residual, std::abs(ci(ez) - z));
  }
  return out;
}

GridField beltrami_residual(const Diffeo& d, const GridField& varpi) {
  if (varpi.node_count() != d.e.node_count())
    throw Error(ErrorCode::ShapeMismatch, "varpi and e live on different grids");
  const GridField ez = dz_grid(d.e);
  const GridField ezb = dzbar_grid(d.e);
  GridField out(d.e.grid_ptr(), 1, true);
  for (std::size_t i = 0; i < out.node_count(); ++i)
    out.at(i) = std::abs(ezb.at(i) - varpi.at(i) * ez.at(i)) / std::max(1.0, std::abs(ez.at(i)));
  return out;
}

double sup_on_disk(const GridField& f, double radius) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.node_count(); ++i)
    if (std::abs(f.grid().node(i)) <= radius) m = std::max(m, std::abs(f.at(i)));
  return m;
}

std::vector<NormalizedComponent> normalized_components(const SurfaceMap& f, const Diffeo& d) {
  const int s = d.s;
  const int N = f.jet_order();
  const GridPtr wg = d.c.grid_ptr();
  std::vector<NormalizedComponent> out;
  for (int h = 2; h < f.n; ++h) {
    const BiJet& fh = f.components[h];
    NormalizedComponent nc;
    // fhat_h o c is exact through degree jet_valid + L - 1, L the lowest degree of fhat_h.
    int L = 0;
    for (int deg = 1; deg <= N && L == 0; ++deg)
      for (int k = 0; k <= deg; ++k)
        if (std::abs(fh.coeff(deg - k, k)) > kJetTol) {
          L = deg;
          break;
        }
    if (L == 0) {
      nc.jet = BiJet(std::max(0, N - s - 1));
    } else {
      const int valid = std::min(N, d.jet_valid + L - 1);
      BiJet g = jet_compose(fh.truncated(valid), d.c_jet.padded(valid)).truncated(valid);
      g.set_real_flag(false);
      const BiJet q = divide_z_pow(wirtinger_dz(g), s, kRootTol);
      nc.jet = (q * cplx(2.0 / (s + 1), 0.0)).conj();
    }
    if (std::abs(nc.jet.coeff(0, 0)) > kRootTol)
      throw Error(ErrorCode::NonExtendable, "b_h(0) != 0",
                  {{"h", std::to_string(h + 1)}, {"value", num(std::abs(nc.jet.coeff(0, 0)))}});

    // Grid: fhat_h at c(w), differentiated in w.
    GridField g(wg, 1, true);
    for (std::size_t i = 0; i < g.node_count(); ++i) g.at(i) = fh.eval(d.c.at(i)).real();
    const GridField gw = dz_grid(g);
    nc.grid = GridField(wg, 1);
    GridField integrand(wg, 1);  // conj(b_h) w^s
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const cplx w = wg->node(i);
      integrand.at(i) = 2.0 / (s + 1) * gw.at(i);
      nc.grid.at(i) = std::conj(integrand.at(i) / std::pow(w, s));
    }
    // (s+1) Re of the radial integral of conj(b_h) w^s against fhat_h o c; the real
    // part is path independent since it integrates d(fhat_h o c).
    const double f0 = fh.coeff(0, 0).real();
    const int nr = wg->n_r(), nt = wg->n_theta();
    for (int it = 0; it < nt; ++it) {
      const double th = wg->theta(it);
      const cplx u = std::polar(1.0, th);
      std::vector<double> xs, vs;
      for (int ir = nr - 1; ir >= 0; --ir) {
        xs.push_back(-wg->radii()[ir]);
        vs.push_back(((s + 1.0) * integrand.at(wg->polar_index(ir, (it + nt / 2) % nt)) * u).real());
      }
      for (int ir = 0; ir < nr; ++ir) {
        xs.push_back(wg->radii()[ir]);
        vs.push_back(((s + 1.0) * integrand.at(wg->polar_index(ir, it)) * u).real());
      }
      for (int ir = 0; ir < nr && wg->radii()[ir] <= 0.5 * d.radius_w; ++ir) {
        const double r = wg->radii()[ir];
        const double rec =
            r * Gauss32::integrate([&](double t) { return lagrange6(xs, vs, r * t); }, 0.0, 1.0);
        nc.reconstruction_residual = std::max(
            nc.reconstruction_residual, std::abs(f0 + rec - g.at(wg->polar_index(ir, it)).real()));
      }
    }
    out.push_back(std::move(nc));
  }
  return out;
}

}  // namespace branchkit
