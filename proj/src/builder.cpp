#include "branchkit/builder.hpp"

#include <cmath>
#include <sstream>

#include "branchkit/branch.hpp"
#include "branchkit/error.hpp"

namespace branchkit {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

int default_order(int s, const BuildOptions& opts) {
  return opts.jet_order > 0 ? opts.jet_order : 2 * s + 6;
}

// Jet of Re{A z^m}.
void add_real_part_monomial(BiJet& f, cplx A, int m) {
  if (m > f.order()) return;
  f.add_to(m, 0, 0.5 * A);
  f.add_to(0, m, 0.5 * std::conj(A));
}

BiJet leading_component(int h, int s, int order) {
  BiJet f(order);
  if (h == 0) add_real_part_monomial(f, 1.0, s + 1);
  if (h == 1) add_real_part_monomial(f, cplx(0.0, -1.0), s + 1);
  return f;
}

// 2 Re int_0^z w^s F(w) dw for F = sum F_m z^m.
void add_holomorphic_integral(BiJet& f, const std::vector<cplx>& F, int s) {
  for (std::size_t m = 0; m < F.size(); ++m) {
    const int p = static_cast<int>(m) + s + 1;
    add_real_part_monomial(f, 2.0 * F[m] / static_cast<double>(p), p);
  }
}

double holomorphic_integral(const std::vector<cplx>& F, int s, cplx z) {
  cplx acc = 0.0;
  for (std::size_t m = F.size(); m-- > 0;) {
    const int p = static_cast<int>(m) + s + 1;
    acc += F[m] / static_cast<double>(p) * std::pow(z, p);
  }
  return 2.0 * acc.real();
}

double sum_coefficient(int s, int j, int k) {
  const double sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
  const double sf = factorial(s);
  return sign * sf * sf / (factorial(j) * factorial(k));
}

std::string list_json(const std::vector<int>& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

void finalize_flags(SurfaceMap& f) {
  for (auto& c : f.components) c.set_real_flag(true);
}

void resample(SurfaceMap& f, const BuildOptions& opts,
              const std::function<cplx(cplx, int)>& fn) {
  if (!opts.sample) return;
  auto grid = DiskGrid::polar(f.radius, opts.n_r, opts.n_theta);
  f.samples = sample(grid, f.n, fn);
  f.samples.set_real_flag(true);
}

void resample_from_jets(SurfaceMap& f, const BuildOptions& opts) {
  const auto comps = f.components;
  resample(f, opts, [&comps](cplx z, int c) { return cplx(comps[c].eval(z).real(), 0.0); });
}

}  // namespace

Eigen::VectorXd SurfaceMap::eval(cplx z) const {
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = components[i].eval(z).real();
  return y;
}

double SurfaceMap::sample_mismatch() const {
  if (!has_samples()) return 0.0;
  const DiskGrid& g = samples.grid();
  const double half = 0.5 * g.radius();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const cplx z = g.node(i);
    if (std::abs(z) > half) continue;
    for (int c = 0; c < n; ++c)
      worst = std::max(worst, std::abs(samples.at(i, c) - components[c].eval(z)));
  }
  return worst;
}

int RepresentationData::n() const {
  return static_cast<int>(phi.size());
}

std::vector<double> RepresentationData::constraint_defects() const {
  std::vector<double> out;
  const double sign = (s % 2 == 0) ? 1.0 : -1.0;
  for (int h = 0; h < n(); ++h) {
    const BiJet& p = phi[h];
    if (p.order() < s + 1)
      throw Error(ErrorCode::OrderTooLow, "phi jet order below s+1",
                  {{"component", std::to_string(h)}});
    const cplx d = factorial(s + 1) * p.coeff(s + 1, 0);
    const cplx F0 = F[h].empty() ? cplx(0.0) : F[h][0];
    out.push_back(std::max(std::abs(sign * factorial(s) * d + F0), std::abs(p.coeff(0, 0))));
  }
  return out;
}

RepresentationData representation_from_laplacian(const std::vector<GridField>& l, int s,
                                                  std::vector<std::vector<cplx>> F,
                                                  int fit_order) {
  if (l.size() != F.size())
    throw Error(ErrorCode::ShapeMismatch, "l and F differ in length");
  const int order = fit_order > 0 ? fit_order : 2 * s + 6;
  RepresentationData data;
  data.s = s;
  data.F = std::move(F);
  const double sign = (s % 2 == 0) ? 1.0 : -1.0;
  for (std::size_t h = 0; h < l.size(); ++h) {
    GridField phi = iterated_poisson(l[h], s);
    BiJet jet = fit_jet(phi, order).jet;
    // Harmonic shifts keep Laplace^{s+1} phi = 4^{s+1} l.
    const double c0 = jet.coeff(0, 0).real();
    for (std::size_t i = 0; i < phi.node_count(); ++i) phi.at(i) -= c0;
    jet.set(0, 0, 0.0);
    jet = jet.real_part();
    jet.set_real_flag(true);
    auto& Fh = data.F[h];
    if (Fh.empty()) Fh.push_back(0.0);
    Fh[0] = -sign * factorial(s) * factorial(s + 1) * jet.coeff(s + 1, 0);
    data.phi.push_back(std::move(jet));
    data.phi_grid.push_back(std::move(phi));
  }
  return data;
}

SurfaceMap build_from_representation(const RepresentationData& data, const BuildOptions& opts) {
  const int s = data.s;
  const int n = data.n();
  if (s < 1) throw Error(ErrorCode::InvalidInput, "branch order must be at least 1");
  if (n < 3) throw Error(ErrorCode::InvalidInput, "ambient dimension must be at least 3");
  if (static_cast<int>(data.F.size()) != n)
    throw Error(ErrorCode::ShapeMismatch, "phi and F differ in length");
  if (data.numeric() && static_cast<int>(data.phi_grid.size()) != n)
    throw Error(ErrorCode::ShapeMismatch, "phi grids and jets differ in length");

  const auto defects = data.constraint_defects();
  std::vector<int> failing;
  for (int h = 0; h < n; ++h)
    if (defects[h] > kConstraintTolerance) failing.push_back(h);
  if (!failing.empty())
    throw Error(ErrorCode::ConstraintViolated, "representation constraint fails",
                {{"components", list_json(failing)}});

  const int N = default_order(s, opts);
  SurfaceMap f;
  f.n = n;
  f.s = s;
  f.label = data.numeric() ? "representation-numeric" : "representation";
  for (int h = 0; h < n; ++h) {
    const BiJet phi = data.phi[h].order() >= N ? data.phi[h].truncated(N) : data.phi[h].padded(N);
    BiJet fh = leading_component(h, s, N);
    for (int j = 0; j <= s; ++j)
      for (int k = 0; k <= s; ++k) {
        if (j + k > N) continue;
        BiJet term = mul_monomial(wirtinger_d(phi, k, j), k, j, sum_coefficient(s, j, k));
        fh += term.truncated(N);
      }
    add_holomorphic_integral(fh, data.F[h], s);
    f.components.push_back(fh.real_part());
  }
  finalize_flags(f);
  f.radius = opts.radius;

  if (!data.numeric()) {
    shrink_to_branch_coordinates(f, opts);
    resample_from_jets(f, opts);
    return f;
  }

  // Numeric path: the same formula with grid derivatives of phi_h.
  const GridPtr grid = data.phi_grid.front().grid_ptr();
  GridField out(grid, n, true);
  for (int h = 0; h < n; ++h) {
    const GridField& phi = data.phi_grid[h];
    if (phi.grid_ptr() != grid)
      throw Error(ErrorCode::ShapeMismatch, "phi grids must share one grid");
    std::vector<GridField> dzk{phi};
    for (int k = 1; k <= s; ++k) dzk.push_back(dz_grid(dzk.back()));
    const BiJet lead = leading_component(h, s, s + 1);
    for (std::size_t i = 0; i < grid->node_count(); ++i) {
      const cplx z = grid->node(i);
      out.at(i, h) = lead.eval(z).real() + holomorphic_integral(data.F[h], s, z);
    }
    for (int k = 0; k <= s; ++k) {
      GridField D = dzk[k];
      for (int j = 0; j <= s; ++j) {
        if (j > 0) D = dzbar_grid(D);
        const double c = sum_coefficient(s, j, k);
        for (std::size_t i = 0; i < grid->node_count(); ++i) {
          const cplx z = grid->node(i);
          out.at(i, h) += (c * D.at(i) * std::pow(std::conj(z), j) * std::pow(z, k)).real();
        }
      }
    }
  }
  f.samples = out;
  f.radius = grid->radius();
  shrink_to_branch_coordinates(f, opts);
  return f;
}

SurfaceMap build_weierstrass_minimal(int s, int k, double scale, const BuildOptions& opts) {
  if (s < 1 || k < 1) throw Error(ErrorCode::InvalidInput, "need s >= 1 and k >= 1");
  const int N = default_order(s, opts);
  SurfaceMap f;
  f.n = 3;
  f.s = s;
  f.label = "weierstrass(s=" + std::to_string(s) + ",k=" + std::to_string(k) + ")";
  // dfhat/dz = (s+1) z^s ((1 - g^2)/2, -i(1 + g^2)/2, g), g = scale z^k.
  const int m = s + 1 + 2 * k;
  const double c1 = (s + 1.0) / m * scale * scale;
  const double c3 = 2.0 * (s + 1.0) / (s + k + 1.0) * scale;
  BiJet f1(N), f2(N), f3(N);
  add_real_part_monomial(f1, 1.0, s + 1);
  add_real_part_monomial(f1, -c1, m);
  add_real_part_monomial(f2, cplx(0.0, -1.0), s + 1);
  add_real_part_monomial(f2, cplx(0.0, -c1), m);
  add_real_part_monomial(f3, c3, s + k + 1);
  f.components = {f1, f2, f3};
  finalize_flags(f);
  f.radius = opts.radius;
  shrink_to_branch_coordinates(f, opts);
  resample(f, opts, [=](cplx z, int c) {
    const cplx w = std::pow(z, s + 1);
    switch (c) {
      case 0: return cplx((w - c1 * std::pow(z, m)).real(), 0.0);
      case 1: return cplx((cplx(0, -1) * (w + c1 * std::pow(z, m))).real(), 0.0);
      default: return cplx((c3 * std::pow(z, s + k + 1)).real(), 0.0);
    }
  });
  return f;
}

SurfaceMap build_pure_branch(int s, int n, const BuildOptions& opts) {
  if (s < 1) throw Error(ErrorCode::InvalidInput, "branch order must be at least 1");
  if (n < 3) throw Error(ErrorCode::InvalidInput, "ambient dimension must be at least 3");
  const int N = default_order(s, opts);
  SurfaceMap f;
  f.n = n;
  f.s = s;
  f.label = "pure-branch";
  for (int h = 0; h < n; ++h) f.components.push_back(leading_component(h, s, N));
  finalize_flags(f);
  f.radius = opts.radius;
  shrink_to_branch_coordinates(f, opts);
  resample_from_jets(f, opts);
  return f;
}

SurfaceMap build_sphere_patch(int s, double rho, bool round_ambient, const BuildOptions& opts) {
  if (s < 1) throw Error(ErrorCode::InvalidInput, "branch order must be at least 1");
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidInput, "sphere radius must be positive");
  const int N = opts.jet_order > 0 ? opts.jet_order : std::max(2 * s + 6, 8 * (s + 1));
  SurfaceMap f;
  f.n = 3;
  f.s = s;
  f.label = round_ambient ? "sphere-patch-round" : "sphere-patch";
  if (round_ambient) f.metric = AmbientMetric::inverse_stereographic();
  // With w = z^{s+1} and u = |w|^2 / (4 rho^2): (Re w, Im w, 2 rho u) / (1 + u).
  BiJet f1(N), f2(N), f3(N);
  const int p = s + 1;
  double coef = 1.0;
  for (int m = 0; m * 2 * p <= N; ++m) {
    const int a = m * p;
    if (a + a + p <= N) {
      f1.add_to(a + p, a, 0.5 * coef);
      f1.add_to(a, a + p, 0.5 * coef);
      f2.add_to(a + p, a, cplx(0.0, -0.5 * coef));
      f2.add_to(a, a + p, cplx(0.0, 0.5 * coef));
    }
    if (m >= 1) f3.add_to(a, a, -2.0 * rho * coef);
    coef *= -1.0 / (4.0 * rho * rho);
  }
  f.components = {f1, f2, f3};
  finalize_flags(f);
  f.radius = opts.radius;
  shrink_to_branch_coordinates(f, opts);
  resample(f, opts, [=](cplx z, int c) {
    const cplx w = std::pow(z, p);
    const double q = 4.0 * rho * rho + std::norm(w);
    switch (c) {
      case 0: return cplx(4.0 * rho * rho * w.real() / q, 0.0);
      case 1: return cplx(4.0 * rho * rho * w.imag() / q, 0.0);
      default: return cplx(2.0 * rho * std::norm(w) / q, 0.0);
    }
  });
  return f;
}

SurfaceMap reparametrize(const SurfaceMap& f, const BiJet& h) {
  if (h.order() < 1 || std::abs(h.coeff(0, 0)) > kJetTol)
    throw Error(ErrorCode::NotDiffeoGerm, "h(0) != 0");
  BiJet e;
  try {
    e = divide_z_pow(h, 1);
  } catch (const Error&) {
    throw Error(ErrorCode::NotDiffeoGerm, "h is not of the form z e(z)");
  }
  if (std::abs(e.coeff(0, 0)) <= kJetTol)
    throw Error(ErrorCode::NotDiffeoGerm, "e(0) = 0", {{"e0", "0"}});
  SurfaceMap g = f;
  g.components.clear();
  for (const auto& c : f.components) g.components.push_back(jet_compose(c, h).real_part());
  finalize_flags(g);
  g.label = f.label + "∘h";
  if (f.has_samples()) {
    const auto comps = g.components;
    g.samples = sample(f.samples.grid_ptr(), g.n,
                       [&comps](cplx z, int c) { return cplx(comps[c].eval(z).real(), 0.0); });
    g.samples.set_real_flag(true);
  }
  return g;
}

SurfaceMap ambient_rotate(const SurfaceMap& f, const Eigen::MatrixXd& M) {
  const int n = f.n;
  if (M.rows() != n || M.cols() != n)
    throw Error(ErrorCode::ShapeMismatch, "rotation must be n x n");
  const double orth = (M.transpose() * M - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  const double off = std::max(M.topRightCorner(2, n - 2).cwiseAbs().maxCoeff(),
                              M.bottomLeftCorner(n - 2, 2).cwiseAbs().maxCoeff());
  if (orth > 1e-10 || off > 1e-12)
    throw Error(ErrorCode::InvalidInput, "M must be block-diagonal orthogonal",
                {{"orthogonality_defect", std::to_string(orth)}});
  SurfaceMap g = f;
  for (int i = 0; i < n; ++i) {
    BiJet acc(f.jet_order());
    for (int j = 0; j < n; ++j)
      if (M(i, j) != 0.0) acc += f.components[j] * cplx(M(i, j), 0.0);
    g.components[i] = acc;
  }
  finalize_flags(g);
  if (f.has_samples()) {
    for (std::size_t node = 0; node < f.samples.node_count(); ++node)
      for (int i = 0; i < n; ++i) {
        double v = 0.0;
        for (int j = 0; j < n; ++j) v += M(i, j) * f.samples.at(node, j).real();
        g.samples.at(node, i) = v;
      }
  }
  g.label = "M·" + f.label;
  return g;
}

void shrink_to_branch_coordinates(SurfaceMap& f, const BuildOptions& opts) {
  if (!opts.shrink) return;
  BranchConditions c = scan_branch_conditions(f, f.radius, opts.n_r, opts.n_theta);
  while (!c.ok()) {
    if (f.halvings == kMaxHalvings)
      throw Error(ErrorCode::BuildRejected, "branch-coordinate conditions fail after shrinking",
                  {{"radius", std::to_string(f.radius)},
                   {"sup_ratio", std::to_string(c.sup_ratio)},
                   {"min_frontal_det", std::to_string(c.min_frontal_det)}});
    f.radius *= 0.5;
    ++f.halvings;
    c = scan_branch_conditions(f, f.radius, opts.n_r, opts.n_theta);
  }
}

}  // namespace branchkit
