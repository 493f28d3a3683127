#include "branchkit/branch.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "branchkit/error.hpp"

namespace branchkit {

namespace {

// Jet coefficients below this count as zero during detection; fitted and composed
// jets carry round-off well above kJetTol.
constexpr double kDetectTol = 1e-10;

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct PointD {
  std::vector<cplx> d;
  cplx d1p, d2p;
};

GridPtr analysis_grid(const SurfaceMap& f) {
  if (f.has_samples() && std::abs(f.samples.grid().radius() - f.radius) < 1e-14 * f.radius &&
      f.samples.grid().mode() == GridMode::Polar)
    return f.samples.grid_ptr();
  const int nr = f.has_samples() && f.samples.grid().mode() == GridMode::Polar
                     ? f.samples.grid().n_r()
                     : 128;
  const int nt = f.has_samples() && f.samples.grid().mode() == GridMode::Polar
                     ? f.samples.grid().n_theta()
                     : 128;
  return DiskGrid::polar(f.radius, nr, nt);
}

double frontal_det(cplx d1, cplx d2) {
  return 4.0 * (d1.imag() * d2.real() - d1.real() * d2.imag());
}

}  // namespace

BranchConditions scan_branch_conditions(const SurfaceMap& f, double radius, int n_r,
                                        int n_theta) {
  const int s = f.s;
  const BiJet g1 = wirtinger_dz(f.components[0]);
  const BiJet g2 = wirtinger_dz(f.components[1]);
  const auto grid = DiskGrid::polar(radius, n_r, n_theta);
  BranchConditions c;
  c.min_frontal_det = 1.0;
  c.min_denominator = 1.0;
  c.sup_ratio = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < grid->node_count(); ++i) {
    const cplx z = grid->node(i);
    const cplx scale = (s + 1.0) * std::pow(z, s);
    const cplx d1 = g1.eval(z) / scale;
    const cplx d2 = g2.eval(z) / scale;
    const cplx d1p = 2.0 * d1 - 1.0;
    const cplx d2p = cplx(0.0, 2.0) * d2 - 1.0;
    const double det = frontal_det(d1, d2);
    const double P = std::abs(1.0 + 0.5 * (d1p + d2p));
    const double ratio = std::abs(0.5 * (d1p - d2p)) / P;
    if (!std::isfinite(det) || !std::isfinite(ratio)) finite = false;
    c.min_frontal_det = std::min(c.min_frontal_det, det);
    c.min_denominator = std::min(c.min_denominator, P);
    c.sup_ratio = std::max(c.sup_ratio, ratio);
  }
  c.frontal_ok = finite && c.min_frontal_det > 0.0;
  c.quasiregular_ok = finite && c.min_denominator > 0.0 && c.sup_ratio < 1.0;
  return c;
}

int detect_branch_order(const SurfaceMap& f) {
  const int N = f.jet_order();
  // Smallest z-power carrying a nonzero coefficient in any component.
  int a0 = -1;
  for (int a = 1; a <= N && a0 < 0; ++a)
    for (const auto& c : f.components) {
      for (int b = 0; a + b <= N; ++b)
        if (std::abs(c.coeff(a, b)) > kDetectTol) {
          a0 = a;
          break;
        }
      if (a0 >= 0) break;
    }
  if (a0 < 0) throw Error(ErrorCode::NotABranchPoint, "all jet coefficients vanish");
  const int s = a0 - 1;
  if (s < 1)
    throw Error(ErrorCode::NotABranchPoint, "dfhat/dz(0) != 0: immersion or not normalized",
                {{"first_z_power", std::to_string(a0)}});
  std::vector<cplx> v;
  for (const auto& c : f.components) v.push_back(c.coeff(s + 1, 0));
  double tail = 0.0;
  for (std::size_t i = 2; i < v.size(); ++i) tail = std::max(tail, std::abs(v[i]));
  const cplx v1 = v[0], v2 = v[1];
  if (tail <= kDetectTol && std::abs(v1 - 0.5) <= kDetectTol &&
      std::abs(v2 - cplx(0.0, -0.5)) <= kDetectTol)
    return s;
  // A rotation D(alpha) maps (1/2, -i/2) to e^{i alpha}(1/2, -i/2); a reflection
  // gives e^{i alpha}(1/2, i/2).
  if (tail <= kDetectTol && std::abs(std::abs(v1) - 0.5) <= kDetectTol) {
    const double alpha = std::arg(v1);
    const cplx u = std::polar(1.0, alpha);
    if (std::abs(v2 - u * cplx(0.0, -0.5)) <= kDetectTol)
      throw Error(ErrorCode::AmbientFrameMismatch, "leading vector is a rotation of the canonical one",
                  {{"s", std::to_string(s)}, {"angle", num(alpha)}, {"reflection", "false"}});
    if (std::abs(v2 - u * cplx(0.0, 0.5)) <= kDetectTol)
      throw Error(ErrorCode::AmbientFrameMismatch,
                  "leading vector is a reflection of the canonical one",
                  {{"s", std::to_string(s)}, {"angle", num(alpha)}, {"reflection", "true"}});
  }
  throw Error(ErrorCode::NotABranchPoint, "leading coefficient is not canonical",
              {{"s", std::to_string(s)},
               {"leading_re", "[" + num(v1.real()) + "," + num(v2.real()) + "]"},
               {"leading_im", "[" + num(v1.imag()) + "," + num(v2.imag()) + "]"}});
}

BranchData extract_branch_data(const SurfaceMap& f) {
  BranchData bd;
  bd.s = detect_branch_order(f);
  bd.n = f.n;
  const int s = bd.s;
  std::vector<BiJet> dz, dzdzbar;
  for (const auto& c : f.components) {
    dz.push_back(wirtinger_dz(c));
    dzdzbar.push_back(wirtinger_d(c, 1, 1));
    bd.d.push_back(divide_z_pow(dz.back(), s, kDetectTol) * cplx(1.0 / (s + 1.0), 0.0));
    bd.l.push_back(divide_zbar_pow(divide_z_pow(dzdzbar.back(), s, kDetectTol), s, kDetectTol));
  }
  const int Nd = bd.d[0].order();
  bd.d1p = bd.d[0] * cplx(2.0, 0.0) - BiJet::constant(Nd, 1.0);
  bd.d2p = bd.d[1] * cplx(0.0, 2.0) - BiJet::constant(Nd, 1.0);

  bd.grid = analysis_grid(f);
  bd.d_grid = GridField(bd.grid, f.n);
  bd.l_grid = GridField(bd.grid, f.n);
  for (std::size_t i = 0; i < bd.grid->node_count(); ++i) {
    const cplx z = bd.grid->node(i);
    const cplx scale = (s + 1.0) * std::pow(z, s);
    const double r2s = std::pow(std::norm(z), s);
    for (int c = 0; c < f.n; ++c) {
      bd.d_grid.at(i, c) = dz[c].eval(z) / scale;
      const cplx l = dzdzbar[c].eval(z) / r2s;
      bd.l_grid.at(i, c) = l;
      bd.l_imag = std::max(bd.l_imag, std::abs(l.imag()));
    }
  }
  if (bd.l_imag > kNonRealTolerance)
    throw Error(ErrorCode::NonRealL, "l has an imaginary part", {{"max_imag", num(bd.l_imag)}});
  bd.conditions = scan_branch_conditions(f, f.radius, bd.grid->n_r(), bd.grid->n_theta());
  if (!bd.conditions.quasiregular_ok)
    throw Error(ErrorCode::QuasiBoundViolated, "quasiregularity bound fails",
                {{"sup_ratio", num(bd.conditions.sup_ratio)},
                 {"min_denominator", num(bd.conditions.min_denominator)}});
  return bd;
}

DistinguishedCoefficient distinguished_coefficient(const BranchData& bd) {
  const int s = bd.s;
  const int N = bd.d1p.order();
  const BiJet delta = bd.d1p - bd.d2p;
  const BiJet P = BiJet::constant(N, 1.0) + (bd.d1p + bd.d2p) * cplx(0.5, 0.0);
  const BiJet delta_bar = delta.conj();
  const BiJet E = delta_bar * jet_reciprocal(P) * cplx(0.5, 0.0);

  DistinguishedCoefficient out;
  out.leading_limited = true;
  out.leading_zbar_order = N + 1;
  for (int j = 0; j <= N; ++j)
    if (std::abs(delta_bar.coeff(0, j)) > kDetectTol) {
      out.leading_zbar_order = j;
      out.leading_limited = false;
      break;
    }
  out.smoothness = std::min(out.leading_zbar_order - 1, N - 1);
  if (out.smoothness < 0)
    throw Error(ErrorCode::NonExtendable, "d'_1 - d'_2 does not vanish at 0");
  // Terms zbar^s z^{j-s} zbar^k with j < s are not polynomial; the jet exists up to
  // the degree below the first of them.
  int valid = out.smoothness;
  for (int deg = 0; deg <= valid; ++deg)
    for (int j = 0; j < s && j <= deg; ++j)
      if (std::abs(E.coeff(j, deg - j)) > kDetectTol) valid = std::min(valid, deg - 1);
  if (valid < 0) throw Error(ErrorCode::NonExtendable, "the coefficient does not vanish at 0");
  out.jet = conj_ratio_extend(E.truncated(valid), s, kDetectTol);
  if (std::abs(out.jet.coeff(0, 0)) > kDetectTol)
    throw Error(ErrorCode::NonExtendable, "varpi(0) != 0");

  out.grid = GridField(bd.grid, 1);
  for (std::size_t i = 0; i < bd.grid->node_count(); ++i) {
    const cplx z = bd.grid->node(i);
    const cplx d1p = 2.0 * bd.d_grid.at(i, 0) - 1.0;
    const cplx d2p = cplx(0.0, 2.0) * bd.d_grid.at(i, 1) - 1.0;
    const cplx e = 0.5 * std::conj(d1p - d2p) / (1.0 + 0.5 * (d1p + d2p));
    const cplx w = std::pow(std::conj(z) / z, s) * e;
    out.grid.at(i) = w;
    out.sup = std::max(out.sup, std::abs(w));
  }
  if (out.sup >= 1.0)
    throw Error(ErrorCode::QuasiBoundViolated, "sup |varpi| >= 1", {{"sup", num(out.sup)}});
  return out;
}

BranchIndex index_and_degree(const SurfaceMap& f) {
  const int s = detect_branch_order(f);
  std::vector<BiJet> F(f.components.begin() + 2, f.components.end());
  const ZOrder oF = ord_z(F, kDetectTol);
  BranchIndex out;
  out.iota = oF.limited() ? ZOrder::truncation_limited(oF.value() - 1)
                          : ZOrder::finite(oF.value() - 1);
  const BiJet a = f.components[0] + f.components[1] * cplx(0.0, 1.0);
  const ZOrder oa = ord_z(a.conj(), kDetectTol);
  out.rho = oa.limited() ? ZOrder::truncation_limited(oa.value() - (s + 1))
                         : ZOrder::finite(oa.value() - (s + 1));
  return out;
}

GridField conformality_residual(const SurfaceMap& f, const BranchData& bd) {
  GridField out(bd.grid, 1, true);
  for (std::size_t i = 0; i < bd.grid->node_count(); ++i) {
    cplx acc = 0.0;
    for (int c = 0; c < f.n; ++c) acc += bd.d_grid.at(i, c) * bd.d_grid.at(i, c);
    const double factor = f.metric.is_euclidean() ? 1.0 : f.metric.factor(f.eval(bd.grid->node(i)));
    out.at(i) = std::abs(acc) * factor;
  }
  return out;
}

namespace {

// Hhat with Hhat_j sum g_ik Re(d_i conj d_k) = l_j/(s+1)^2 + sum Gamma^j_ik Re(d_i conj d_k).
Eigen::VectorXd mean_curvature_at(const AmbientMetric& metric, const Eigen::VectorXd& y,
                                  const std::vector<cplx>& d, const std::vector<double>& l,
                                  int s, double* denominator) {
  const int n = static_cast<int>(d.size());
  double dd = 0.0;
  for (const auto& v : d) dd += std::norm(v);
  const double den = metric.factor(y) * dd;
  const Eigen::VectorXd g = metric.grad_phi(y);
  cplx gd = 0.0;
  for (int k = 0; k < n; ++k) gd += g(k) * d[k];
  Eigen::VectorXd H(n);
  for (int j = 0; j < n; ++j) {
    const double gamma = 2.0 * (d[j] * std::conj(gd)).real() - g(j) * dd;
    H(j) = (l[j] / ((s + 1.0) * (s + 1.0)) + gamma) / den;
  }
  *denominator = den;
  return H;
}

}  // namespace

MeanCurvatureExtension mean_curvature_extension(const SurfaceMap& f, const BranchData& bd) {
  const GridField conf = conformality_residual(f, bd);
  const double worst = conf.max_abs();
  if (worst > kConformalTolerance)
    throw Error(ErrorCode::NotConformal, "d^t G d does not vanish", {{"residual", num(worst)}});
  MeanCurvatureExtension out;
  const int n = f.n;
  std::vector<cplx> d(n);
  std::vector<double> l(n);
  for (int c = 0; c < n; ++c) {
    d[c] = bd.d[c].coeff(0, 0);
    l[c] = bd.l[c].coeff(0, 0).real();
  }
  out.at_origin = mean_curvature_at(f.metric, Eigen::VectorXd::Zero(n), d, l, bd.s,
                                    &out.denominator_origin);
  out.H = GridField(bd.grid, n, true);
  out.min_denominator_ratio = 1.0;
  for (std::size_t i = 0; i < bd.grid->node_count(); ++i) {
    for (int c = 0; c < n; ++c) {
      d[c] = bd.d_grid.at(i, c);
      l[c] = bd.l_grid.at(i, c).real();
    }
    double den = 0.0;
    const Eigen::VectorXd H =
        mean_curvature_at(f.metric, f.eval(bd.grid->node(i)), d, l, bd.s, &den);
    out.min_denominator_ratio = std::min(out.min_denominator_ratio, den / out.denominator_origin);
    for (int c = 0; c < n; ++c) out.H.at(i, c) = H(c);
  }
  if (out.min_denominator_ratio < 0.1)
    throw Error(ErrorCode::DenominatorVanishing,
                "mean-curvature denominator drops below 10% of its value at 0",
                {{"min_ratio", num(out.min_denominator_ratio)}});
  return out;
}

EstimateReport check_estimate(const BranchIndex& inv, int s, int n) {
  EstimateReport r;
  if (inv.iota.limited() || inv.rho.limited()) {
    r.status = EstimateStatus::Inconclusive;
    r.detail = "iota=" + inv.iota.to_string() + " rho=" + inv.rho.to_string();
    return r;
  }
  const int bound = 2 * (inv.iota.value() - s);
  r.inequality = inv.rho.value() >= bound;
  r.equality = inv.rho.value() == bound;
  if (n == 3)
    r.status = r.equality ? EstimateStatus::Equality : EstimateStatus::Violated;
  else
    r.status = r.inequality ? EstimateStatus::Holds : EstimateStatus::Violated;
  r.detail = "rho=" + std::to_string(inv.rho.value()) + " 2(iota-s)=" + std::to_string(bound);
  return r;
}

const char* estimate_status_name(EstimateStatus status) {
  switch (status) {
    case EstimateStatus::Holds: return "holds";
    case EstimateStatus::Equality: return "equality";
    case EstimateStatus::Violated: return "violated";
    case EstimateStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

}  // namespace branchkit
