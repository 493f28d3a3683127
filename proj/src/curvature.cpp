#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "branchkit/error.hpp"
#include "branchkit/geometry.hpp"

namespace branchkit {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Value, gradient and Hessian of a scalar in (x, y).
struct Taylor2 {
  double v = 0.0;
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
};

Taylor2 operator*(const Taylor2& a, const Taylor2& b) {
  Taylor2 r;
  r.v = a.v * b.v;
  r.g = a.g * b.v + a.v * b.g;
  r.h = a.h * b.v + a.g * b.g.transpose() + b.g * a.g.transpose() + a.v * b.h;
  return r;
}

Taylor2 exp2(const Taylor2& psi) {
  Taylor2 r;
  r.v = std::exp(2.0 * psi.v);
  r.g = 2.0 * r.v * psi.g;
  r.h = r.v * (4.0 * psi.g * psi.g.transpose() + 2.0 * psi.h);
  return r;
}

Eigen::Matrix2d adjugate(const Eigen::Matrix2d& m) {
  Eigen::Matrix2d a;
  a << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return a;
}

Eigen::Matrix2d complex_matrix(cplx c) {
  Eigen::Matrix2d m;
  m << c.real(), -c.imag(), c.imag(), c.real();
  return m;
}

// Values of several jets at one point, sharing the powers of z and zbar.
std::vector<cplx> eval_all(const std::vector<BiJet>& jets, cplx z) {
  int order = 0;
  for (const auto& j : jets) order = std::max(order, j.order());
  std::vector<cplx> zp(order + 1), zbp(order + 1);
  zp[0] = zbp[0] = 1.0;
  for (int i = 1; i <= order; ++i) {
    zp[i] = zp[i - 1] * z;
    zbp[i] = zbp[i - 1] * std::conj(z);
  }
  std::vector<cplx> out(jets.size());
  for (std::size_t c = 0; c < jets.size(); ++c) {
    const auto& raw = jets[c].raw();
    cplx acc = 0.0;
    for (int d = jets[c].order(); d >= 0; --d) {
      const std::size_t base = static_cast<std::size_t>(d) * (d + 1) / 2;
      for (int k = 0; k <= d; ++k) acc += raw[base + k] * zp[d - k] * zbp[k];
    }
    out[c] = acc;
  }
  return out;
}

}  // namespace

RelativeCurvature relative_curvature(const Eigen::Matrix2d& Jp, const Eigen::Matrix2d& I_W,
                                     const Eigen::Matrix2d& II_V) {
  RelativeCurvature r;
  r.frakJ = -I_W.inverse() * II_V;
  const Eigen::Matrix2d M = -adjugate(Jp) * r.frakJ;
  r.H = 0.5 * M.trace();
  r.K = r.frakJ.determinant();
  r.sigma2 = M.determinant();
  const cplx half = 0.5 * M.trace();
  const cplx root = std::sqrt(half * half - cplx(r.sigma2));
  r.principal = {half + root, half - root};
  return r;
}

GeometryEvaluator::GeometryEvaluator(const SurfaceMap& f, const BranchData& bd)
    : f_(f), s_(bd.s), n_(f.n) {
  if (f.jet_order() < 3)
    throw Error(ErrorCode::OrderTooLow, "curvature needs jets of order at least 3");
  // dx = dz + dzbar, dy = i (dz - dzbar).
  const int N = f.jet_order();
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 3; ++b)
      for (const auto& comp : f.components) {
        BiJet acc(N - a - b);
        const cplx ib = std::pow(cplx(0.0, 1.0), b);
        for (int p = 0; p <= a; ++p)
          for (int q = 0; q <= b; ++q) {
            const double sign = ((b - q) % 2 == 0) ? 1.0 : -1.0;
            const cplx w = binomial(a, p) * binomial(b, q) * sign * ib;
            acc += wirtinger_d(comp, p + q, a + b - p - q) * w;
          }
        partial_[a][b].push_back(acc);
      }
  d_ = bd.d;
  for (const auto& dc : d_) {
    d_z_.push_back(wirtinger_dz(dc));
    d_zbar_.push_back(wirtinger_dzbar(dc));
  }
}

Eigen::VectorXd GeometryEvaluator::partial(cplx z, int a, int b) const {
  const std::vector<cplx> v = eval_all(partial_[a][b], z);
  Eigen::VectorXd out(n_);
  for (int c = 0; c < n_; ++c) out(c) = v[c].real();
  return out;
}

PointGeometry GeometryEvaluator::at(cplx z) const {
  if (z == 0.0) throw Error(ErrorCode::SingularNode, "the branch point is singular");
  const int n = n_;
  const int m = n - 2;
  const AmbientMetric& metric = f_.metric;
  PointGeometry p;
  p.z = z;
  p.y = partial(z, 0, 0);
  const Eigen::VectorXd fx = partial(z, 1, 0), fy = partial(z, 0, 1);
  const std::array<Eigen::VectorXd, 2> fi{fx, fy};
  p.Jf.resize(n, 2);
  p.Jf << fx, fy;
  const Eigen::VectorXd fxx = partial(z, 2, 0), fxy = partial(z, 1, 1), fyy = partial(z, 0, 2);
  const Eigen::VectorXd fij[2][2] = {{fxx, fxy}, {fxy, fyy}};

  const cplx I(0.0, 1.0);
  const std::vector<cplx> d = eval_all(d_, z), dz = eval_all(d_z_, z), dzb = eval_all(d_zbar_, z);
  std::array<std::vector<cplx>, 2> dd;
  dd[0].resize(n);
  dd[1].resize(n);
  for (int c = 0; c < n; ++c) {
    dd[0][c] = dz[c] + dzb[c];
    dd[1][c] = I * (dz[c] - dzb[c]);
  }
  auto columns = [n](const std::vector<cplx>& v) {
    Eigen::MatrixXd w(n, 2);
    for (int c = 0; c < n; ++c) {
      w(c, 0) = 2.0 * v[c].real();
      w(c, 1) = -2.0 * v[c].imag();
    }
    return w;
  };
  p.W = columns(d);
  p.dW = {columns(dd[0]), columns(dd[1])};
  const cplx cz = (s_ + 1.0) * std::pow(z, s_);
  p.Jp = complex_matrix(cz);
  p.lambda = std::norm(cz);

  const double fac = metric.factor(p.y);
  const Eigen::VectorXd gphi = metric.grad_phi(p.y);
  p.G = fac * Eigen::MatrixXd::Identity(n, n);

  const Eigen::Matrix2d top = p.W.topRows(2);
  if (std::abs(top.determinant()) <= 1e-300)
    throw Error(ErrorCode::RankDeficient, "W_top is singular");
  const Eigen::Matrix2d top_inv = top.inverse();
  p.B = p.W.bottomRows(m) * top_inv;
  for (int i = 0; i < 2; ++i)
    p.dB[i] = (p.dW[i].bottomRows(m) - p.B * p.dW[i].topRows(2)) * top_inv;

  Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(n, m);
  frame.topRows(2) = -p.B.transpose();
  frame.bottomRows(m).setIdentity();
  p.xi = frame / fac;
  std::array<Eigen::MatrixXd, 2> dxi;
  for (int i = 0; i < 2; ++i) {
    Eigen::MatrixXd dframe = Eigen::MatrixXd::Zero(n, m);
    dframe.topRows(2) = -p.dB[i].transpose();
    dxi[i] = -2.0 * gphi.dot(fi[i]) * p.xi + dframe / fac;
  }

  p.I = p.Jf.transpose() * p.G * p.Jf;
  p.I_W = p.W.transpose() * p.G * p.W;

  p.II_V.resize(m);
  p.II.resize(m);
  for (int k = 0; k < m; ++k) {
    p.II_V[k] = second_form(p, p.xi.col(k), {Eigen::VectorXd(dxi[0].col(k)), Eigen::VectorXd(dxi[1].col(k))});
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const Eigen::VectorXd acc = fij[i][j] + metric.christoffel(p.y, fi[i], fi[j]);
        p.II[k](i, j) = p.xi.col(k).dot(p.G * acc);
      }
  }

  if (metric.is_euclidean()) {
    // Independent path: differentiate the closed form of b_k and use W_top^t J_{B_k}.
    const cplx d1p = 2.0 * d[0] - 1.0, d2p = 2.0 * I * d[1] - 1.0;
    const cplx P = 1.0 + 0.5 * (d1p + d2p), dl = d1p - d2p;
    const double den = ((1.0 + d1p) * std::conj(1.0 + d2p)).real();
    p.II_V_coprincipal.resize(m);
    for (int k = 0; k < m; ++k) {
      const cplx dh = d[k + 2];
      const cplx num = 2.0 * P * std::conj(dh) - std::conj(dl) * dh;
      Eigen::Matrix2d JB;
      for (int i = 0; i < 2; ++i) {
        const cplx e1 = 2.0 * dd[i][0], e2 = 2.0 * I * dd[i][1];
        const cplx eP = 0.5 * (e1 + e2), edl = e1 - e2, edh = dd[i][k + 2];
        const cplx enum_ = 2.0 * eP * std::conj(dh) + 2.0 * P * std::conj(edh) -
                           std::conj(edl) * dh - std::conj(dl) * edh;
        const double eden = (e1 * std::conj(1.0 + d2p) + (1.0 + d1p) * std::conj(e2)).real();
        const cplx db = (enum_ * den - num * eden) / (den * den);
        JB(0, i) = db.real();
        JB(1, i) = db.imag();
      }
      p.II_V_coprincipal[k] = top.transpose() * JB;
    }
  }

  // Gram-Schmidt in the given order: xi' = xi L^{-t} for the Cholesky factor L.
  const Eigen::MatrixXd S = p.xi.transpose() * p.G * p.xi;
  const Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::MetricDegenerate, "normal frame Gram matrix is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  p.D = L.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(m, m));
  p.xi_orth = p.xi * p.D;

  p.II_V_orth.assign(m, Eigen::Matrix2d::Zero());
  p.II_orth.assign(m, Eigen::Matrix2d::Zero());
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      p.II_V_orth[j] += p.D(k, j) * p.II_V[k];
      p.II_orth[j] += p.D(k, j) * p.II[k];
    }

  p.H_rel = Eigen::VectorXd::Zero(n);
  p.H = Eigen::VectorXd::Zero(n);
  p.ambient_sec = metric.sectional(p.y, p.W.col(0), p.W.col(1));
  p.sec = p.ambient_sec;
  p.sec_classical = p.ambient_sec;
  const Eigen::Matrix2d I_inv = p.I.inverse();
  const double det_I = p.I.determinant();
  for (int j = 0; j < m; ++j) {
    const RelativeCurvature rel = relative_curvature(p.Jp, p.I_W, p.II_V_orth[j]);
    ClassicalCurvature cl;
    cl.A = I_inv * p.II_orth[j];
    cl.H = 0.5 * cl.A.trace();
    cl.K = cl.A.determinant();
    p.H_rel += rel.H * p.xi_orth.col(j);
    p.H += cl.H * p.xi_orth.col(j);
    p.sec += rel.K / p.lambda;
    p.sec_classical += p.II_orth[j].determinant() / det_I;
    p.relative.push_back(rel);
    p.classical.push_back(cl);
  }
  return p;
}

Eigen::Matrix2d GeometryEvaluator::second_form(const PointGeometry& p, const Eigen::VectorXd& eta,
                                               const std::array<Eigen::VectorXd, 2>& deta) const {
  Eigen::Matrix2d out;
  for (int i = 0; i < 2; ++i) {
    const Eigen::VectorXd fi = p.Jf.col(i);
    const Eigen::VectorXd nabla = deta[i] + f_.metric.christoffel(p.y, fi, eta);
    for (int j = 0; j < 2; ++j) out(j, i) = -p.W.col(j).dot(p.G * nabla);
  }
  return out;
}

double GeometryEvaluator::brioschi(cplx z) const {
  std::array<std::array<Eigen::VectorXd, 4>, 4> part;
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 3; ++b) part[a][b] = partial(z, a, b);
  // Partials of fhat indexed by a multi-index over {x, y}.
  auto P = [&](std::initializer_list<int> idx) -> const Eigen::VectorXd& {
    int a = 0;
    for (int v : idx) a += (v == 0);
    return part[a][static_cast<int>(idx.size()) - a];
  };
  auto dot = [&](int i, int j) {
    Taylor2 t;
    t.v = P({i}).dot(P({j}));
    for (int k = 0; k < 2; ++k) t.g(k) = P({i, k}).dot(P({j})) + P({i}).dot(P({j, k}));
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l)
        t.h(k, l) = P({i, k, l}).dot(P({j})) + P({i, k}).dot(P({j, l})) +
                    P({i, l}).dot(P({j, k})) + P({i}).dot(P({j, k, l}));
    return t;
  };
  const Eigen::VectorXd& y = part[0][0];
  const AmbientMetric& metric = f_.metric;
  Taylor2 psi;
  psi.v = metric.phi(y);
  const Eigen::VectorXd gphi = metric.grad_phi(y);
  const Eigen::MatrixXd hphi = metric.hess_phi(y);
  for (int k = 0; k < 2; ++k) psi.g(k) = gphi.dot(P({k}));
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) psi.h(k, l) = P({k}).dot(hphi * P({l})) + gphi.dot(P({k, l}));
  const Taylor2 conf = exp2(psi);
  const Taylor2 E = conf * dot(0, 0), F = conf * dot(0, 1), G = conf * dot(1, 1);

  Eigen::Matrix3d M1, M2;
  M1 << -0.5 * E.h(1, 1) + F.h(0, 1) - 0.5 * G.h(0, 0), 0.5 * E.g(0), F.g(0) - 0.5 * E.g(1),
      F.g(1) - 0.5 * G.g(0), E.v, F.v,
      0.5 * G.g(1), F.v, G.v;
  M2 << 0.0, 0.5 * E.g(1), 0.5 * G.g(0),
      0.5 * E.g(1), E.v, F.v,
      0.5 * G.g(0), F.v, G.v;
  const double w = E.v * G.v - F.v * F.v;
  return (M1.determinant() - M2.determinant()) / (w * w);
}

double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double relative_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.size() == 0) return 0.0;
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

void IdentityResiduals::absorb(const IdentityResiduals& o) {
  frame = std::max(frame, o.frame);
  first_form = std::max(first_form, o.first_form);
  second_form = std::max(second_form, o.second_form);
  two_path = std::max(two_path, o.two_path);
  orthogonality = std::max(orthogonality, o.orthogonality);
  corollary = std::max(corollary, o.corollary);
  scaling_H = std::max(scaling_H, o.scaling_H);
  scaling_K = std::max(scaling_K, o.scaling_K);
  scaling_sigma2 = std::max(scaling_sigma2, o.scaling_sigma2);
  mean_vector = std::max(mean_vector, o.mean_vector);
  gauss = std::max(gauss, o.gauss);
  eigen_product = std::max(eigen_product, o.eigen_product);
}

double IdentityResiduals::worst_relation() const {
  return std::max({first_form, second_form, two_path, orthogonality, corollary, scaling_H,
                   scaling_K, scaling_sigma2, mean_vector, gauss, eigen_product});
}

IdentityResiduals identity_residuals(const PointGeometry& p, bool euclidean) {
  IdentityResiduals r;
  r.frame = relative_gap(p.Jf, p.W * p.Jp);
  r.first_form = relative_gap(p.I, p.Jp.transpose() * p.I_W * p.Jp);
  r.orthogonality = (p.W.transpose() * p.G * p.xi).cwiseAbs().maxCoeff();
  const std::size_t m = p.II_V.size();
  for (std::size_t k = 0; k < m; ++k) {
    r.second_form = std::max(r.second_form, relative_gap(p.II[k], p.Jp.transpose() * p.II_V[k]));
    if (euclidean)
      r.two_path = std::max(r.two_path, relative_gap(p.II_V[k], p.II_V_coprincipal[k]));
  }
  Eigen::Matrix2d adj;
  adj << p.Jp(1, 1), -p.Jp(0, 1), -p.Jp(1, 0), p.Jp(0, 0);
  for (std::size_t j = 0; j < m; ++j) {
    const RelativeCurvature& rel = p.relative[j];
    const ClassicalCurvature& cl = p.classical[j];
    const Eigen::Matrix2d lhs = -adj * rel.frakJ;
    r.corollary = std::max(r.corollary, relative_gap(lhs, p.lambda * cl.A));
    r.scaling_H = std::max(r.scaling_H, relative_gap(rel.H, p.lambda * cl.H));
    r.scaling_K = std::max(r.scaling_K, relative_gap(rel.K, p.lambda * cl.K));
    r.scaling_sigma2 =
        std::max(r.scaling_sigma2, relative_gap(rel.sigma2, p.lambda * p.lambda * cl.K));
    r.eigen_product = std::max(
        r.eigen_product, relative_gap((rel.principal[0] * rel.principal[1]).real(), rel.sigma2));
  }
  r.mean_vector = relative_gap(p.H_rel, p.lambda * p.H);
  r.gauss = relative_gap(p.sec, p.sec_classical);
  return r;
}

CurvatureFields curvature_fields(const GeometryEvaluator& ev, const GridPtr& grid) {
  const int n = ev.n();
  const int m = n - 2;
  const std::size_t count = grid->node_count();
  const bool euclidean = ev.map().metric.is_euclidean();
  CurvatureFields out;
  out.lambda = GridField(grid, 1, true);
  out.I = MatrixField(grid, 2, 2, count);
  out.I_W = MatrixField(grid, 2, 2, count);
  out.II.assign(m, MatrixField(grid, 2, 2, count));
  out.II_V.assign(m, MatrixField(grid, 2, 2, count));
  out.H = GridField(grid, m, true);
  out.K = GridField(grid, m, true);
  out.H_rel = GridField(grid, m, true);
  out.K_rel = GridField(grid, m, true);
  out.sec = GridField(grid, 1, true);
  out.mean_curvature = GridField(grid, n, true);
  for (std::size_t i = 0; i < count; ++i) {
    const PointGeometry p = ev.at(grid->node(i));
    out.lambda.at(i) = p.lambda;
    out.I.at(i) = p.I;
    out.I_W.at(i) = p.I_W;
    for (int j = 0; j < m; ++j) {
      out.II[j].at(i) = p.II_orth[j];
      out.II_V[j].at(i) = p.II_V_orth[j];
      out.H.at(i, j) = p.classical[j].H;
      out.K.at(i, j) = p.classical[j].K;
      out.H_rel.at(i, j) = p.relative[j].H;
      out.K_rel.at(i, j) = p.relative[j].K;
    }
    out.sec.at(i) = p.sec;
    for (int c = 0; c < n; ++c) out.mean_curvature.at(i, c) = p.H(c);
    out.residuals.absorb(identity_residuals(p, euclidean));
  }
  return out;
}

double brioschi_gap(const GeometryEvaluator& ev, const GridPtr& grid, double inner) {
  double worst = 0.0;
  for (std::size_t i = 0; i < grid->node_count(); ++i) {
    const cplx z = grid->node(i);
    if (std::abs(z) < inner) continue;
    worst = std::max(worst, relative_gap(ev.at(z).sec, ev.brioschi(z)));
  }
  return worst;
}

std::optional<OriginCurvature> curvature_at_origin(const SurfaceMap& f, const BranchData& bd,
                                                   const PrincipalParts& pp) {
  if (!f.metric.is_euclidean()) return std::nullopt;
  const int s = bd.s;
  const cplx I(0.0, 1.0);
  Eigen::MatrixXd W0(f.n, 2);
  for (int c = 0; c < f.n; ++c) {
    const cplx d = bd.d[c].coeff(0, 0);
    W0(c, 0) = 2.0 * d.real();
    W0(c, 1) = -2.0 * d.imag();
  }
  const double det_top = W0.topRows(2).determinant();
  const double det_IW = (W0.transpose() * W0).determinant();
  OriginCurvature out;
  for (const BiJet& b : pp.b_jet) {
    // B_k1 = Re b, B_k2 = Im b with dB/dz = z^s (u, v) near 0.
    const BiJet B1 = (b + b.conj()) * 0.5;
    const BiJet B2 = (b - b.conj()) * (-0.5 * I);
    cplx u, v;
    try {
      u = divide_z_pow(wirtinger_dz(B1), s).coeff(0, 0);
      v = divide_z_pow(wirtinger_dz(B2), s).coeff(0, 0);
    } catch (const Error&) {
      return std::nullopt;
    }
    Eigen::Matrix2d F;
    F << 2.0 * u.real(), -2.0 * u.imag(), 2.0 * v.real(), -2.0 * v.imag();
    const double K = det_top * F.determinant() / (det_IW * (s + 1.0) * (s + 1.0));
    out.K.push_back(K);
    out.sec += K;
  }
  return out;
}

const char* curvature_class_name(CurvatureClass c) {
  switch (c) {
    case CurvatureClass::BoundedLipschitz: return "BoundedLipschitz";
    case CurvatureClass::Divergent: return "Divergent";
    case CurvatureClass::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

CurvatureClass predicted_class(const ZOrder& iota, int s) {
  if (!iota.limited()) return iota.value() < 2 * s + 1 ? CurvatureClass::Divergent
                                                       : CurvatureClass::BoundedLipschitz;
  return iota.value() >= 2 * s + 1 ? CurvatureClass::BoundedLipschitz
                                   : CurvatureClass::Inconclusive;
}

void classify_annuli(CurvatureReport& report, const GeometryEvaluator& ev) {
  const int rings = kAnnulusLast - kAnnulusFirst + 2;
  std::vector<std::vector<double>> sec(rings, std::vector<double>(kAnnulusAngles));
  std::vector<double> radius(rings);
  for (int q = 0; q < rings; ++q) {
    radius[q] = report.radius / std::ldexp(1.0, kAnnulusFirst + q);
    for (int a = 0; a < kAnnulusAngles; ++a) {
      const double th = 2.0 * std::numbers::pi * (a + 0.5) / kAnnulusAngles;
      sec[q][a] = ev.at(std::polar(radius[q], th)).sec;
    }
  }
  auto sup_abs = [&](int q) {
    double m = 0.0;
    for (double v : sec[q]) m = std::max(m, std::abs(v));
    return m;
  };
  report.annuli.clear();
  double running = 0.0;
  report.min_growth = std::numeric_limits<double>::infinity();
  for (int q = 0; q + 1 < rings; ++q) {
    AnnulusStat st;
    st.j = kAnnulusFirst + q;
    st.r = radius[q];
    st.sup_abs = sup_abs(q);
    for (double v : sec[q]) {
      st.mean_abs += std::abs(v) / kAnnulusAngles;
      st.mean += v / kAnnulusAngles;
    }
    const double next = sup_abs(q + 1);
    st.growth = st.sup_abs > 0.0 ? next / st.sup_abs : 0.0;
    for (int a = 0; a < kAnnulusAngles; ++a) {
      const double diff = std::abs(sec[q][a] - sec[q + 1][a]);
      const double scale = std::max({1.0, std::abs(sec[q][a]), std::abs(sec[q + 1][a])});
      if (diff > kSecNoise * scale) st.q = std::max(st.q, diff / st.r);
    }
    running = std::max(running, st.q);
    st.lipschitz = running;
    report.min_growth = std::min(report.min_growth, st.growth);
    report.annuli.push_back(st);
  }
  const double c_max = report.annuli.back().lipschitz;
  const double c_min = report.annuli.front().lipschitz;
  report.lipschitz_variation = c_max > 0.0 ? (c_max - c_min) / c_max : 0.0;

  // Least-squares slope of log sup|Sec| against log(1/r) over all rings.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  bool positive = true;
  for (int q = 0; q < rings; ++q) {
    const double m = sup_abs(q);
    if (!(m > 0.0)) positive = false;
    const double x = -std::log(radius[q]);
    const double y = positive ? std::log(m) : 0.0;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  report.growth_exponent = positive ? (rings * sxy - sx * sy) / (rings * sxx - sx * sx) : 0.0;

  double inner_mean = 0.0;
  for (double v : sec[rings - 1]) inner_mean += v;
  report.sec_sign = inner_mean > 0.0 ? 1 : (inner_mean < 0.0 ? -1 : 0);

  if (report.min_growth >= kDivergenceGrowth)
    report.empirical = CurvatureClass::Divergent;
  else if (report.lipschitz_variation <= kLipschitzVariation)
    report.empirical = CurvatureClass::BoundedLipschitz;
  else
    report.empirical = CurvatureClass::Inconclusive;
  report.agree = report.empirical == report.predicted;
}

CurvatureReport classify_branch_curvature(const SurfaceMap& f) {
  const BranchData bd = extract_branch_data(f);
  const GeometryEvaluator ev(f, bd);
  CurvatureReport report;
  report.label = f.label;
  report.s = bd.s;
  report.n = f.n;
  report.radius = f.radius;
  report.ambient = f.metric.name();
  report.iota = index_and_degree(f).iota;
  report.predicted = predicted_class(report.iota, bd.s);
  report.fields = curvature_fields(ev, bd.grid);
  for (std::size_t i = 0; i < bd.grid->node_count(); ++i) {
    double norm2 = 0.0;
    for (int c = 0; c < f.n; ++c) norm2 += std::norm(report.fields.mean_curvature.at(i, c));
    report.max_mean_curvature = std::max(report.max_mean_curvature, std::sqrt(norm2));
  }
  report.brioschi_inner = kBrioschiInnerFraction * f.radius;
  report.brioschi_gap = brioschi_gap(ev, bd.grid, report.brioschi_inner);
  const PrincipalParts pp = principal_coprincipal(f, bd);
  report.origin = curvature_at_origin(f, bd, pp);
  if (conformality_residual(f, bd).max_abs() <= kConformalTolerance)
    report.mean_curvature_origin = mean_curvature_extension(f, bd).at_origin;
  classify_annuli(report, ev);
  return report;
}

}  // namespace branchkit
