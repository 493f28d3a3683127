#include "branchkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "branchkit/error.hpp"

namespace branchkit {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string shape(int r, int c) { return "\"" + std::to_string(r) + "x" + std::to_string(c) + "\""; }

void require_same_count(const MatrixField& a, const MatrixField& b) {
  if (a.node_count() != b.node_count())
    throw Error(ErrorCode::ShapeMismatch, "matrix fields have different node counts",
                {{"left", std::to_string(a.node_count())}, {"right", std::to_string(b.node_count())}});
}

const GridPtr& common_grid(const MatrixField& a, const MatrixField& b) {
  return a.grid_ptr() ? a.grid_ptr() : b.grid_ptr();
}

// Real 2x2 matrix of multiplication by c.
Eigen::Matrix2d complex_matrix(cplx c) {
  Eigen::Matrix2d m;
  m << c.real(), -c.imag(), c.imag(), c.real();
  return m;
}

// Columns 2 Re v and -2 Im v: the x and y derivatives of a real map with d/dz = v.
Eigen::MatrixXd real_columns(const std::vector<cplx>& v) {
  Eigen::MatrixXd m(v.size(), 2);
  for (std::size_t c = 0; c < v.size(); ++c) {
    m(c, 0) = 2.0 * v[c].real();
    m(c, 1) = -2.0 * v[c].imag();
  }
  return m;
}

Eigen::MatrixXd jacobian_from_jets(const std::vector<BiJet>& dz, cplx z) {
  std::vector<cplx> v(dz.size());
  for (std::size_t c = 0; c < dz.size(); ++c) v[c] = dz[c].eval(z);
  return real_columns(v);
}

}  // namespace

MatrixField::MatrixField(GridPtr grid, int rows, int cols, std::size_t count)
    : grid_(std::move(grid)), rows_(rows), cols_(cols),
      values_(count, Eigen::MatrixXd::Zero(rows, cols)) {}

MatrixField::MatrixField(GridPtr grid, std::vector<Eigen::MatrixXd> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!values_.empty()) {
    rows_ = static_cast<int>(values_.front().rows());
    cols_ = static_cast<int>(values_.front().cols());
  }
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i].rows() != rows_ || values_[i].cols() != cols_)
      throw Error(ErrorCode::ShapeMismatch, "matrix field shape is not uniform",
                  {{"node", std::to_string(i)},
                   {"expected", shape(rows_, cols_)},
                   {"found", shape(values_[i].rows(), values_[i].cols())}});
  if (grid_ && grid_->node_count() != values_.size())
    throw Error(ErrorCode::ShapeMismatch, "value count does not match the grid");
}

double MatrixField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_)
    if (v.size() > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

MatrixField frame_matrix(const MatrixField& E, const MatrixField& U) {
  require_same_count(E, U);
  if (E.rows() != E.cols() || E.rows() != U.rows())
    throw Error(ErrorCode::ShapeMismatch, "frame_matrix needs a square frame matching the tuple",
                {{"frame", shape(E.rows(), E.cols())}, {"tuple", shape(U.rows(), U.cols())}});
  std::vector<Eigen::MatrixXd> out(U.node_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(E.at(i));
    if (!lu.isInvertible())
      throw Error(ErrorCode::RankDeficient, "frame is singular", {{"node", std::to_string(i)}});
    out[i] = lu.solve(U.at(i));
  }
  MatrixField r(common_grid(E, U), std::move(out));
  return r;
}

MatrixField right_product(const MatrixField& U, const MatrixField& B) {
  require_same_count(U, B);
  if (U.cols() != B.rows())
    throw Error(ErrorCode::ShapeMismatch, "right_product shapes are incompatible",
                {{"tuple", shape(U.rows(), U.cols())}, {"matrix", shape(B.rows(), B.cols())}});
  std::vector<Eigen::MatrixXd> out(U.node_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = U.at(i) * B.at(i);
  return MatrixField(common_grid(U, B), std::move(out));
}

MatrixField gram(const MatrixField& U, const MatrixField& V, const MatrixField& G) {
  require_same_count(U, V);
  require_same_count(U, G);
  if (U.rows() != V.rows() || G.rows() != U.rows() || G.cols() != U.rows())
    throw Error(ErrorCode::ShapeMismatch, "gram shapes are incompatible",
                {{"left", shape(U.rows(), U.cols())},
                 {"right", shape(V.rows(), V.cols())},
                 {"metric", shape(G.rows(), G.cols())}});
  std::vector<Eigen::MatrixXd> out(U.node_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = U.at(i).transpose() * G.at(i) * V.at(i);
  return MatrixField(common_grid(U, V), std::move(out));
}

double max_difference(const MatrixField& a, const MatrixField& b) {
  require_same_count(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::ShapeMismatch, "cannot compare matrix fields of different shapes");
  double m = 0.0;
  for (std::size_t i = 0; i < a.node_count(); ++i)
    m = std::max(m, (a.at(i) - b.at(i)).cwiseAbs().maxCoeff());
  return m;
}

FrontalFrame frontal_frame_from_branch(const SurfaceMap& f, const BranchData& bd) {
  const GridPtr& grid = bd.grid;
  const std::size_t count = grid->node_count();
  FrontalFrame ff;
  ff.s = bd.s;
  ff.n = f.n;
  ff.W = MatrixField(grid, f.n, 2, count);
  ff.Jp = MatrixField(grid, 2, 2, count);
  ff.G = MatrixField(grid, f.n, f.n, count);
  ff.lambda = GridField(grid, 1, true);
  ff.G0 = f.metric.factor(f.eval(0.0)) * Eigen::MatrixXd::Identity(f.n, f.n);
  std::vector<BiJet> dz;
  for (const auto& c : f.components) dz.push_back(wirtinger_dz(c));
  std::vector<cplx> d(f.n);
  for (std::size_t i = 0; i < count; ++i) {
    const cplx z = grid->node(i);
    for (int c = 0; c < f.n; ++c) d[c] = bd.d_grid.at(i, c);
    ff.W.at(i) = real_columns(d);
    ff.Jp.at(i) = complex_matrix((bd.s + 1.0) * std::pow(z, bd.s));
    ff.G.at(i) = f.metric.factor(f.eval(z)) * Eigen::MatrixXd::Identity(f.n, f.n);
    ff.lambda.at(i) = ff.Jp.at(i).determinant();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ff.W.at(i));
    if (svd.singularValues()(1) <= 1e-12 * svd.singularValues()(0))
      throw Error(ErrorCode::RankDeficient, "frame matrix W drops rank",
                  {{"node", std::to_string(i)}, {"z", "[" + num(z.real()) + "," + num(z.imag()) + "]"}});
    const Eigen::MatrixXd J = jacobian_from_jets(dz, z);
    const double gap = (J - ff.W.at(i) * ff.Jp.at(i)).cwiseAbs().maxCoeff() /
                       std::max(1.0, J.cwiseAbs().maxCoeff());
    ff.reconstruction_residual = std::max(ff.reconstruction_residual, gap);
  }
  return ff;
}

PrincipalParts principal_coprincipal(const SurfaceMap& f, const BranchData& bd) {
  PrincipalParts pp;
  const cplx I(0.0, 1.0);
  pp.a_jet = f.components[0] + f.components[1] * I;
  pp.a = sample_jet(bd.grid, pp.a_jet);

  const int order = bd.d1p.order();
  const BiJet one = BiJet::constant(order, 1.0);
  const BiJet P = one + (bd.d1p + bd.d2p) * 0.5;
  const BiJet delta = bd.d1p - bd.d2p;
  const BiJet den = ((one + bd.d1p) * (one + bd.d2p.conj())).real_part();
  if (std::abs(den.coeff(0, 0)) <= kJetTol)
    throw Error(ErrorCode::DenominatorVanishing, "co-principal denominator vanishes at 0");
  const BiJet inv = jet_reciprocal(den);
  for (int h = 2; h < f.n; ++h)
    pp.b_jet.push_back((P * bd.d[h].conj() * 2.0 - delta.conj() * bd.d[h]) * inv);

  pp.b = GridField(bd.grid, f.n - 2);
  pp.min_denominator = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bd.grid->node_count(); ++i) {
    const cplx d1p = 2.0 * bd.d_grid.at(i, 0) - 1.0;
    const cplx d2p = 2.0 * I * bd.d_grid.at(i, 1) - 1.0;
    const cplx p = 1.0 + 0.5 * (d1p + d2p);
    const cplx dl = d1p - d2p;
    const double q = ((1.0 + d1p) * std::conj(1.0 + d2p)).real();
    pp.min_denominator = std::min(pp.min_denominator, q);
    if (q <= kFrameTolerance)
      throw Error(ErrorCode::DenominatorVanishing, "co-principal denominator vanishes on the grid",
                  {{"node", std::to_string(i)}, {"value", num(q)}});
    for (int h = 2; h < f.n; ++h) {
      const cplx dh = bd.d_grid.at(i, h);
      pp.b.at(i, h - 2) = (2.0 * p * std::conj(dh) - std::conj(dl) * dh) / q;
    }
  }
  return pp;
}

NormalFrame normal_frame(const FrontalFrame& ff, const PrincipalParts& pp) {
  const int n = ff.n;
  const int m = n - 2;
  const std::size_t count = ff.W.node_count();
  if (pp.b.node_count() != count)
    throw Error(ErrorCode::ShapeMismatch, "co-principal part and frame live on different grids");
  NormalFrame nf;
  nf.xi = MatrixField(ff.W.grid_ptr(), n, m, count);
  auto build = [&](const Eigen::MatrixXd& G, auto&& b_of) {
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, m);
    for (int k = 0; k < m; ++k) {
      const cplx b = b_of(k);
      v(0, k) = -b.real();
      v(1, k) = -b.imag();
      v(2 + k, k) = 1.0;
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
      throw Error(ErrorCode::MetricDegenerate, "ambient metric is not positive definite");
    return Eigen::MatrixXd(ldlt.solve(v));
  };
  for (std::size_t i = 0; i < count; ++i) {
    nf.xi.at(i) = build(ff.G.at(i), [&](int k) { return pp.b.at(i, k); });
    const Eigen::MatrixXd c = ff.W.at(i).transpose() * ff.G.at(i) * nf.xi.at(i);
    nf.orthogonality_residual = std::max(nf.orthogonality_residual, c.cwiseAbs().maxCoeff());
  }
  const Eigen::MatrixXd xi0 = build(ff.G0, [&](int k) { return pp.b_jet[k].coeff(0, 0); });
  nf.gram_at_origin = xi0.transpose() * ff.G0 * xi0;
  return nf;
}

Eigen::MatrixXd coprincipal_from_jacobian(const SurfaceMap& f, cplx z) {
  std::vector<BiJet> dz;
  for (const auto& c : f.components) dz.push_back(wirtinger_dz(c));
  const Eigen::MatrixXd J = jacobian_from_jets(dz, z);
  const Eigen::Matrix2d top = J.topRows(2);
  if (std::abs(top.determinant()) <= 1e-300)
    throw Error(ErrorCode::SingularNode, "principal Jacobian is singular");
  return J.bottomRows(f.n - 2) * top.inverse();
}

}  // namespace branchkit
