#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "branchkit/error.hpp"
#include "branchkit/geometry.hpp"
#include "branchkit/suites.hpp"
#include "fixtures.hpp"
#include "test_support.hpp"

using namespace branchkit;
using namespace branchkit::testkit;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::ShapeMismatch;
}

const SurfaceMap& weierstrass(int s, int k) {
  static std::map<std::pair<int, int>, SurfaceMap> cache;
  auto it = cache.find({s, k});
  if (it == cache.end()) it = cache.emplace(std::pair{s, k}, build_weierstrass_minimal(s, k)).first;
  return it->second;
}

std::vector<cplx> sample_points(double radius) {
  std::vector<cplx> pts;
  for (double f : {0.05, 0.2, 0.45, 0.8, 0.97})
    for (int a = 0; a < 7; ++a) pts.push_back(std::polar(f * radius, 0.3 + a * 2.0 * std::numbers::pi / 7));
  return pts;
}

SurfaceMap null_curve_4() { return null_curve_map(1, {{0.0, 1.0, 1.0}, {0.0, cplx(0.0, 1.0)}}, 12); }

}  // namespace

TEST(FrameAlgebra, IdentitiesOnRandomFields) {
  std::mt19937_64 rng(2024);
  const auto r = frame_algebra_residuals(rng, 200);
  EXPECT_EQ(r.size(), 16u);
  for (const auto& [item, v] : r) EXPECT_LE(v, 1e-12) << item;
}

TEST(FrameAlgebra, ErrorsOnBadShapes) {
  const GridPtr grid = DiskGrid::polar(1.0, 16, 16);
  const std::size_t m = grid->node_count();
  std::vector<Eigen::MatrixXd> mixed(m, Eigen::MatrixXd::Zero(3, 2));
  mixed[1] = Eigen::MatrixXd::Zero(2, 2);
  EXPECT_EQ(code_of([&] { MatrixField(grid, mixed); }), ErrorCode::ShapeMismatch);
  EXPECT_EQ(code_of([&] { MatrixField(grid, std::vector<Eigen::MatrixXd>(m + 1, Eigen::MatrixXd::Zero(2, 2))); }),
            ErrorCode::ShapeMismatch);
  const MatrixField U(grid, std::vector<Eigen::MatrixXd>(m, Eigen::MatrixXd::Ones(3, 2)));
  const MatrixField F(grid, std::vector<Eigen::MatrixXd>(m, Eigen::MatrixXd::Ones(3, 2)));
  EXPECT_EQ(code_of([&] { right_product(U, F); }), ErrorCode::ShapeMismatch);
  const MatrixField singular(grid, std::vector<Eigen::MatrixXd>(m, Eigen::MatrixXd::Ones(3, 3)));
  EXPECT_EQ(code_of([&] { frame_matrix(singular, U); }), ErrorCode::RankDeficient);
}

TEST(Frontal, PureBranchFrame) {
  for (int s = 1; s <= 3; ++s) {
    const SurfaceMap f = build_pure_branch(s, 4);
    const FrontalFrame ff = frontal_frame_from_branch(f, extract_branch_data(f));
    Eigen::MatrixXd e12 = Eigen::MatrixXd::Zero(4, 2);
    e12(0, 0) = e12(1, 1) = 1.0;
    for (std::size_t i = 0; i < ff.W.node_count(); ++i)
      ASSERT_LE((ff.W.at(i) - e12).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(ff.reconstruction_residual, kFrameTolerance);
  }
}

TEST(Frontal, DeterminantAndReconstruction) {
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) {
      const SurfaceMap& f = weierstrass(s, k);
      const FrontalFrame ff = frontal_frame_from_branch(f, extract_branch_data(f));
      EXPECT_LE(ff.reconstruction_residual, kFrameTolerance);
      double gap = 0.0;
      for (std::size_t i = 0; i < ff.Jp.node_count(); ++i) {
        const double r = std::abs(ff.lambda.grid().node(i));
        const double exact = (s + 1.0) * (s + 1.0) * std::pow(r, 2 * s);
        gap = std::max(gap, std::abs(ff.Jp.at(i).determinant() - exact) / std::max(1.0, exact));
        gap = std::max(gap, std::abs(ff.lambda.at(i).real() - exact) / std::max(1.0, exact));
      }
      EXPECT_LE(gap, 1e-13);
    }
}

TEST(Coprincipal, PureBranchVanishes) {
  const SurfaceMap f = build_pure_branch(2, 5);
  const PrincipalParts pp = principal_coprincipal(f, extract_branch_data(f));
  ASSERT_EQ(pp.b_jet.size(), 3u);
  for (const auto& b : pp.b_jet) EXPECT_TRUE(b.is_zero(1e-14));
  EXPECT_LE(pp.b.max_abs(), 1e-14);
}

TEST(Coprincipal, WeierstrassClosedForm) {
  // fhat_3 = Re(z^2) gives b = 2 zbar / (1 - |z|^2) against the frame (Id; B) W_top.
  const SurfaceMap& f = weierstrass(1, 1);
  const PrincipalParts pp = principal_coprincipal(f, extract_branch_data(f));
  double gap = 0.0;
  for (std::size_t i = 0; i < pp.b.node_count(); ++i) {
    const cplx z = pp.b.grid().node(i);
    gap = std::max(gap, std::abs(pp.b.at(i, 0) - 2.0 * std::conj(z) / (1.0 - std::norm(z))));
  }
  EXPECT_LE(gap, 1e-12);
}

TEST(Coprincipal, AgreesWithJacobianQuotient) {
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) {
      const SurfaceMap& f = weierstrass(s, k);
      const PrincipalParts pp = principal_coprincipal(f, extract_branch_data(f));
      double gap = 0.0;
      for (std::size_t i = 0; i < pp.b.node_count(); i += 37) {
        const Eigen::MatrixXd B = coprincipal_from_jacobian(f, pp.b.grid().node(i));
        gap = std::max(gap, std::abs(cplx(B(0, 0), B(0, 1)) - pp.b.at(i, 0)));
      }
      EXPECT_LE(gap, 1e-10) << "s=" << s << " k=" << k;
    }
}

TEST(Coprincipal, IndexOrderPattern) {
  // d conj(b)/dz = z^{iota-s-1} e below the threshold and z^s e from it on.
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) {
      const SurfaceMap& f = weierstrass(s, k);
      const PrincipalParts pp = principal_coprincipal(f, extract_branch_data(f));
      const int iota = s + k;
      const BiJet db = wirtinger_dz(pp.b_jet[0].conj());
      const ZOrder o = ord_z(db);
      if (iota < 2 * s + 1) {
        ASSERT_FALSE(o.limited()) << o.to_string();
        EXPECT_EQ(o.value(), iota - s - 1) << "s=" << s << " k=" << k;
      } else {
        EXPECT_NO_THROW(divide_z_pow(db, s)) << "s=" << s << " k=" << k;
      }
    }
}

TEST(NormalFrame, OrthogonalAndAnchored) {
  for (const SurfaceMap& f : {weierstrass(1, 2), weierstrass(2, 1), null_curve_4()}) {
    const BranchData bd = extract_branch_data(f);
    const FrontalFrame ff = frontal_frame_from_branch(f, bd);
    const NormalFrame nf = normal_frame(ff, principal_coprincipal(f, bd));
    EXPECT_LE(max_difference(gram(ff.W, nf.xi, ff.G),
                             MatrixField(ff.W.grid_ptr(), 2, f.n - 2, ff.W.node_count())),
              1e-10);
    EXPECT_LE(nf.orthogonality_residual, 1e-10);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(f.n - 2, f.n - 2);
    EXPECT_LE((nf.gram_at_origin - id).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(NormalFrame, PureBranchCanonicalNormals) {
  const SurfaceMap f = build_pure_branch(1, 4);
  const BranchData bd = extract_branch_data(f);
  const FrontalFrame ff = frontal_frame_from_branch(f, bd);
  const NormalFrame nf = normal_frame(ff, principal_coprincipal(f, bd));
  Eigen::MatrixXd e34 = Eigen::MatrixXd::Zero(4, 2);
  e34(2, 0) = e34(3, 1) = 1.0;
  for (std::size_t i = 0; i < nf.xi.node_count(); ++i) ASSERT_LE((nf.xi.at(i) - e34).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(NormalFrame, RoundAmbientOrigin) {
  BuildOptions opts;
  opts.radius = 0.5;
  const SurfaceMap f = build_sphere_patch(1, 2.0, true, opts);
  const BranchData bd = extract_branch_data(f);
  const FrontalFrame ff = frontal_frame_from_branch(f, bd);
  const NormalFrame nf = normal_frame(ff, principal_coprincipal(f, bd));
  // e^{-2 phi(0)} with phi = log(2 / (1 + |y|^2)) at y = 0.
  EXPECT_NEAR(nf.gram_at_origin(0, 0), 0.25, 1e-14);
  EXPECT_LE(max_difference(gram(ff.W, nf.xi, ff.G), MatrixField(ff.W.grid_ptr(), 2, 1, ff.W.node_count())),
            1e-10);
}

TEST(Forms, PureBranchIsFlat) {
  const SurfaceMap f = build_pure_branch(2, 4);
  const GeometryEvaluator ev(f, extract_branch_data(f));
  for (cplx z : sample_points(f.radius)) {
    const PointGeometry p = ev.at(z);
    for (const auto& m : p.II_V) EXPECT_LE(m.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(std::abs(p.sec), 1e-14);
    EXPECT_LE(p.H.norm(), 1e-14);
  }
  EXPECT_EQ(code_of([&] { ev.at(0.0); }), ErrorCode::SingularNode);
}

TEST(Forms, IdentitiesOnFixtures) {
  std::vector<SurfaceMap> maps;
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) maps.push_back(weierstrass(s, k));
  maps.push_back(null_curve_4());
  std::mt19937_64 rng(11);
  for (int s = 1; s <= 2; ++s) maps.push_back(build_from_representation(random_representation(rng, s, 3)));
  BuildOptions opts;
  opts.radius = 0.5;
  maps.push_back(build_sphere_patch(1, 2.0, false, opts));
  maps.push_back(build_sphere_patch(2, 2.0, true, opts));
  for (const SurfaceMap& f : maps) {
    const GeometryEvaluator ev(f, extract_branch_data(f));
    IdentityResiduals worst;
    for (cplx z : sample_points(f.radius)) worst.absorb(identity_residuals(ev.at(z), ev.map().metric.is_euclidean()));
    EXPECT_LE(worst.frame, kFrameTolerance) << f.label;
    EXPECT_LE(worst.first_form, 1e-8) << f.label;
    EXPECT_LE(worst.two_path, kRelationTolerance) << f.label;
    EXPECT_LE(worst.worst_relation(), kRelationTolerance) << f.label;
  }
}

TEST(Relative, LinearOverFunctions) {
  // eta = l xi_1 + xi_2 with a non-constant l; the dl term is normal to W and drops.
  const SurfaceMap f = null_curve_4();
  const GeometryEvaluator ev(f, extract_branch_data(f));
  auto ell = [](cplx z) { return 0.7 + z.real() - 2.0 * z.imag() * z.imag() + z.real() * z.imag(); };
  const double h = 5e-4;
  for (cplx z : sample_points(f.radius)) {
    const PointGeometry p = ev.at(z);
    std::array<Eigen::MatrixXd, 2> dxi;
    std::array<double, 2> dl{};
    for (int a = 0; a < 2; ++a) {
      const cplx e = a == 0 ? cplx(h, 0.0) : cplx(0.0, h);
      // Fourth-order central differences.
      dxi[a] = (8.0 * (ev.at(z + e).xi - ev.at(z - e).xi) - (ev.at(z + 2.0 * e).xi - ev.at(z - 2.0 * e).xi)) / (12.0 * h);
      dl[a] = (8.0 * (ell(z + e) - ell(z - e)) - (ell(z + 2.0 * e) - ell(z - 2.0 * e))) / (12.0 * h);
    }
    const double l = ell(z);
    const Eigen::VectorXd eta = l * p.xi.col(0) + p.xi.col(1);
    std::array<Eigen::VectorXd, 2> deta;
    for (int a = 0; a < 2; ++a) deta[a] = dl[a] * p.xi.col(0) + l * dxi[a].col(0) + dxi[a].col(1);
    const Eigen::Matrix2d II = ev.second_form(p, eta, deta);
    EXPECT_LE(relative_gap(II, l * p.II_V[0] + p.II_V[1]), 1e-9);
    const RelativeCurvature c1 = relative_curvature(p.Jp, p.I_W, p.II_V[0]);
    const RelativeCurvature c2 = relative_curvature(p.Jp, p.I_W, p.II_V[1]);
    const RelativeCurvature ce = relative_curvature(p.Jp, p.I_W, II);
    EXPECT_LE(relative_gap(ce.H, l * c1.H + c2.H), 1e-9);
    EXPECT_LE(relative_gap(ce.frakJ, l * c1.frakJ + c2.frakJ), 1e-9);
  }
}

TEST(Relative, EigenvaluesAndDeterminant) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    Eigen::Matrix2d Jp, A, S;
    Jp << g(rng), -g(rng), g(rng), g(rng);
    A << g(rng), g(rng), g(rng), g(rng);
    const Eigen::Matrix2d I_W = A.transpose() * A + Eigen::Matrix2d::Identity();
    S << g(rng), g(rng), 0.0, g(rng);
    S(1, 0) = S(0, 1);
    const RelativeCurvature c = relative_curvature(Jp, I_W, S);
    Eigen::Matrix2d adj;
    adj << Jp(1, 1), -Jp(0, 1), -Jp(1, 0), Jp(0, 0);
    const Eigen::Matrix2d P = -adj * c.frakJ;
    const cplx prod = c.principal[0] * c.principal[1];
    EXPECT_NEAR(prod.real(), P.determinant(), 1e-10 * std::max(1.0, std::abs(P.determinant())));
    EXPECT_NEAR(prod.imag(), 0.0, 1e-10 * std::max(1.0, std::abs(P.determinant())));
    EXPECT_NEAR((c.principal[0] + c.principal[1]).real(), P.trace(), 1e-10 * std::max(1.0, P.norm()));
    EXPECT_NEAR(c.K, (-I_W.inverse() * S).determinant(), 1e-12);
  }
}

TEST(Curvature, WeierstrassClosedForm) {
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) {
      const SurfaceMap& f = weierstrass(s, k);
      const GeometryEvaluator ev(f, extract_branch_data(f));
      std::vector<cplx> pts = sample_points(f.radius);
      for (int j = 3; j <= 9; ++j) pts.push_back(std::polar(f.radius / std::pow(2.0, j), 0.1 * j));
      for (cplx z : pts) {
        const PointGeometry p = ev.at(z);
        const double K = weierstrass_gauss(s, k, z);
        EXPECT_LE(relative_gap(p.sec, K), 1e-10) << "s=" << s << " k=" << k << " z=" << z;
        EXPECT_LE(p.H.norm(), 1e-9);
      }
    }
}

TEST(Curvature, GridFieldsAndBrioschi) {
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) {
      const SurfaceMap& f = weierstrass(s, k);
      const GeometryEvaluator ev(f, extract_branch_data(f));
      const GridPtr grid = DiskGrid::polar(f.radius, 24, 32);
      const CurvatureFields cf = curvature_fields(ev, grid);
      EXPECT_LE(cf.residuals.worst_relation(), kRelationTolerance);
      EXPECT_LE(cf.mean_curvature.max_abs(), 1e-6);
      EXPECT_LE(brioschi_gap(ev, grid, kBrioschiInnerFraction * f.radius), kBrioschiTolerance);
      double gap = 0.0;
      for (std::size_t i = 0; i < grid->node_count(); ++i)
        gap = std::max(gap, relative_gap(cf.sec.at(i).real(), weierstrass_gauss(s, k, grid->node(i))));
      EXPECT_LE(gap, 1e-10);
    }
}

TEST(Curvature, SpherePatchMeanCurvature) {
  const double rho = 2.0;
  const Eigen::Vector3d centre(0.0, 0.0, rho);
  BuildOptions opts;
  opts.radius = 0.5;
  for (bool round : {false, true}) {
    const SurfaceMap f = build_sphere_patch(1, rho, round, opts);
    const GeometryEvaluator ev(f, extract_branch_data(f));
    double gap = 0.0;
    for (cplx z : sample_points(f.radius)) {
      const PointGeometry p = ev.at(z);
      const Eigen::Vector3d y = p.y;
      const Eigen::Vector3d exact =
          round ? Eigen::Vector3d(-(1.0 + y.squaredNorm()) / (4.0 * rho * rho) * (y - centre))
                : Eigen::Vector3d((centre - y) / (rho * rho));
      gap = std::max(gap, (p.H - exact).cwiseAbs().maxCoeff());
    }
    EXPECT_LE(gap, 1e-6) << (round ? "round" : "flat");
    EXPECT_LE(brioschi_gap(ev, DiskGrid::polar(f.radius, 16, 16), kBrioschiInnerFraction * f.radius),
              kBrioschiTolerance);
  }
}

TEST(Classify, WeierstrassFixtures) {
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) {
      const CurvatureReport rep = classify_branch_curvature(weierstrass(s, k));
      const bool divergent = s + k < 2 * s + 1;
      EXPECT_EQ(rep.predicted, divergent ? CurvatureClass::Divergent : CurvatureClass::BoundedLipschitz);
      EXPECT_TRUE(rep.agree) << "s=" << s << " k=" << k << " " << curvature_class_name(rep.empirical);
      EXPECT_EQ(rep.sec_sign, -1);
      EXPECT_EQ(rep.annuli.size(), static_cast<std::size_t>(kAnnulusLast - kAnnulusFirst + 1));
      if (divergent) {
        EXPECT_GE(rep.min_growth, kDivergenceGrowth);
        // |Sec| ~ |z|^{2(iota - 2s - 1)}.
        EXPECT_NEAR(rep.growth_exponent, 2.0 * (2 * s + 1 - s - k), 0.05);
        EXPECT_FALSE(rep.origin.has_value());
      } else {
        EXPECT_LE(rep.lipschitz_variation, kLipschitzVariation);
        ASSERT_TRUE(rep.origin.has_value());
        EXPECT_NEAR(rep.origin->sec, weierstrass_gauss(s, k, 1e-300), 1e-12);
        EXPECT_NEAR(rep.annuli.back().mean, rep.origin->sec, 1e-3);
      }
      EXPECT_LE(rep.max_mean_curvature, 1e-6);
      EXPECT_LE(rep.brioschi_gap, kBrioschiTolerance);
      ASSERT_EQ(rep.mean_curvature_origin.size(), 3);
      EXPECT_LE(rep.mean_curvature_origin.norm(), 1e-6);
    }
}

TEST(Classify, PureBranchIsBounded) {
  const CurvatureReport rep = classify_branch_curvature(build_pure_branch(1));
  EXPECT_EQ(rep.predicted, CurvatureClass::BoundedLipschitz);
  EXPECT_EQ(rep.empirical, CurvatureClass::BoundedLipschitz);
  EXPECT_EQ(rep.sec_sign, 0);
  EXPECT_LE(rep.fields.sec.max_abs(), 1e-14);
  ASSERT_TRUE(rep.origin.has_value());
  EXPECT_EQ(rep.origin->sec, 0.0);
}

TEST(Invariance, RotatedRebuildsTransformCoprincipal) {
  // f = M f' with M = diag(D, G) gives B = G B' D^t.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (const SurfaceMap& f : {weierstrass(1, 2), weierstrass(2, 1), null_curve_4()}) {
    for (int t = 0; t < 5; ++t) {
      const Eigen::MatrixXd M = block_rotation(rng, f.n, angle(rng));
      const SurfaceMap g = ambient_rotate(f, M);
      const Eigen::MatrixXd D = M.topLeftCorner(2, 2), G = M.bottomRightCorner(f.n - 2, f.n - 2);
      for (cplx z : sample_points(f.radius)) {
        const Eigen::MatrixXd B = coprincipal_from_jacobian(f, z);
        const Eigen::MatrixXd Bg = coprincipal_from_jacobian(g, z);
        EXPECT_LE(relative_gap(Bg, G * B * D.transpose()), 1e-8);
      }
    }
  }
}
