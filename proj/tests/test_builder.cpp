#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "branchkit/branch.hpp"
#include "branchkit/error.hpp"
#include "fixtures.hpp"
#include "test_support.hpp"

using namespace branchkit;
using namespace branchkit::testkit;

TEST(Representation, ZeroDataGivesPureBranch) {
  for (int s = 1; s <= 3; ++s) {
    RepresentationData data;
    data.s = s;
    for (int h = 0; h < 3; ++h) {
      data.phi.push_back(BiJet(2 * s + 4));
      data.F.push_back({});
    }
    const SurfaceMap f = build_from_representation(data);
    const SurfaceMap pure = build_pure_branch(s);
    for (int h = 0; h < 3; ++h)
      EXPECT_EQ(coeff_distance(f.components[h], pure.components[h]), 0.0);
    EXPECT_DOUBLE_EQ(pure.components[0].coeff(s + 1, 0).real(), 0.5);
    EXPECT_DOUBLE_EQ(pure.components[1].coeff(s + 1, 0).imag(), -0.5);
  }
}

TEST(Representation, ConstraintViolationNamesComponent) {
  std::mt19937_64 rng(3);
  RepresentationData data = random_representation(rng, 1, 3);
  data.F[2][0] += 0.1;
  try {
    build_from_representation(data);
    FAIL() << "expected ConstraintViolated";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConstraintViolated);
    EXPECT_EQ(e.detail().at("components"), "[2]");
  }
  data = random_representation(rng, 1, 3);
  data.phi[0].set(0, 0, 0.5);
  EXPECT_THROW(build_from_representation(data), Error);
}

TEST(Representation, DerivativeFormulaOnJets) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int s = 1 + trial % 2;
    const RepresentationData data = random_representation(rng, s, 3 + trial % 3);
    const SurfaceMap f = build_from_representation(data);
    const int N = f.jet_order();
    for (int h = 0; h < f.n; ++h) {
      const BiJet got = wirtinger_dz(f.components[h]);
      EXPECT_LE(coeff_distance(got, representation_dz(data, h, N - 1)), 1e-10) << "trial " << trial;
    }
    const BranchData bd = extract_branch_data(f);
    EXPECT_NEAR(std::abs(bd.d[0].coeff(0, 0) - 0.5), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(bd.d[1].coeff(0, 0) - cplx(0.0, -0.5)), 0.0, 1e-12);
    for (int h = 2; h < f.n; ++h) EXPECT_NEAR(std::abs(bd.d[h].coeff(0, 0)), 0.0, 1e-12);
  }
}

TEST(Representation, MixedDerivativeMatchesPolyharmonic) {
  std::mt19937_64 rng(5);
  for (int s = 1; s <= 2; ++s) {
    const RepresentationData data = random_representation(rng, s, 3);
    const SurfaceMap f = build_from_representation(data);
    for (int h = 0; h < 3; ++h) {
      // Laplace^{s+1} phi / 4^{s+1} = d^{2s+2} phi / dz^{s+1} dzbar^{s+1}.
      const BiJet rhs = mul_monomial(wirtinger_d(data.phi[h], s + 1, s + 1), s, s);
      const BiJet lhs = wirtinger_d(f.components[h], 1, 1);
      EXPECT_LE(coeff_distance(lhs.truncated(rhs.order()), rhs), 1e-10);
    }
    // The same identity with finite differences on a Cartesian grid, away from the
    // one-sided boundary stencils.
    const auto grid = DiskGrid::cartesian(f.radius, 128);
    const GridField fd = dz_grid(dzbar_grid(
        sample(grid, 3, [&](cplx z, int c) { return f.components[c].eval(z); })));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < fd.node_count(); ++i) {
      const cplx z = fd.grid().node(i);
      if (std::abs(z) > 0.9 * f.radius) continue;
      for (int h = 0; h < 3; ++h) {
        const cplx exact = std::pow(std::norm(z), s) *
                           wirtinger_d(data.phi[h], s + 1, s + 1).eval(z);
        num = std::max(num, std::abs(fd.at(i, h) - exact));
        den = std::max(den, std::abs(exact));
      }
    }
    EXPECT_LE(num / den, 1e-6) << "s=" << s;
  }
}

TEST(Representation, NumericPathAgreesWithJets) {
  for (int s = 1; s <= 2; ++s) {
    const auto grid = DiskGrid::polar(1.0, 128, 128);
    std::vector<GridField> l;
    for (int h = 0; h < 3; ++h)
      l.push_back(sample(grid, 1, [h](cplx z, int) {
        const double x = z.real(), y = z.imag();
        return cplx(0.3 * (h + 1) * std::cos(x) + 0.2 * x * y + 0.1 * h * y * y, 0.0);
      }));
    const RepresentationData data =
        representation_from_laplacian(l, s, {{0.0, 0.1}, {0.0, 0.05}, {0.0, 0.2, 0.1}});
    for (double defect : data.constraint_defects()) EXPECT_LE(defect, 1e-12);
    const SurfaceMap f = build_from_representation(data);
    EXPECT_TRUE(f.has_samples());
    EXPECT_LE(f.sample_mismatch(), kSampleTolerance) << "s=" << s;
    EXPECT_EQ(detect_branch_order(f), s);
  }
}

TEST(Representation, RoundTripsThroughBranchConditions) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const SurfaceMap f = build_from_representation(random_representation(rng, 1 + trial % 2, 3, 0.5));
    EXPECT_TRUE(scan_branch_conditions(f, f.radius).ok());
    EXPECT_LE(f.sample_mismatch(), kSampleTolerance);
  }
}

TEST(Builder, RejectsWhenHalvingDoesNotHelp) {
  try {
    build_weierstrass_minimal(1, 1, 1e4);
    FAIL() << "expected BuildRejected";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BuildRejected);
  }
}

TEST(Weierstrass, LeadingDataAndIndex) {
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) {
      const SurfaceMap f = build_weierstrass_minimal(s, k);
      EXPECT_EQ(detect_branch_order(f), s);
      const BranchData bd = extract_branch_data(f);
      EXPECT_NEAR(std::abs(bd.d[0].coeff(0, 0) - 0.5), 0.0, 1e-14);
      EXPECT_NEAR(std::abs(bd.d[1].coeff(0, 0) - cplx(0.0, -0.5)), 0.0, 1e-14);
      // d_3 = g = z^k exactly.
      EXPECT_LE(coeff_distance(bd.d[2], BiJet::monomial(bd.d[2].order(), k, 0)), 1e-14);
      const BranchIndex idx = index_and_degree(f);
      EXPECT_EQ(idx.iota, ZOrder::finite(s + k));
      EXPECT_EQ(idx.rho, ZOrder::finite(2 * k));
      EXPECT_LE(f.sample_mismatch(), 1e-12);
    }
}

TEST(Weierstrass, ConformalAndMinimal) {
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) {
      const SurfaceMap f = build_weierstrass_minimal(s, k);
      // Conformality as jets: d^t d = 0.
      BiJet dd(f.jet_order() - s - 1);
      const BranchData bd = extract_branch_data(f);
      for (const auto& d : bd.d) dd += d * d;
      EXPECT_TRUE(dd.is_zero(1e-13));
      EXPECT_LE(conformality_residual(f, bd).max_abs(), 1e-12);
      const MeanCurvatureExtension H = mean_curvature_extension(f, bd);
      EXPECT_LE(H.H.max_abs(), 1e-6);
      EXPECT_LE(H.at_origin.norm(), 1e-6);
    }
}

TEST(SpherePatch, ClosedFormMeanCurvature) {
  const double rho = 1.0;
  const Eigen::Vector3d centre(0.0, 0.0, rho);
  for (int s = 1; s <= 2; ++s)
    for (bool round : {false, true}) {
      BuildOptions opts;
      opts.radius = 0.5;
      const SurfaceMap f = build_sphere_patch(s, rho, round, opts);
      EXPECT_LE(f.sample_mismatch(), kSampleTolerance);
      const BranchData bd = extract_branch_data(f);
      const MeanCurvatureExtension H = mean_curvature_extension(f, bd);
      double err = 0.0;
      for (std::size_t i = 0; i < bd.grid->node_count(); ++i) {
        const Eigen::Vector3d y = f.eval(bd.grid->node(i));
        // Flat: (c - y)/rho^2. Round metric: e^{-2phi}(H - grad(phi)^normal), which
        // on this sphere reduces to -(1 + |y|^2)(y - c)/(4 rho^2).
        const Eigen::Vector3d exact =
            round ? Eigen::Vector3d(-(1.0 + y.squaredNorm()) / (4.0 * rho * rho) * (y - centre))
                  : Eigen::Vector3d((centre - y) / (rho * rho));
        for (int j = 0; j < 3; ++j) err = std::max(err, std::abs(H.H.at(i, j).real() - exact(j)));
      }
      EXPECT_LE(err, 1e-4) << "s=" << s << " round=" << round;
      const double den0 = round ? 2.0 : 0.5;  // (g11(0) + g22(0)) / 4
      EXPECT_NEAR(H.denominator_origin, den0, 1e-14);
      EXPECT_NEAR(H.at_origin(2), round ? 0.25 / rho : 1.0 / rho, 1e-12);
    }
}

TEST(Transforms, IdentityLeavesMapUnchanged) {
  const SurfaceMap f = build_weierstrass_minimal(1, 2);
  const SurfaceMap g = reparametrize(f, BiJet::monomial(f.jet_order(), 1, 0));
  const SurfaceMap r = ambient_rotate(f, Eigen::MatrixXd::Identity(3, 3));
  for (int h = 0; h < 3; ++h) {
    EXPECT_LE(coeff_distance(g.components[h], f.components[h]), 1e-15);
    EXPECT_LE(coeff_distance(r.components[h], f.components[h]), 0.0);
  }
}

TEST(Transforms, RejectsDegenerateGerms) {
  const SurfaceMap f = build_pure_branch(1);
  const int N = f.jet_order();
  EXPECT_THROW(reparametrize(f, BiJet::monomial(N, 2, 0)), Error);
  EXPECT_THROW(reparametrize(f, BiJet::monomial(N, 0, 1)), Error);
  try {
    reparametrize(f, BiJet::monomial(N, 1, 1));
    FAIL() << "expected NotDiffeoGerm";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotDiffeoGerm);
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(3, 3);
  M(0, 2) = 1.0;
  EXPECT_THROW(ambient_rotate(f, M), Error);
}

TEST(Transforms, InvarianceOfIndexAndDegree) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) {
      const SurfaceMap f = build_weierstrass_minimal(s, k);
      const BranchIndex base = index_and_degree(f);
      const double alpha = angle(rng);
      const SurfaceMap g = ambient_rotate(
          reparametrize(f, branch_preserving_germ(rng, s, f.jet_order(), alpha)),
          block_rotation(rng, 3, alpha));
      const BranchIndex moved = index_and_degree(g);
      EXPECT_EQ(moved.iota, base.iota);
      EXPECT_EQ(moved.rho, base.rho);
    }
}
