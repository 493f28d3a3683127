#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "branchkit/branch.hpp"
#include "branchkit/error.hpp"
#include "fixtures.hpp"
#include "test_support.hpp"

using namespace branchkit;
using namespace branchkit::testkit;

namespace {

constexpr int kOrder = 10;

// Re(c z^p) and Im(c z^p) as real-flagged jets.
BiJet re_pow(int p, cplx c = 1.0) {
  BiJet f(kOrder);
  f.add_to(p, 0, 0.5 * c);
  f.add_to(0, p, 0.5 * std::conj(c));
  f.set_real_flag(true);
  return f;
}

BiJet im_pow(int p, cplx c = 1.0) { return re_pow(p, cplx(0.0, -1.0) * c); }

SurfaceMap jet_map(int s, std::vector<BiJet> comps, double radius = 0.5) {
  SurfaceMap f;
  f.n = static_cast<int>(comps.size());
  f.s = s;
  f.components = std::move(comps);
  f.radius = radius;
  return f;
}

template <class F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidInput;
}

}  // namespace

TEST(Detect, CubicBranchPoint) {
  const SurfaceMap f = jet_map(2, {re_pow(3), im_pow(3), re_pow(4)});
  EXPECT_EQ(detect_branch_order(f), 2);
}

TEST(Detect, ImmersionIsNotABranchPoint) {
  BiJet zero(kOrder);
  zero.set_real_flag(true);
  const SurfaceMap f = jet_map(1, {re_pow(1), im_pow(1), zero});
  EXPECT_EQ(code_of([&] { detect_branch_order(f); }), ErrorCode::NotABranchPoint);
}

TEST(Detect, RotatedLeadingVectorReportsAngle) {
  const double alpha = 0.7;
  const cplx rot = std::polar(1.0, alpha);
  const SurfaceMap f = jet_map(1, {re_pow(2, rot), im_pow(2, rot), re_pow(3)});
  try {
    detect_branch_order(f);
    FAIL() << "expected AmbientFrameMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AmbientFrameMismatch);
    ASSERT_TRUE(e.detail().count("angle"));
    const double angle = std::stod(e.detail().at("angle"));
    EXPECT_NEAR(std::remainder(std::abs(angle) - alpha, 2 * M_PI), 0.0, 1e-10);
  }
}

TEST(Extract, NonRealLaplacianRejected) {
  // i |z|^4 has d^2/dz dzbar = 4i |z|^2, so l_3 = 4i.
  BiJet f3(kOrder);
  f3.set(2, 2, cplx(0.0, 1.0));
  const SurfaceMap f = jet_map(1, {re_pow(2), im_pow(2), f3});
  EXPECT_EQ(code_of([&] { extract_branch_data(f); }), ErrorCode::NonRealL);
}

TEST(Extract, QuasiBoundViolationRejected) {
  BuildOptions opts;
  opts.shrink = false;
  const SurfaceMap f = build_weierstrass_minimal(1, 1, 2.0, opts);
  EXPECT_EQ(code_of([&] { extract_branch_data(f); }), ErrorCode::QuasiBoundViolated);
}

TEST(Extract, PureBranchConditions) {
  for (int s = 1; s <= 3; ++s) {
    const SurfaceMap f = build_pure_branch(s);
    const BranchConditions c = scan_branch_conditions(f, f.radius);
    EXPECT_TRUE(c.ok());
    EXPECT_NEAR(c.min_frontal_det, 1.0, 1e-14);
    EXPECT_NEAR(c.sup_ratio, 0.0, 1e-14);
  }
}

TEST(Index, QuadraticWithCubicThirdComponent) {
  const SurfaceMap f = jet_map(1, {re_pow(2), im_pow(2), re_pow(3)});
  const BranchIndex idx = index_and_degree(f);
  EXPECT_EQ(idx.iota, ZOrder::finite(2));
  EXPECT_TRUE(idx.rho.limited());
}

TEST(Index, PureBranchIsTruncationLimited) {
  const SurfaceMap f = build_pure_branch(1);
  const BranchIndex idx = index_and_degree(f);
  EXPECT_TRUE(idx.iota.limited());
  EXPECT_TRUE(idx.rho.limited());
  EXPECT_EQ(check_estimate(idx, 1, 3).status, EstimateStatus::Inconclusive);
}

TEST(Distinguished, VanishesForPureBranch) {
  for (int s = 1; s <= 3; ++s) {
    const BranchData bd = extract_branch_data(build_pure_branch(s));
    const DistinguishedCoefficient w = distinguished_coefficient(bd);
    EXPECT_TRUE(w.jet.is_zero(1e-14));
    EXPECT_LE(w.sup, 1e-14);
    EXPECT_TRUE(w.leading_limited);
  }
}

TEST(Distinguished, WeierstrassModulusAndOrders) {
  // On these maps d'_2 = -d'_1 = g^2 = z^{2k}, so |varpi| = |z|^{2k}.
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) {
      const SurfaceMap f = build_weierstrass_minimal(s, k);
      const BranchData bd = extract_branch_data(f);
      const DistinguishedCoefficient w = distinguished_coefficient(bd);
      EXPECT_EQ(w.smoothness, 2 * k - 1);
      EXPECT_EQ(w.leading_zbar_order, 2 * k);
      EXPECT_FALSE(w.leading_limited);
      EXPECT_NEAR(std::abs(w.jet.coeff(0, 0)), 0.0, 1e-14);
      double err = 0.0;
      for (std::size_t i = 0; i < w.grid.node_count(); ++i) {
        const cplx z = w.grid.grid().node(i);
        err = std::max(err, std::abs(std::abs(w.grid.at(i, 0)) - std::pow(std::abs(z), 2 * k)));
      }
      EXPECT_LE(err, 1e-12) << "s=" << s << " k=" << k;
      EXPECT_NEAR(w.sup, std::pow(f.radius, 2 * k), 1e-12);
    }
}

TEST(Estimate, WeierstrassAttainsEquality) {
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) {
      const SurfaceMap f = build_weierstrass_minimal(s, k);
      const EstimateReport r = check_estimate(index_and_degree(f), s, 3);
      EXPECT_EQ(r.status, EstimateStatus::Equality);
      EXPECT_TRUE(r.inequality);
    }
}

TEST(Estimate, StrictInequalityInHigherCodimension) {
  // q_3 = z + z^2, q_4 = i z: p = 2 z^3 + z^4, so rho = 3 while iota - s = 1.
  const int s = 1;
  const SurfaceMap f = null_curve_map(s, {{0.0, 1.0, 1.0}, {0.0, cplx(0.0, 1.0)}}, 12);
  EXPECT_EQ(detect_branch_order(f), s);
  const BranchIndex idx = index_and_degree(f);
  EXPECT_EQ(idx.iota, ZOrder::finite(2));
  EXPECT_EQ(idx.rho, ZOrder::finite(3));
  const EstimateReport r = check_estimate(idx, s, 4);
  EXPECT_EQ(r.status, EstimateStatus::Holds);
  EXPECT_TRUE(r.inequality);
  EXPECT_FALSE(r.equality);
}

TEST(Estimate, ViolationIsReported) {
  BranchIndex idx;
  idx.iota = ZOrder::finite(4);
  idx.rho = ZOrder::finite(2);
  EXPECT_EQ(check_estimate(idx, 1, 3).status, EstimateStatus::Violated);
  EXPECT_EQ(check_estimate(idx, 1, 5).status, EstimateStatus::Violated);
  idx.rho = ZOrder::finite(7);
  EXPECT_EQ(check_estimate(idx, 1, 3).status, EstimateStatus::Violated);
  EXPECT_EQ(check_estimate(idx, 1, 5).status, EstimateStatus::Holds);
}

TEST(MeanCurvature, RejectsNonConformalMaps) {
  std::mt19937_64 rng(11);
  const SurfaceMap f = build_from_representation(random_representation(rng, 1, 3));
  const BranchData bd = extract_branch_data(f);
  EXPECT_GT(conformality_residual(f, bd).max_abs(), kConformalTolerance);
  EXPECT_EQ(code_of([&] { mean_curvature_extension(f, bd); }), ErrorCode::NotConformal);
}
