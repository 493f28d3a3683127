#include "branchkit/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "branchkit/error.hpp"
#include "branchkit/geometry.hpp"
#include "branchkit/normalize.hpp"

namespace branchkit {

namespace {

using Eigen::MatrixXd;

class Table {
 public:
  explicit Table(SuiteResult& r) : r_(r) {}
  // Passes when value <= tolerance; NaN fails.
  void bound(const std::string& name, double value, double tolerance) {
    r_.checks.push_back({name, value, tolerance, value <= tolerance});
  }
  void at_least(const std::string& name, double value, double lower) {
    r_.checks.push_back({name, value, lower, value >= lower});
  }
  void count(const std::string& name, int violations) { bound(name, violations, 0.0); }

 private:
  SuiteResult& r_;
};

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double jet_distance(const BiJet& a, const BiJet& b) {
  double m = 0.0;
  const int n = std::max(a.order(), b.order());
  for (int d = 0; d <= n; ++d)
    for (int k = 0; k <= d; ++k) m = std::max(m, std::abs(a.coeff(d - k, k) - b.coeff(d - k, k)));
  return m;
}

BiJet random_int_jet(std::mt19937_64& rng, int order) {
  std::uniform_int_distribution<int> coef(-3, 3);
  BiJet f(order);
  for (int d = 0; d <= order; ++d)
    for (int k = 0; k <= d; ++k) f.set(d - k, k, cplx(coef(rng), coef(rng)));
  return f;
}

// Random real phi_h of degree 2s+4 and cubic F_h with the origin constraint enforced.
RepresentationData random_representation(std::mt19937_64& rng, int s, int n) {
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  RepresentationData data;
  data.s = s;
  const int deg = 2 * s + 4;
  const double sign = (s % 2 == 0) ? 1.0 : -1.0;
  for (int h = 0; h < n; ++h) {
    BiJet phi(deg);
    for (int d = 1; d <= deg; ++d)
      for (int k = 0; k <= d; ++k) phi.set(d - k, k, cplx(u(rng), u(rng)));
    phi = phi.real_part();
    phi.set_real_flag(true);
    std::vector<cplx> F(4);
    for (auto& c : F) c = cplx(u(rng), u(rng));
    F[0] = -sign * factorial(s) * factorial(s + 1) * phi.coeff(s + 1, 0);
    data.phi.push_back(phi);
    data.F.push_back(F);
  }
  return data;
}

// dfhat_h/dz read off the representation: z^s times the derivative sum plus F_h,
// with the leading term for the first two components.
BiJet representation_dz(const RepresentationData& data, int h, int order) {
  const int s = data.s;
  const BiJet phi = data.phi[h].padded(order + 1);
  BiJet inner(order);
  for (int j = 0; j <= s; ++j) {
    const double sign = ((s - j) % 2 == 0) ? 1.0 : -1.0;
    inner += mul_monomial(wirtinger_d(phi, s + 1, j), 0, j, sign * factorial(s) / factorial(j))
                 .truncated(order);
  }
  for (std::size_t m = 0; m < data.F[h].size(); ++m)
    if (static_cast<int>(m) <= order) inner.add_to(static_cast<int>(m), 0, data.F[h][m]);
  BiJet out = mul_monomial(inner, s, 0).truncated(order);
  if (h == 0) out.add_to(s, 0, 0.5 * (s + 1));
  if (h == 1) out.add_to(s, 0, cplx(0.0, -0.5 * (s + 1)));
  return out;
}

MatrixXd gaussian(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> g;
  MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

MatrixXd orthogonal(std::mt19937_64& rng, int n) {
  Eigen::HouseholderQR<MatrixXd> qr(gaussian(rng, n, n));
  return qr.householderQ();
}

// Singular values in [0.5, 2].
MatrixXd well_conditioned(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Eigen::VectorXd sv(n);
  for (int i = 0; i < n; ++i) sv(i) = u(rng);
  return orthogonal(rng, n) * sv.asDiagonal() * orthogonal(rng, n);
}

MatrixXd block_rotation(std::mt19937_64& rng, int n, double alpha) {
  MatrixXd M = MatrixXd::Zero(n, n);
  M(0, 0) = std::cos(alpha);
  M(0, 1) = -std::sin(alpha);
  M(1, 0) = std::sin(alpha);
  M(1, 1) = std::cos(alpha);
  M.bottomRightCorner(n - 2, n - 2) = orthogonal(rng, n - 2);
  return M;
}

// h(z) = omega z (1 + c1 z + c2 z^2 + c3 zbar^{s+1}) with omega^{s+1} = e^{-i alpha}.
BiJet branch_preserving_germ(std::mt19937_64& rng, int s, int order, double alpha) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  const cplx omega = std::polar(1.0, -alpha / (s + 1));
  BiJet h(order);
  h.set(1, 0, omega);
  h.add_to(2, 0, omega * cplx(u(rng), u(rng)));
  h.add_to(3, 0, omega * cplx(u(rng), u(rng)));
  if (s + 2 <= order) h.add_to(1, s + 1, omega * cplx(u(rng), u(rng)));
  return h;
}

template <class Gen>
MatrixField make_field(const GridPtr& grid, Gen&& gen) {
  std::vector<MatrixXd> v;
  for (std::size_t i = 0; i < grid->node_count(); ++i) v.push_back(gen());
  return MatrixField(grid, std::move(v));
}

template <class Op>
MatrixField map_field(const MatrixField& a, Op&& op) {
  std::vector<MatrixXd> v;
  for (std::size_t i = 0; i < a.node_count(); ++i) v.push_back(op(i));
  return MatrixField(a.grid_ptr(), std::move(v));
}

int rank_of(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m);
  svd.setThreshold(1e-10);
  return static_cast<int>(svd.rank());
}

bool orthonormal_columns(const MatrixXd& g) {
  return (g - MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() <= 1e-10;
}

std::vector<std::pair<int, int>> weierstrass_params() {
  std::vector<std::pair<int, int>> out;
  for (int s = 1; s <= 2; ++s)
    for (int k = 1; k <= 3; ++k) out.emplace_back(s, k);
  return out;
}

std::string tag(int s, int k) { return "s" + std::to_string(s) + "k" + std::to_string(k); }

void zorder_suite(Table& t, std::mt19937_64& rng) {
  const int n = 8;
  // Order exactly a with a unit factor.
  auto with_order = [&](int a) {
    BiJet u = random_int_jet(rng, n);
    u.set(0, 0, cplx(1.0 + static_cast<double>(rng() % 3), 0.0));
    return mul_monomial(u, a, 0).truncated(n);
  };
  const BiJet zbar = BiJet::monomial(n, 0, 1);
  int unit = 0, sum_min = 0, sum_exact = 0, product = 0, tuple = 0, zbar_factor = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int a = static_cast<int>(rng() % 5), b = static_cast<int>(rng() % 5);
    const BiJet f = with_order(a), g = with_order(b);
    BiJet e = random_int_jet(rng, n);
    e.set(0, 0, 5.0);
    unit += !(ord_z(e * f) == ord_z(f));
    const ZOrder lo = std::min(ord_z(f), ord_z(g));
    sum_min += ord_z(f + g) < lo;
    if (a != b) sum_exact += !(ord_z(f + g) == lo);
    const ZOrder p = ord_z(f * g);
    product += a + b <= n ? !(p == ZOrder::finite(a + b)) : !p.limited();
    tuple += !(ord_z(std::vector<BiJet>{f, g}) == lo);
    zbar_factor += !ord_z(zbar * f).limited();
  }
  t.count("unit_factor_keeps_order", unit);
  t.count("sum_at_least_min", sum_min);
  t.count("sum_equals_smaller_order", sum_exact);
  t.count("product_adds_orders", product);
  t.count("tuple_takes_min", tuple);
  t.count("zbar_factor_infinite_order", zbar_factor);

  double divide = 0.0, ratio = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int p = static_cast<int>(rng() % 4);
    const BiJet g = random_int_jet(rng, 6);
    divide = std::max(divide, jet_distance(divide_z_pow(mul_monomial(g, p, 0), p), g));
    const int s = 1 + static_cast<int>(rng() % 3);
    ratio = std::max(ratio, jet_distance(conj_ratio_extend(mul_monomial(g, s, 0), s), mul_monomial(g, 0, s)));
  }
  t.bound("divide_z_pow_round_trip", divide, 0.0);
  t.bound("conj_ratio_extend_round_trip", ratio, 0.0);
  int missed = 0;
  try {
    conj_ratio_extend(BiJet::constant(4, 1.0), 1);
    missed = 1;
  } catch (const Error& err) {
    missed = err.code() == ErrorCode::NonExtendable ? 0 : 1;
  }
  t.count("nonzero_value_not_extendable", missed);
}

void representation_suite(Table& t, std::mt19937_64& rng) {
  double formula = 0.0, mixed = 0.0, origin = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int s = 1 + trial % 2;
    const RepresentationData data = random_representation(rng, s, 3 + trial % 3);
    const SurfaceMap f = build_from_representation(data);
    const int N = f.jet_order();
    for (int h = 0; h < f.n; ++h) {
      formula = std::max(formula, jet_distance(wirtinger_dz(f.components[h]), representation_dz(data, h, N - 1)));
      const BiJet rhs = mul_monomial(wirtinger_d(data.phi[h], s + 1, s + 1), s, s);
      mixed = std::max(mixed, jet_distance(wirtinger_d(f.components[h], 1, 1).truncated(rhs.order()), rhs));
    }
    const BranchData bd = extract_branch_data(f);
    origin = std::max(origin, std::abs(bd.d[0].coeff(0, 0) - 0.5));
    origin = std::max(origin, std::abs(bd.d[1].coeff(0, 0) - cplx(0.0, -0.5)));
    for (int h = 2; h < f.n; ++h) origin = std::max(origin, std::abs(bd.d[h].coeff(0, 0)));
  }
  t.bound("derivative_formula_on_jets", formula, 1e-10);
  t.bound("mixed_derivative_polyharmonic", mixed, 1e-10);
  t.bound("leading_vector_at_origin", origin, 1e-10);
}

void branch_suite(Table& t) {
  for (auto [s, k] : weierstrass_params()) {
    const SurfaceMap f = build_weierstrass_minimal(s, k);
    t.count("detect_order_" + tag(s, k), detect_branch_order(f) != s);
    const BranchData bd = extract_branch_data(f);
    const double origin = std::max(std::abs(bd.d[0].coeff(0, 0) - 0.5),
                                   std::max(std::abs(bd.d[1].coeff(0, 0) - cplx(0.0, -0.5)),
                                            std::abs(bd.d[2].coeff(0, 0))));
    t.bound("leading_vector_" + tag(s, k), origin, 1e-10);
    const DistinguishedCoefficient w = distinguished_coefficient(bd);
    t.count("varpi_leading_order_" + tag(s, k), w.leading_limited || w.leading_zbar_order != 2 * k);
  }
  for (int s = 1; s <= 3; ++s)
    t.count("detect_pure_branch_s" + std::to_string(s), detect_branch_order(build_pure_branch(s)) != s);
}

void invariance_suite(Table& t, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  int changed = 0;
  const auto params = weierstrass_params();
  for (int trial = 0; trial < 20; ++trial) {
    const auto [s, k] = params[trial % params.size()];
    const SurfaceMap f = build_weierstrass_minimal(s, k);
    const BranchIndex base = index_and_degree(f);
    const double alpha = angle(rng);
    const SurfaceMap g = ambient_rotate(reparametrize(f, branch_preserving_germ(rng, s, f.jet_order(), alpha)),
                                        block_rotation(rng, 3, alpha));
    const BranchIndex moved = index_and_degree(g);
    changed += !(moved.iota == base.iota) || !(moved.rho == base.rho);
  }
  t.count("index_and_degree_preserved", changed);
}

void estimate_suite(Table& t) {
  for (auto [s, k] : weierstrass_params()) {
    const EstimateReport r = check_estimate(index_and_degree(build_weierstrass_minimal(s, k)), s, 3);
    t.count("equality_" + tag(s, k), r.status != EstimateStatus::Equality);
  }
}

void normalize_suite(Table& t) {
  for (auto [s, k] : weierstrass_params()) {
    const SurfaceMap f = build_weierstrass_minimal(s, k);
    const BranchData bd = extract_branch_data(f);
    const Diffeo d = build_normalizing_diffeo(f, bd);
    t.bound("composition_" + tag(s, k), d.composition_residual, kDiffeoTolerance);
    t.bound("beltrami_" + tag(s, k), beltrami_residual(d, distinguished_coefficient(bd).grid).max_abs(), 1e-6);
    t.at_least("c0_modulus_" + tag(s, k), std::abs(d.c0_at_origin()), 0.5);
    for (const NormalizedComponent& b : normalized_components(f, d)) {
      t.bound("b_at_origin_" + tag(s, k), std::abs(b.jet.coeff(0, 0)), 1e-14);
      t.bound("b_reconstruction_" + tag(s, k), b.reconstruction_residual, 1e-6);
    }
  }
}

void frontal_suite(Table& t, std::mt19937_64& rng) {
  for (const auto& [item, v] : frame_algebra_residuals(rng, 40)) t.bound(item, v, 1e-12);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double gap = 0.0;
  for (auto [s, k] : weierstrass_params()) {
    const SurfaceMap f = build_weierstrass_minimal(s, k);
    for (int trial = 0; trial < 3; ++trial) {
      const MatrixXd M = block_rotation(rng, f.n, angle(rng));
      const SurfaceMap g = ambient_rotate(f, M);
      const MatrixXd D = M.topLeftCorner(2, 2), G = M.bottomRightCorner(f.n - 2, f.n - 2);
      for (int a = 0; a < 8; ++a) {
        const cplx z = std::polar(f.radius * (0.1 + 0.1 * a), 0.7 * a);
        gap = std::max(gap, relative_gap(coprincipal_from_jacobian(g, z),
                                         G * coprincipal_from_jacobian(f, z) * D.transpose()));
      }
    }
  }
  t.bound("rotated_coprincipal_relation", gap, 1e-8);
}

void curvature_suite(Table& t) {
  for (auto [s, k] : weierstrass_params()) {
    const CurvatureReport rep = classify_branch_curvature(build_weierstrass_minimal(s, k));
    t.bound("relations_" + tag(s, k), rep.fields.residuals.worst_relation(), kRelationTolerance);
    t.bound("brioschi_" + tag(s, k), rep.brioschi_gap, kBrioschiTolerance);
    t.bound("mean_curvature_" + tag(s, k), rep.max_mean_curvature, 1e-6);
    t.count("class_agreement_" + tag(s, k), !rep.agree);
    if (rep.predicted == CurvatureClass::Divergent)
      t.at_least("growth_" + tag(s, k), rep.min_growth, kDivergenceGrowth);
    else
      t.bound("lipschitz_variation_" + tag(s, k), rep.lipschitz_variation, kLipschitzVariation);
  }
  const CurvatureReport pure = classify_branch_curvature(build_pure_branch(1));
  t.bound("pure_branch_sec", pure.fields.sec.max_abs(), 1e-14);
}

using SuiteFn = std::function<void(Table&, std::mt19937_64&)>;

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r = {
      {"zorder", zorder_suite},
      {"representation", representation_suite},
      {"branch", [](Table& t, std::mt19937_64&) { branch_suite(t); }},
      {"invariance", invariance_suite},
      {"estimate", [](Table& t, std::mt19937_64&) { estimate_suite(t); }},
      {"normalize", [](Table& t, std::mt19937_64&) { normalize_suite(t); }},
      {"frontal", frontal_suite},
      {"curvature", [](Table& t, std::mt19937_64&) { curvature_suite(t); }},
  };
  return r;
}

}  // namespace

bool SuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.pass; });
}

std::string SuiteResult::table() const {
  std::ostringstream os;
  os.precision(17);
  os << "suite,seed,check,value,tolerance,status\n";
  for (const SuiteCheck& c : checks)
    os << suite << ',' << seed << ',' << c.name << ',' << c.value << ',' << c.tolerance << ','
       << (c.pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : registry()) v.push_back(name);
    return v;
  }();
  return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  for (const auto& [n, fn] : registry()) {
    if (n != name) continue;
    SuiteResult r;
    r.suite = name;
    r.seed = seed;
    std::mt19937_64 rng(seed);
    Table t(r);
    fn(t, rng);
    return r;
  }
  throw Error(ErrorCode::InvalidInput, "unknown suite '" + name + "'");
}

std::map<std::string, double> frame_algebra_residuals(std::mt19937_64& rng, int trials) {
  const GridPtr grid = DiskGrid::polar(1.0, 16, 16);
  const std::size_t m = grid->node_count();
  std::uniform_int_distribution<int> dim(2, 6), small(1, 4);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  std::map<std::string, double> r;
  auto note = [&](const std::string& item, double v) { r[item] = std::max(r[item], v); };
  auto tally = [&](const std::string& item, bool ok) { r[item] += ok ? 0.0 : 1.0; };
  auto field = [&](auto gen) { return make_field(grid, gen); };

  for (int t = 0; t < trials; ++t) {
    const int n = dim(rng);
    const int k = std::uniform_int_distribution<int>(1, n)(rng);
    const int s = small(rng), h = small(rng);
    const MatrixField E = field([&] { return well_conditioned(rng, n); });
    const MatrixField U = field([&] { return gaussian(rng, n, k); });
    const MatrixField V = field([&] { return gaussian(rng, n, k); });
    const MatrixField F = field([&] { return gaussian(rng, k, s); });
    const MatrixField F2 = field([&] { return gaussian(rng, k, s); });
    const MatrixField A = field([&] { return gaussian(rng, s, h); });
    std::vector<double> ell(m);
    for (auto& l : ell) l = unit(rng);
    const MatrixField EU = frame_matrix(E, U), EV = frame_matrix(E, V);

    // Frame matrices and right products.
    const MatrixField lUV = map_field(U, [&](std::size_t i) -> MatrixXd { return ell[i] * U.at(i) + V.at(i); });
    note("coords_linear", max_difference(frame_matrix(E, lUV), map_field(U, [&](std::size_t i) -> MatrixXd {
                                           return ell[i] * EU.at(i) + EV.at(i);
                                         })));
    const MatrixField UF = right_product(U, F), VF = right_product(V, F), UF2 = right_product(U, F2);
    const MatrixField lFF = map_field(F, [&](std::size_t i) -> MatrixXd { return ell[i] * F.at(i) + F2.at(i); });
    note("right_product_bilinear",
         std::max(max_difference(right_product(lUV, F), map_field(UF, [&](std::size_t i) -> MatrixXd {
                                   return ell[i] * UF.at(i) + VF.at(i);
                                 })),
                  max_difference(right_product(U, lFF), map_field(UF, [&](std::size_t i) -> MatrixXd {
                                   return ell[i] * UF.at(i) + UF2.at(i);
                                 }))));
    note("frame_in_itself", max_difference(frame_matrix(E, E), field([&] { return MatrixXd::Identity(n, n); })));
    note("coords_round_trip", max_difference(right_product(E, EU), U));
    for (std::size_t i = 0; i < m; ++i) {
      // Every other node gets a column in the span of the others.
      MatrixXd u = U.at(i);
      if (k >= 2 && (t + static_cast<int>(i)) % 2 == 0) u.col(k - 1) = u.col(0) - 0.5 * u.col(k - 2);
      tally("independence_rank", (rank_of(u) == k) == (rank_of(E.at(i).inverse() * u) == k));
    }
    note("right_identity", max_difference(right_product(U, field([&] { return MatrixXd::Identity(k, k); })), U));
    note("right_associative", max_difference(right_product(UF, A),
                                             right_product(U, map_field(F, [&](std::size_t i) -> MatrixXd {
                                                             return F.at(i) * A.at(i);
                                                           }))));
    note("coords_commute_with_right_product", max_difference(right_product(EU, F), frame_matrix(E, UF)));
    {
      const MatrixField Ui = field([&] { return well_conditioned(rng, n).leftCols(k).eval(); });
      std::size_t node = 0;
      const MatrixField Ak = field([&] {
        MatrixXd a = gaussian(rng, k, k);
        if (k >= 2 && node++ % 2 == 0) a.col(0) = 2.0 * a.col(k - 1);
        return a;
      });
      const MatrixField UA = right_product(Ui, Ak);
      for (std::size_t i = 0; i < m; ++i)
        tally("right_product_rank", (rank_of(UA.at(i)) == k) == (rank_of(Ak.at(i)) == k));
    }
    {
      const MatrixField Ag = field([&] { return well_conditioned(rng, n); });
      const MatrixField EAinv =
          right_product(E, map_field(Ag, [&](std::size_t i) -> MatrixXd { return Ag.at(i).inverse(); }));
      note("frame_change", max_difference(frame_matrix(EAinv, U), map_field(U, [&](std::size_t i) -> MatrixXd {
                                            return Ag.at(i) * EU.at(i);
                                          })));
    }

    // Metric products.
    const MatrixField G = field([&] {
      const MatrixXd a = well_conditioned(rng, n);
      return (a.transpose() * a).eval();
    });
    const MatrixField W = field([&] { return gaussian(rng, n, s); });
    const MatrixField UV = gram(U, V, G), UW = gram(U, W, G), VW = gram(V, W, G);
    note("gram_bilinear",
         std::max(max_difference(gram(lUV, W, G), map_field(UW, [&](std::size_t i) -> MatrixXd {
                                   return ell[i] * UW.at(i) + VW.at(i);
                                 })),
                  max_difference(gram(W, lUV, G), map_field(UW, [&](std::size_t i) -> MatrixXd {
                                   return (ell[i] * UW.at(i) + VW.at(i)).transpose();
                                 }))));
    const MatrixField VU = gram(V, U, G);
    note("gram_transpose", max_difference(UV, map_field(UV, [&](std::size_t i) -> MatrixXd {
                                            return VU.at(i).transpose();
                                          })));
    // G-orthonormal frame L^{-t} Q for G = L L^t.
    const MatrixField On = map_field(G, [&](std::size_t i) -> MatrixXd {
      Eigen::LLT<MatrixXd> llt(G.at(i));
      return llt.matrixL().transpose().solve(orthogonal(rng, n));
    });
    const MatrixField OU = frame_matrix(On, U), OV = frame_matrix(On, V);
    note("gram_orthonormal_frame", max_difference(UV, map_field(UV, [&](std::size_t i) -> MatrixXd {
                                                    return OU.at(i).transpose() * OV.at(i);
                                                  })));
    const MatrixField Bk = field([&] { return gaussian(rng, k, h); });
    const MatrixField Bs = field([&] { return gaussian(rng, k, s); });
    note("gram_matrix_factors",
         std::max(max_difference(gram(right_product(U, Bk), V, G), map_field(UV, [&](std::size_t i) -> MatrixXd {
                                   return Bk.at(i).transpose() * UV.at(i);
                                 })),
                  max_difference(gram(U, right_product(V, Bs), G), map_field(UV, [&](std::size_t i) -> MatrixXd {
                                   return UV.at(i) * Bs.at(i);
                                 }))));
    const MatrixField EE = gram(E, E, G);
    note("gram_any_frame", max_difference(UV, map_field(UV, [&](std::size_t i) -> MatrixXd {
                                            return EU.at(i).transpose() * EE.at(i) * EV.at(i);
                                          })));
    const MatrixField Ortho = right_product(On, field([&] { return orthogonal(rng, n).leftCols(k).eval(); }));
    for (const MatrixField* X : {&Ortho, &U}) {
      const MatrixField XX = gram(*X, *X, G), OX = frame_matrix(On, *X);
      for (std::size_t i = 0; i < m; ++i) {
        const bool in_metric = orthonormal_columns(XX.at(i));
        tally("orthonormality_in_coords", in_metric == orthonormal_columns(OX.at(i).transpose() * OX.at(i)));
        if (X == &Ortho) tally("orthonormality_in_coords", in_metric);
      }
    }
  }
  return r;
}

}  // namespace branchkit
