#include "branchkit/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "branchkit/error.hpp"

namespace branchkit {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) invalid(std::string("missing field '") + key + "'");
  return j.at(key);
}

int int_member(const Json& j, const char* key, int lo) {
  const Json& v = member(j, key);
  if (!v.is_number_integer() || v.get<long long>() < lo)
    invalid(std::string("field '") + key + "' must be an integer >= " + std::to_string(lo));
  return v.get<int>();
}

double finite_number(const Json& v, const std::string& what) {
  if (!v.is_number()) invalid(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(what + " must be finite");
  return x;
}

cplx complex_value(const Json& v, const std::string& what) {
  if (v.is_number()) return {finite_number(v, what), 0.0};
  if (!v.is_array() || v.size() != 2) invalid(what + " must be a number or [re, im]");
  return {finite_number(v[0], what), finite_number(v[1], what)};
}

Json complex_json(cplx c) { return Json::array({c.real(), c.imag()}); }

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// JSON has no infinities; they are written as null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json order_json(const ZOrder& o) {
  return Json{{"value", o.value()}, {"limited", o.limited()}, {"text", o.to_string()}};
}

}  // namespace

Json jet_to_json(const BiJet& f) {
  Json coeffs = Json::array();
  for (int d = 0; d <= f.order(); ++d)
    for (int k = 0; k <= d; ++k) {
      const cplx c = f.coeff(d - k, k);
      if (c != cplx(0.0, 0.0)) coeffs.push_back(Json::array({d - k, k, c.real(), c.imag()}));
    }
  return Json{{"order", f.order()}, {"real", f.real_flag()}, {"coeffs", coeffs}};
}

BiJet jet_from_json(const Json& j) {
  const int order = int_member(j, "order", 0);
  BiJet f(order);
  const Json& coeffs = member(j, "coeffs");
  if (!coeffs.is_array()) invalid("'coeffs' must be an array");
  for (const Json& c : coeffs) {
    if (!c.is_array() || c.size() != 4 || !c[0].is_number_integer() || !c[1].is_number_integer())
      invalid("jet coefficients are [j, k, re, im] with integer j, k");
    const int p = c[0].get<int>(), q = c[1].get<int>();
    if (p < 0 || q < 0 || p + q > order) invalid("jet coefficient outside the truncation order");
    f.set(p, q, {finite_number(c[2], "coefficient"), finite_number(c[3], "coefficient")});
  }
  if (j.contains("real")) {
    if (!j.at("real").is_boolean()) invalid("'real' must be a boolean");
    f.set_real_flag(j.at("real").get<bool>());
  }
  return f;
}

Json map_to_json(const SurfaceMap& f) {
  Json comps = Json::array();
  for (const BiJet& c : f.components) comps.push_back(jet_to_json(c));
  return Json{{"schema_version", 1}, {"label", f.label},     {"s", f.s},
              {"n", f.n},            {"radius", f.radius},   {"halvings", f.halvings},
              {"metric", f.metric.name()}, {"jet_order", f.jet_order()}, {"components", comps}};
}

SurfaceMap map_from_json(const Json& j) {
  SurfaceMap f;
  f.s = int_member(j, "s", 1);
  f.n = int_member(j, "n", 3);
  f.radius = finite_number(member(j, "radius"), "radius");
  if (f.radius <= 0.0) invalid("radius must be positive");
  if (j.contains("halvings")) f.halvings = int_member(j, "halvings", 0);
  if (j.contains("label")) {
    if (!j.at("label").is_string()) invalid("'label' must be a string");
    f.label = j.at("label").get<std::string>();
  }
  const std::string metric = j.value("metric", std::string("euclidean"));
  if (metric == "euclidean") {
    f.metric = AmbientMetric::euclidean();
  } else if (metric == "inverse_stereographic") {
    f.metric = AmbientMetric::inverse_stereographic();
  } else {
    invalid("unknown metric '" + metric + "'");
  }
  const Json& comps = member(j, "components");
  if (!comps.is_array() || static_cast<int>(comps.size()) != f.n)
    invalid("'components' must hold n jets");
  for (const Json& c : comps) {
    BiJet jet = jet_from_json(c);
    jet.set_real_flag(true);
    if (!f.components.empty() && jet.order() != f.components.front().order())
      invalid("all components must share one jet order");
    f.components.push_back(std::move(jet));
  }
  return f;
}

RepresentationData representation_from_json(const Json& j, const std::filesystem::path& base) {
  const int s = int_member(j, "s", 1);
  const Json& phi = member(j, "phi");
  const Json& F = member(j, "F");
  if (!phi.is_array() || !F.is_array() || phi.size() != F.size() || phi.size() < 3)
    invalid("'phi' and 'F' must be arrays of equal length n >= 3");
  std::vector<std::vector<cplx>> coeffs;
  for (std::size_t h = 0; h < F.size(); ++h) {
    if (!F[h].is_array()) invalid("each F_h is an array of coefficients");
    std::vector<cplx> c;
    for (const Json& v : F[h]) c.push_back(complex_value(v, "F coefficient"));
    coeffs.push_back(std::move(c));
  }
  const bool grids = phi[0].is_object() && phi[0].contains("l");
  for (const Json& p : phi)
    if ((p.is_object() && p.contains("l")) != grids) invalid("phi entries mix jets and l grids");
  if (grids) {
    std::vector<GridField> l;
    for (const Json& p : phi) {
      if (!p.at("l").is_string()) invalid("'l' must be a path");
      std::ifstream in(base / p.at("l").get<std::string>());
      if (!in) invalid("cannot read " + p.at("l").get<std::string>());
      l.push_back(read_grid_csv(in));
    }
    return representation_from_laplacian(l, s, coeffs);
  }
  RepresentationData data;
  data.s = s;
  for (const Json& p : phi) {
    BiJet jet = jet_from_json(p);
    for (int d = 0; d <= jet.order(); ++d)
      for (int k = 0; k <= d; ++k)
        if (std::abs(jet.coeff(d - k, k) - std::conj(jet.coeff(k, d - k))) > 1e-12)
          invalid("phi jets must be real valued");
    jet.set_real_flag(true);
    data.phi.push_back(std::move(jet));
  }
  data.F = std::move(coeffs);
  return data;
}

GridField read_grid_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("r,theta", 0) != 0) invalid("grid CSV must start with 'r,theta'");
  const long columns = std::count(line.begin(), line.end(), ',') + 1;
  if (columns < 4 || columns % 2 != 0) invalid("grid CSV needs re/im column pairs");
  const int m = static_cast<int>((columns - 2) / 2);
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        invalid("non-numeric grid CSV cell '" + cell + "'");
      }
    }
    if (static_cast<long>(row.size()) != columns) invalid("ragged grid CSV row");
    rows.push_back(std::move(row));
  }
  std::vector<double> radii;
  for (const auto& r : rows) radii.push_back(r[0]);
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }),
              radii.end());
  if (radii.empty() || rows.size() % radii.size() != 0) invalid("grid CSV is not a polar grid");
  const int n_r = static_cast<int>(radii.size());
  const int n_theta = static_cast<int>(rows.size() / radii.size());
  const GridPtr grid = DiskGrid::polar(radii.back(), n_r, n_theta);
  GridField out(grid, m);
  bool real = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const cplx z = std::polar(rows[i][0], rows[i][1]);
    if (std::abs(z - grid->node(i)) > 1e-9 * radii.back()) invalid("grid CSV nodes are not in polar order");
    for (int c = 0; c < m; ++c) {
      out.at(i, c) = {rows[i][2 + 2 * c], rows[i][3 + 2 * c]};
      real = real && rows[i][3 + 2 * c] == 0.0;
    }
  }
  out.set_real_flag(real);
  return out;
}

Json branch_report_json(const SurfaceMap& f, const BranchData& bd, const BranchIndex& inv,
                        const DistinguishedCoefficient& varpi, const EstimateReport& est,
                        double conformality) {
  Json d0 = Json::array();
  for (const BiJet& d : bd.d) d0.push_back(complex_json(d.coeff(0, 0)));
  return Json{
      {"label", f.label},
      {"s", bd.s},
      {"n", bd.n},
      {"radius", f.radius},
      {"halvings", f.halvings},
      {"iota", inv.iota.to_string()},
      {"rho", inv.rho.to_string()},
      {"iota_detail", order_json(inv.iota)},
      {"rho_detail", order_json(inv.rho)},
      {"varpi_smoothness", varpi.smoothness},
      {"varpi_leading_zbar_order", varpi.leading_limited ? Json(nullptr) : Json(varpi.leading_zbar_order)},
      {"varpi_sup", varpi.sup},
      {"d_at_origin", d0},
      {"flags",
       {{"frontal", bd.conditions.frontal_ok},
        {"quasiregular", bd.conditions.quasiregular_ok},
        {"conformal", conformality <= kConformalTolerance},
        {"estimate", estimate_status_name(est.status)}}},
      {"sup_ratio", bd.conditions.sup_ratio},
      {"residuals",
       {{"min_frontal_det", bd.conditions.min_frontal_det},
        {"min_denominator", bd.conditions.min_denominator},
        {"l_imag", bd.l_imag},
        {"conformality", conformality}}},
      {"estimate_detail", est.detail}};
}

Json diffeo_json(const Diffeo& d, double beltrami, const std::vector<NormalizedComponent>& b) {
  Json comps = Json::array();
  for (const auto& c : b)
    comps.push_back({{"b0", complex_json(c.jet.coeff(0, 0))},
                     {"reconstruction_residual", c.reconstruction_residual},
                     {"jet", jet_to_json(c.jet)}});
  return Json{{"s", d.s},
              {"radius_w", d.radius_w},
              {"jet_valid", d.jet_valid},
              {"c0_at_origin", complex_json(d.c0_at_origin())},
              {"residuals",
               {{"newton", d.newton_residual},
                {"inverse", d.inverse_residual},
                {"composition", d.composition_residual},
                {"beltrami", beltrami}}},
              {"min_root_modulus", d.min_root_modulus},
              {"c_jet", jet_to_json(d.c_jet)},
              {"e_jet", jet_to_json(d.e_jet)},
              {"normalized_components", comps}};
}

Json residuals_json(const IdentityResiduals& r) {
  return Json{{"frame", r.frame},
              {"first_form", r.first_form},
              {"second_form", r.second_form},
              {"two_path", r.two_path},
              {"orthogonality", r.orthogonality},
              {"corollary", r.corollary},
              {"scaling_H", r.scaling_H},
              {"scaling_K", r.scaling_K},
              {"scaling_sigma2", r.scaling_sigma2},
              {"mean_vector", r.mean_vector},
              {"gauss", r.gauss},
              {"eigen_product", r.eigen_product}};
}

Json curvature_report_json(const CurvatureReport& rep) {
  Json annuli = Json::array();
  for (const AnnulusStat& a : rep.annuli)
    annuli.push_back({{"j", a.j},
                      {"r", a.r},
                      {"sup_abs", number(a.sup_abs)},
                      {"mean_abs", number(a.mean_abs)},
                      {"mean", number(a.mean)},
                      {"growth", number(a.growth)},
                      {"q", number(a.q)},
                      {"lipschitz", number(a.lipschitz)}});
  Json origin = nullptr;
  if (rep.origin) {
    Json K = Json::array();
    for (double k : rep.origin->K) K.push_back(k);
    origin = {{"K", K}, {"sec", rep.origin->sec}};
  }
  return Json{{"label", rep.label},
              {"s", rep.s},
              {"n", rep.n},
              {"iota", rep.iota.to_string()},
              {"ambient", rep.ambient},
              {"radius", rep.radius},
              {"predicted", curvature_class_name(rep.predicted)},
              {"empirical", curvature_class_name(rep.empirical)},
              {"agree", rep.agree},
              {"growth_exponent", number(rep.growth_exponent)},
              {"min_growth", number(rep.min_growth)},
              {"lipschitz_variation", number(rep.lipschitz_variation)},
              {"sec_sign", rep.sec_sign},
              {"max_mean_curvature", rep.max_mean_curvature},
              {"brioschi_gap", rep.brioschi_gap},
              {"brioschi_inner", rep.brioschi_inner},
              {"identity_residuals", residuals_json(rep.fields.residuals)},
              {"origin", origin},
              {"mean_curvature_origin", rep.mean_curvature_origin.size() > 0
                                            ? vector_json(rep.mean_curvature_origin)
                                            : Json(nullptr)},
              {"annuli", annuli}};
}

void write_annulus_csv(std::ostream& os, const CurvatureReport& rep) {
  os << "j,r,sup_abs,mean_abs,mean,growth,q,lipschitz\n";
  os.precision(17);
  for (const AnnulusStat& a : rep.annuli)
    os << a.j << ',' << a.r << ',' << a.sup_abs << ',' << a.mean_abs << ',' << a.mean << ','
       << a.growth << ',' << a.q << ',' << a.lipschitz << '\n';
}

void write_curvature_csv(std::ostream& os, const CurvatureReport& rep) {
  const CurvatureFields& cf = rep.fields;
  const int normals = cf.H.components();
  const int n = cf.mean_curvature.components();
  os << "r,theta,lambda,sec";
  for (int k = 0; k < normals; ++k) os << ",H" << k << ",K" << k;
  for (int c = 0; c < n; ++c) os << ",mean" << c;
  os << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < cf.sec.node_count(); ++i) {
    const cplx z = cf.sec.grid().node(i);
    double th = std::arg(z);
    if (th < 0.0) th += 2.0 * std::numbers::pi;
    os << std::abs(z) << ',' << th << ',' << cf.lambda.at(i).real() << ',' << cf.sec.at(i).real();
    for (int k = 0; k < normals; ++k) os << ',' << cf.H.at(i, k).real() << ',' << cf.K.at(i, k).real();
    for (int c = 0; c < n; ++c) os << ',' << cf.mean_curvature.at(i, c).real();
    os << '\n';
  }
}

std::string sec_heatmap_pgm(const CurvatureReport& rep) {
  const GridField& sec = rep.fields.sec;
  const DiskGrid& g = sec.grid();
  if (g.mode() != GridMode::Polar) invalid("heatmaps need a polar grid");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < sec.node_count(); ++i) {
    const double a = std::abs(sec.at(i).real());
    if (a > 0.0 && std::isfinite(a)) {
      lo = std::min(lo, std::log10(a));
      hi = std::max(hi, std::log10(a));
    }
  }
  std::ostringstream os;
  os << "P5\n# log10|Sec| range";
  if (lo <= hi) {
    os.precision(17);
    os << ' ' << lo << ' ' << hi;
  } else {
    os << " empty";
  }
  os << "\n" << g.n_theta() << ' ' << g.n_r() << "\n255\n";
  std::string pixels(sec.node_count(), '\0');
  for (std::size_t i = 0; i < sec.node_count(); ++i) {
    const double a = std::abs(sec.at(i).real());
    if (!(a > 0.0) || !std::isfinite(a)) continue;
    const double t = hi > lo ? (std::log10(a) - lo) / (hi - lo) : 1.0;
    pixels[i] = static_cast<char>(1 + static_cast<int>(std::lround(254.0 * t)));
  }
  return os.str() + pixels;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp =
      path.parent_path() / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) invalid("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) invalid("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    invalid("cannot rename into " + path.string() + ": " + ec.message());
  }
}

}  // namespace branchkit
