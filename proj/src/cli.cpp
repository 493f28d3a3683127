#include "branchkit/cli.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "branchkit/suites.hpp"

namespace branchkit {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

struct Settings {
  std::string command;
  fs::path out = "branchkit-out";
  std::uint64_t seed = kDefaultSeed;
  std::string suite = "all";
  BuildOptions build;
  bool grid_set = false;
  bool radius_set = false;
  std::optional<fs::path> input;
  std::optional<std::string> fixture;
  std::optional<Json> map_spec;
  fs::path base = ".";
  Tolerances tol;
};

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    invalid("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void require_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) invalid("unknown field '" + key + "' in " + where);
}

double positive(const Json& v, const std::string& what) {
  if (!v.is_number() || !(v.get<double>() > 0.0)) invalid(what + " must be a positive number");
  return v.get<double>();
}

int integer(const Json& v, const std::string& what, int lo) {
  if (!v.is_number_integer() || v.get<long long>() < lo)
    invalid(what + " must be an integer >= " + std::to_string(lo));
  return v.get<int>();
}

void apply_config_file(Settings& st, const fs::path& path) {
  const Json j = read_json_file(path);
  require_keys(j,
               {"schema_version", "command", "map", "input", "grid", "jet_order", "seed", "suite", "out",
                "tolerances"},
               "config");
  if (!j.contains("schema_version") || j.at("schema_version") != kConfigSchemaVersion)
    invalid("config schema_version must be " + std::to_string(kConfigSchemaVersion));
  st.base = path.parent_path();
  if (j.contains("command") && j.at("command") != st.command)
    invalid("config is for command '" + j.at("command").dump() + "'");
  if (j.contains("map")) st.map_spec = j.at("map");
  if (j.contains("input")) {
    if (!j.at("input").is_string()) invalid("'input' must be a path");
    st.input = st.base / j.at("input").get<std::string>();
  }
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    require_keys(g, {"radius", "n_r", "n_theta"}, "grid");
    if (g.contains("radius")) {
      st.build.radius = positive(g.at("radius"), "grid.radius");
      st.radius_set = true;
    }
    if (g.contains("n_r")) st.build.n_r = integer(g.at("n_r"), "grid.n_r", kMinGridResolution);
    if (g.contains("n_theta")) st.build.n_theta = integer(g.at("n_theta"), "grid.n_theta", kMinGridResolution);
    st.grid_set = st.grid_set || g.contains("n_r") || g.contains("n_theta");
  }
  if (j.contains("jet_order")) st.build.jet_order = integer(j.at("jet_order"), "jet_order", 0);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) invalid("seed must be an unsigned integer");
    st.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("suite")) {
    if (!j.at("suite").is_string()) invalid("suite must be a string");
    st.suite = j.at("suite").get<std::string>();
  }
  if (j.contains("out")) {
    if (!j.at("out").is_string()) invalid("'out' must be a path");
    st.out = st.base / j.at("out").get<std::string>();
  }
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    require_keys(t, {"frame", "relation", "brioschi", "diffeo", "beltrami"}, "tolerances");
    auto set = [&](const char* key, double& field) {
      if (t.contains(key)) field = positive(t.at(key), std::string("tolerances.") + key);
    };
    set("frame", st.tol.frame);
    set("relation", st.tol.relation);
    set("brioschi", st.tol.brioschi);
    set("diffeo", st.tol.diffeo);
    set("beltrami", st.tol.beltrami);
  }
}

Settings resolve(const RunConfig& rc) {
  static const std::set<std::string> commands = {"build", "analyze", "normalize", "curvature", "verify"};
  if (!commands.count(rc.command)) invalid("unknown command '" + rc.command + "'");
  Settings st;
  st.command = rc.command;
  if (rc.config) apply_config_file(st, *rc.config);
  if (rc.input) st.input = *rc.input;
  if (rc.fixture) st.fixture = *rc.fixture;
  if (rc.out) st.out = *rc.out;
  if (rc.seed) st.seed = *rc.seed;
  if (rc.suite) st.suite = *rc.suite;
  if (rc.grid) {
    if (rc.grid->first < kMinGridResolution || rc.grid->second < kMinGridResolution)
      invalid("grid needs at least " + std::to_string(kMinGridResolution) + " nodes per direction");
    st.build.n_r = rc.grid->first;
    st.build.n_theta = rc.grid->second;
    st.grid_set = true;
  }
  if (rc.radius) {
    if (!(*rc.radius > 0.0)) invalid("radius must be positive");
    st.build.radius = *rc.radius;
    st.radius_set = true;
  }
  if (rc.jet_order) {
    if (*rc.jet_order < 0) invalid("jet order must be non-negative");
    st.build.jet_order = *rc.jet_order;
  }
  return st;
}

std::vector<double> split_numbers(const std::string& text, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size()) invalid("bad number '" + cell + "' in " + what);
    v.push_back(x);
  }
  return v;
}

int as_int(double x, const std::string& what) {
  if (x != std::floor(x)) invalid(what + " must be an integer");
  return static_cast<int>(x);
}

// "weierstrass:s,k[,scale]", "pure:s[,n]", "sphere:s,rho[,round]".
Json fixture_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) invalid("fixture must look like name:args");
  const std::string name = text.substr(0, colon);
  const std::vector<double> a = split_numbers(text.substr(colon + 1), "fixture");
  if (name == "weierstrass" && (a.size() == 2 || a.size() == 3))
    return {{"type", "weierstrass"}, {"s", as_int(a[0], "s")}, {"k", as_int(a[1], "k")},
            {"scale", a.size() == 3 ? a[2] : 1.0}};
  if (name == "pure" && (a.size() == 1 || a.size() == 2))
    return {{"type", "pure_branch"}, {"s", as_int(a[0], "s")}, {"n", a.size() == 2 ? as_int(a[1], "n") : 3}};
  if (name == "sphere" && (a.size() == 2 || a.size() == 3))
    return {{"type", "sphere_patch"}, {"s", as_int(a[0], "s")}, {"rho", a[1]},
            {"round", a.size() == 3 && a[2] != 0.0}};
  invalid("unknown fixture '" + text + "'");
}

SurfaceMap load_map_file(const Settings& st, const fs::path& path) {
  SurfaceMap f = map_from_json(read_json_file(path));
  if (st.radius_set) {
    if (st.build.radius > f.radius) invalid("radius exceeds the domain of the stored map");
    f.radius = st.build.radius;
  }
  f.samples = sample_jets(DiskGrid::polar(f.radius, st.build.n_r, st.build.n_theta), f.components);
  return f;
}

SurfaceMap map_from_spec(const Settings& st, const Json& spec) {
  if (!spec.is_object() || !spec.contains("type") || !spec.at("type").is_string())
    invalid("map needs a string 'type'");
  const std::string type = spec.at("type").get<std::string>();
  BuildOptions opts = st.build;
  if (type == "weierstrass") {
    require_keys(spec, {"type", "s", "k", "scale"}, "map");
    const double scale = spec.contains("scale") ? positive(spec.at("scale"), "scale") : 1.0;
    return build_weierstrass_minimal(integer(spec.at("s"), "s", 1), integer(spec.at("k"), "k", 1), scale, opts);
  }
  if (type == "pure_branch") {
    require_keys(spec, {"type", "s", "n"}, "map");
    return build_pure_branch(integer(spec.at("s"), "s", 1), spec.contains("n") ? integer(spec.at("n"), "n", 3) : 3,
                             opts);
  }
  if (type == "sphere_patch") {
    require_keys(spec, {"type", "s", "rho", "round"}, "map");
    const bool round = spec.contains("round") && spec.at("round").is_boolean() && spec.at("round").get<bool>();
    return build_sphere_patch(integer(spec.at("s"), "s", 1), positive(spec.at("rho"), "rho"), round, opts);
  }
  if (type == "representation") {
    require_keys(spec, {"type", "data", "path"}, "map");
    if (spec.contains("path")) {
      const fs::path p = st.base / spec.at("path").get<std::string>();
      return build_from_representation(representation_from_json(read_json_file(p), p.parent_path()), opts);
    }
    if (!spec.contains("data")) invalid("representation map needs 'data' or 'path'");
    return build_from_representation(representation_from_json(spec.at("data"), st.base), opts);
  }
  if (type == "file") {
    require_keys(spec, {"type", "path"}, "map");
    return load_map_file(st, st.base / spec.at("path").get<std::string>());
  }
  invalid("unknown map type '" + type + "'");
}

SurfaceMap acquire_map(const Settings& st) {
  if (st.input) return load_map_file(st, *st.input);
  if (st.fixture) return map_from_spec(st, fixture_spec(*st.fixture));
  if (st.map_spec) return map_from_spec(st, *st.map_spec);
  invalid("no map given: use an input file, --fixture or a config with 'map'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

template <class Writer>
std::string render(Writer&& w) {
  std::ostringstream os;
  w(os);
  return os.str();
}

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) invalid("cannot create output directory " + dir_.string() + ": " + ec.message());
  }
  void write(const std::string& name, const std::string& contents) {
    write_atomic(dir_ / name, contents);
    files_.push_back(name);
  }
  Json files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

Json check(const std::string& name, double value, double tolerance, bool pass) {
  return {{"check", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}};
}

RunOutcome finish(const std::string& command, Json checks, Outputs& out, Json extra = Json::object()) {
  bool pass = true;
  for (const Json& c : checks) pass = pass && c.at("pass").get<bool>();
  Json summary = {{"status", pass ? "pass" : "fail"}, {"command", command}};
  for (auto& [k, v] : extra.items()) summary[k] = v;
  summary["checks"] = std::move(checks);
  summary["files"] = out.files();
  return {pass ? 0 : 1, summary};
}

RunOutcome do_build(const Settings& st) {
  const SurfaceMap f = acquire_map(st);
  Outputs out(st.out);
  out.write("map.json", dump(map_to_json(f)));
  if (f.has_samples()) out.write("map_samples.csv", render([&](std::ostream& os) { write_csv(os, f.samples); }));
  Json checks = Json::array();
  checks.push_back(check("sample_mismatch", f.sample_mismatch(), kSampleTolerance,
                         f.sample_mismatch() <= kSampleTolerance));
  return finish("build", checks, out,
                {{"label", f.label}, {"s", f.s}, {"n", f.n}, {"radius", f.radius}, {"halvings", f.halvings}});
}

RunOutcome do_analyze(const Settings& st) {
  const SurfaceMap f = acquire_map(st);
  const BranchData bd = extract_branch_data(f);
  const BranchIndex inv = index_and_degree(f);
  const DistinguishedCoefficient varpi = distinguished_coefficient(bd);
  const double conformality = conformality_residual(f, bd).max_abs();
  const EstimateReport est = check_estimate(inv, bd.s, f.n);
  Outputs out(st.out);
  const Json report = branch_report_json(f, bd, inv, varpi, est, conformality);
  out.write("branch_report.json", dump(report));
  Json checks = Json::array();
  checks.push_back(check("estimate_not_violated", est.status == EstimateStatus::Violated ? 1.0 : 0.0, 0.0,
                         est.status != EstimateStatus::Violated));
  return finish("analyze", checks, out,
                {{"s", bd.s}, {"iota", report.at("iota")}, {"rho", report.at("rho")},
                 {"estimate", estimate_status_name(est.status)}});
}

RunOutcome do_normalize(const Settings& st) {
  const SurfaceMap f = acquire_map(st);
  const BranchData bd = extract_branch_data(f);
  const Diffeo d = build_normalizing_diffeo(f, bd);
  const double beltrami = beltrami_residual(d, distinguished_coefficient(bd).grid).max_abs();
  const std::vector<NormalizedComponent> b = normalized_components(f, d);
  Outputs out(st.out);
  out.write("diffeo.json", dump(diffeo_json(d, beltrami, b)));
  out.write("diffeo_c.csv", render([&](std::ostream& os) { write_csv(os, d.c); }));
  out.write("diffeo_e.csv", render([&](std::ostream& os) { write_csv(os, d.e); }));
  Json checks = Json::array();
  checks.push_back(check("composition", d.composition_residual, st.tol.diffeo, d.composition_residual <= st.tol.diffeo));
  checks.push_back(check("inverse", d.inverse_residual, st.tol.diffeo, d.inverse_residual <= st.tol.diffeo));
  checks.push_back(check("beltrami", beltrami, st.tol.beltrami, beltrami <= st.tol.beltrami));
  checks.push_back(check("c0_modulus", std::abs(d.c0_at_origin()), 0.5, std::abs(d.c0_at_origin()) > 0.5));
  double b0 = 0.0, rec = 0.0;
  for (const auto& c : b) {
    b0 = std::max(b0, std::abs(c.jet.coeff(0, 0)));
    rec = std::max(rec, c.reconstruction_residual);
  }
  checks.push_back(check("b_at_origin", b0, 1e-12, b0 <= 1e-12));
  checks.push_back(check("b_reconstruction", rec, st.tol.diffeo, rec <= st.tol.diffeo));
  return finish("normalize", checks, out, {{"s", d.s}, {"radius_w", d.radius_w}});
}

RunOutcome do_curvature(const Settings& st) {
  const SurfaceMap f = acquire_map(st);
  const CurvatureReport rep = classify_branch_curvature(f);
  Outputs out(st.out);
  out.write("curvature_report.json", dump(curvature_report_json(rep)));
  out.write("annuli.csv", render([&](std::ostream& os) { write_annulus_csv(os, rep); }));
  out.write("curvature_fields.csv", render([&](std::ostream& os) { write_curvature_csv(os, rep); }));
  out.write("sec_heatmap.pgm", sec_heatmap_pgm(rep));
  const IdentityResiduals& r = rep.fields.residuals;
  Json checks = Json::array();
  checks.push_back(check("frame", r.frame, st.tol.frame, r.frame <= st.tol.frame));
  checks.push_back(check("relations", r.worst_relation(), st.tol.relation, r.worst_relation() <= st.tol.relation));
  checks.push_back(check("brioschi", rep.brioschi_gap, st.tol.brioschi, rep.brioschi_gap <= st.tol.brioschi));
  checks.push_back(check("class_agreement", rep.agree ? 0.0 : 1.0, 0.0, rep.agree));
  return finish("curvature", checks, out,
                {{"predicted", curvature_class_name(rep.predicted)},
                 {"empirical", curvature_class_name(rep.empirical)},
                 {"classification", curvature_class_name(rep.empirical)},
                 {"sec_sign", rep.sec_sign}});
}

RunOutcome do_verify(const Settings& st) {
  std::vector<std::string> names;
  if (st.suite == "all") {
    names = suite_names();
  } else {
    names.push_back(st.suite);
  }
  std::vector<SuiteResult> results;
  for (const std::string& n : names) results.push_back(run_suite(n, st.seed));
  Outputs out(st.out);
  Json checks = Json::array();
  for (const SuiteResult& r : results) {
    out.write("verify_" + r.suite + ".csv", r.table());
    int failed = 0;
    for (const SuiteCheck& c : r.checks) {
      if (c.pass) continue;
      ++failed;
      checks.push_back(check(r.suite + "/" + c.name, c.value, c.tolerance, false));
    }
    checks.push_back(check(r.suite + "/failed_checks", failed, 0.0, failed == 0));
  }
  return finish("verify", checks, out, {{"seed", st.seed}});
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::GridTooCoarse:
    case ErrorCode::ConstraintViolated:
    case ErrorCode::OrderTooLow:
    case ErrorCode::ZeroOrderJet:
    case ErrorCode::NotDiffeoGerm:
    case ErrorCode::ShapeMismatch:
      return 2;
    case ErrorCode::NotABranchPoint:
    case ErrorCode::AmbientFrameMismatch:
    case ErrorCode::NonRealL:
    case ErrorCode::QuasiBoundViolated:
    case ErrorCode::NotConformal:
    case ErrorCode::BuildRejected:
      return 1;
    default:
      return 3;
  }
}

RunOutcome run(const RunConfig& config) {
  std::optional<fs::path> out_dir = config.out;
  try {
    const Settings st = resolve(config);
    out_dir = st.out;
    if (st.command == "build") return do_build(st);
    if (st.command == "analyze") return do_analyze(st);
    if (st.command == "normalize") return do_normalize(st);
    if (st.command == "curvature") return do_curvature(st);
    return do_verify(st);
  } catch (const Error& e) {
    Json detail = Json::object();
    for (const auto& [k, v] : e.detail()) {
      const Json parsed = Json::parse(v, nullptr, false);
      detail[k] = parsed.is_discarded() ? Json(v) : parsed;
    }
    RunOutcome o{exit_code_for(e.code()),
                 {{"status", "error"},
                  {"command", config.command},
                  {"code", error_code_name(e.code())},
                  {"exit_code", exit_code_for(e.code())},
                  {"message", e.what()},
                  {"detail", detail}}};
    if (out_dir) {
      std::error_code ec;
      fs::create_directories(*out_dir, ec);
      if (!ec) {
        try {
          write_atomic(*out_dir / "error.json", dump(o.summary));
        } catch (const Error&) {
        }
      }
    }
    return o;
  } catch (const std::exception& e) {
    return {3, {{"status", "error"}, {"command", config.command}, {"code", "Internal"}, {"exit_code", 3},
                {"message", e.what()}, {"detail", Json::object()}}};
  }
}

}  // namespace branchkit
