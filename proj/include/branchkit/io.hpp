#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "branchkit/geometry.hpp"
#include "branchkit/normalize.hpp"

namespace branchkit {

using Json = nlohmann::ordered_json;

// {"order": N, "real": bool, "coeffs": [[j, k, re, im], ...]}, nonzero entries only.
Json jet_to_json(const BiJet& f);
// Throws InvalidInput on malformed input.
BiJet jet_from_json(const Json& j);

// Jets and metadata; grid samples go to CSV separately.
Json map_to_json(const SurfaceMap& f);
SurfaceMap map_from_json(const Json& j);

// {"s": s, "phi": [BiJet | {"l": "grid.csv"}, ...], "F": [[c0, c1, ...], ...]} with
// complex numbers written as [re, im]. Paths are relative to `base`. Either every
// phi entry is a jet or every entry names an l grid.
RepresentationData representation_from_json(const Json& j, const std::filesystem::path& base);

// Polar GridField CSV as written by write_csv. Throws InvalidInput unless the
// nodes form a uniform polar grid.
GridField read_grid_csv(std::istream& is);

Json branch_report_json(const SurfaceMap& f, const BranchData& bd, const BranchIndex& inv,
                        const DistinguishedCoefficient& varpi, const EstimateReport& est,
                        double conformality);
Json diffeo_json(const Diffeo& d, double beltrami, const std::vector<NormalizedComponent>& b);
Json curvature_report_json(const CurvatureReport& rep);
Json residuals_json(const IdentityResiduals& r);

// One row per ring: j, r, sup_abs, mean_abs, mean, growth, q, lipschitz.
void write_annulus_csv(std::ostream& os, const CurvatureReport& rep);
// Per node: r, theta, lambda, sec, then H_k, K_k per normal and the mean curvature vector.
void write_curvature_csv(std::ostream& os, const CurvatureReport& rep);
// Binary P5 of log10|Sec| with rings as rows and angles as columns. Nodes with
// Sec = 0 map to black; the range is stored in a header comment.
std::string sec_heatmap_pgm(const CurvatureReport& rep);

// Writes to a temporary file in the same directory, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace branchkit
