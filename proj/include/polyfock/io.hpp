#pragma once

// JSON wire formats: domain specs, ideals, operator tuples, scalar points,
// basis manifests, operator triplets, and the deterministic report layout
// used by the command-line tool.  Keys are emitted in a fixed order so a
// fixed config and seed reproduce identical bytes.

#include <nlohmann/json.hpp>
#include <string>

#include "polyfock/polydomain.hpp"
#include "polyfock/rkhs.hpp"
#include "polyfock/variety.hpp"

namespace polyfock::io {

using Json = nlohmann::ordered_json;

// {"block": n, "terms": [{"word": [j1, ...], "re": x, "im": y}]}
Json to_json(const PositiveRegularPolynomial& q);
PositiveRegularPolynomial prp_from_json(const Json& j);

// {"blocks": k, "terms": [{"words": [[...], ...], "re": x, "im": y}]}
Json to_json(const NcPolynomial& p);
NcPolynomial ncpoly_from_json(const Json& j);

// {"n": [...], "m": [...], "q": [...]} or {"preset": "drury-arveson", ...}
Json to_json(const DomainSpec& spec);
DomainSpec domain_from_json(const Json& j);

Json to_json(const TruncationGrid& grid);
TruncationGrid grid_from_json(const Json& j);

// {"kind": "zero"|"commutant"|"fully-commutative"|"general",
//  "two_sided": bool, "generators": [...]}
Json to_json(const IdealSpec& ideal);
IdealSpec ideal_from_json(const Json& j, const DomainSpec& spec);

// dense complex matrix as rows of [re, im] pairs
Json to_json(const Mat& m);
Mat mat_from_json(const Json& j);

// {"dim": d, "blocks": [[mat, ...], ...]}
Json to_json(const OperatorTuple& t);
OperatorTuple tuple_from_json(const Json& j, double commTol = 1e-10);

// {"lambda": [[[re, im], ...], ...]} grouped by block
Json to_json(const ScalarPoint& pt);
ScalarPoint point_from_json(const Json& j);

// sparse export: {"rows": r, "cols": c, "entries": [[i, j, re, im], ...]}
Json triplets_json(const Mat& m, double dropTol = 0.0);
Mat mat_from_triplets(const Json& j);

// index -> multi-index manifest for a truncated basis
Json basis_manifest(const FockBasis& basis);

// CSV with header row,col,re,im
std::string triplets_csv(const Mat& m, double dropTol = 0.0);

// FNV-1a over the canonical dump, hex string; the report's config hash
std::string config_hash(const Json& config);

}  // namespace polyfock::io
