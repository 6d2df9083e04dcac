#pragma once

// JSON formats for the core types and result reports.
//
// Matrices: {"rows": r, "cols": c, "data": [[re, im], ...]} row-major.
// Points:   {"d": d, "level": n, "mats": [Mat, ...]}.
// Sets:     tagged by {"kind": "pencil" | "opsys" | "hull", ...}; the
//           convenience kinds "interval" and "row_ball" are accepted on input
//           and normalized to a pencil.
// Polynomials: {"d": d, "terms": [{"word": "1 2* 1", "coeff": [re, im]}]}
//           with space-separated letter tokens "1".."d" / "1*".."d*" and the
//           empty string for the unit word.
//
// Serialization is deterministic: keys keep insertion order and doubles use
// the shortest round-trip decimal form.

#include "ncc/dilation.hpp"
#include "ncc/envelope.hpp"
#include "ncc/fock.hpp"
#include "ncc/order.hpp"
#include "ncc/representation.hpp"

#include "json.hpp"

#include <string>

namespace ncc {

using Json = nlohmann::ordered_json;

Json to_json(const CMat& m);
Json to_json(const NcPoint& x);
Json to_json(const NcSet& k);
Json to_json(const FreePoly& f);
Json to_json(const UcpRep& mu);

std::string word_to_string(const Word& w);
Word word_from_string(const std::string& s, int d);

// Parsers throw std::invalid_argument with a path-like message on malformed
// or inconsistent input.
CMat mat_from_json(const Json& j);
NcPoint point_from_json(const Json& j);
NcSet set_from_json(const Json& j, const Tolerances& tol = {});
FreePoly poly_from_json(const Json& j);
UcpRep ucp_from_json(const Json& j);

// Report serialization (used by the CLI and by the determinism checks).
Json to_json(const MembershipResult& r);
Json to_json(const SeparationCertificate& c);
Json to_json(const ClassifyReport& r);
Json to_json(const DilateResult& r);
Json to_json(const KreinMilmanResult& r);
Json to_json(const EnvelopeResult& r);
Json to_json(const OrderVerdict& v);
Json to_json(const NcMeasure& m);
/// flags may carry one {"irreducible","maximal","nc_extreme"} object per atom.
Json to_json(const DecompositionReport& r, const std::vector<Json>& atom_flags = {});
Json to_json(const ConvexityVerdict& v);
Json to_json(const JensenReport& r);
Json to_json(const SemicircularReport& r);

/// Reads and parses a JSON file; throws std::invalid_argument naming the file
/// on read or parse failure.
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace ncc
