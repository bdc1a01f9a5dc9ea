#pragma once

#include <json.hpp>

#include "geo4/classify.hpp"
#include "geo4/descriptor.hpp"
#include "geo4/polycyc.hpp"
#include "geo4/profinite.hpp"
#include "geo4/seifert.hpp"

namespace geo4 {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

// Integers within int64 are JSON numbers, larger ones decimal strings.
Json int_json(const Int& v);
// Rationals are "p/q" strings ("p" when integral).
Json rational_json(const Rational& v);
Json matrix_json(const IntMatrix& m);

Int int_from_json(const Json& j, const std::string& path);
Rational rational_from_json(const Json& j, const std::string& path);
IntMatrix matrix_from_json(const Json& j, const std::string& path);

// {"schemaVersion": "1", "kind": ..., "payload": {...}}
Json descriptor_json(const LatticeDescriptor& d);
// Throws Error(InvalidDescriptor) with a field path; also runs validate().
LatticeDescriptor descriptor_from_json(const Json& j);
// Throws Error(Parse) on malformed JSON text.
LatticeDescriptor parse_descriptor(const std::string& text);

Json abelian_json(const AbelianInvariants& a);
Json measure_json(const Measure& m);
Json label_json(const GeometryLabel& l);
Json certificate_json(const Certificate& c);
Json classification_json(const Classification& c);
Json features_json(const FeatureVector& f);
Json series_json(const SeriesReport& s);
Json fingerprint_json(const CongruenceFingerprint& f);
Json verdict_json(const CompareVerdict& v);
CompareVerdict verdict_from_json(const Json& j);
Json lattice_comparison_json(const LatticeComparison& c);
Json euler_json(const EulerClass& e);
Json splitting_json(const SplittingVerdict& s);
Json luck_json(const LuckReport& r);
Json nilclass_json(const NilclassReport& r);

} // namespace geo4
