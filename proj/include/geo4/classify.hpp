#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geo4/descriptor.hpp"
#include "geo4/geometry.hpp"
#include "geo4/polycyc.hpp"

namespace geo4 {

// An integer feature, or the reason it has none: "Infinite", "NotSolvable",
// "NotPolycyclic" or "Unknown" (not computed for this family).
struct Measure {
    std::optional<Int> value;
    std::string status;

    static Measure of(const Int& v) { return {v, {}}; }
    static Measure none(std::string why) { return {std::nullopt, std::move(why)}; }
    bool operator==(const Measure&) const = default;
    std::string to_string() const { return value ? value->str() : status; }
};

enum class VirtualTag { Z, Z2, Z4, SurfaceGroup, SurfaceTimesZ2, SurfaceTimesSurface, Hyp3TimesZ, None };
const char* virtual_tag_name(VirtualTag t);

struct FeatureVector {
    Measure hirsch_length;
    Measure nilpotent_class;
    Measure solvable_length;
    // class of the canonical finite-index nilpotent subgroup, when there is one
    Measure virtual_nilpotent_class;
    std::optional<Nilradical> nilradical;
    Measure beta1;
    Measure euler_char;
    std::optional<CubicProfile> cubic_profile;
    std::optional<Rational> euler_orbit;
    VirtualTag virtually = VirtualTag::None;
};

FeatureVector features(const LatticeDescriptor& d);

struct CertificateEntry {
    std::string name;
    std::string value;
};

struct Certificate {
    GeometryLabel label;
    std::vector<std::pair<std::string, Int>> parameters;
    std::vector<CertificateEntry> invariants;
    std::vector<std::string> anchors; // which dictionary clause decided the label
    std::vector<std::string> notes;   // conventions and warnings
};

struct Classification {
    GeometryLabel label;
    Certificate certificate;
};

Classification classify(const LatticeDescriptor& d);

enum class LabelVerdict { Distinguished, SameGeometry, Inconclusive };
const char* label_verdict_name(LabelVerdict v);

struct LabelComparison {
    LabelVerdict verdict = LabelVerdict::Inconclusive;
    GeometryLabel first, second;
    std::string reason; // separating invariant, or why nothing can be said
};

// Geometry equality; the Sol4_1 lattice parameter q is not part of it.
bool same_geometry(const GeometryLabel& a, const GeometryLabel& b);

LabelComparison compare_labels(const LatticeDescriptor& d1, const LatticeDescriptor& d2);

} // namespace geo4
