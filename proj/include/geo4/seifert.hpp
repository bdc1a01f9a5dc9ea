#pragma once

#include <array>
#include <optional>

#include "geo4/descriptor.hpp"
#include "geo4/geometry.hpp"

namespace geo4 {

enum class BaseClass { Bad, Spherical, Flat, Hyperbolic };
const char* base_class_name(BaseClass c);

struct BaseOrbifold {
    BaseClass kind = BaseClass::Hyperbolic;
    Rational chi; // orbifold euler characteristic
};

BaseOrbifold base_orbifold_class(const SeifertInvariants& inv);

using RationalPair = std::array<Rational, 2>;

struct EulerClass {
    RationalPair value;
    // gcd(a,b)/N for value = (a/N, b/N); a complete GL(2,Z)-orbit invariant.
    Rational orbit_invariant;
};

// Requires trivial monodromies; throws Error(MonodromyNotTrivial) otherwise.
EulerClass euler_number(const SeifertInvariants& inv);
Rational orbit_invariant(const RationalPair& v);

struct MonodromyImage {
    bool finite = false;
    std::size_t order = 0; // when finite
    bool cyclic = false;   // when finite
};

MonodromyImage monodromy_image_finite(const SeifertInvariants& inv);

// Torus base without cone points, as a torus bundle over the torus.
std::optional<T2BundleOverT2> as_torus_bundle(const SeifertInvariants& inv);

struct FlatVerdict {
    GeometryLabel label;
    // nilpotent class of the finite-index sub-bundle with unipotent monodromy,
    // nullopt when A or B is not quasi-unipotent
    std::optional<int> virtual_class;
    int index = 1; // index of that sub-bundle's base lattice, as k for k Z^2
};

FlatVerdict classify_torus_bundle_over_torus(const T2BundleOverT2& d);

GeometryLabel classify_seifert(const SeifertInvariants& inv);

} // namespace geo4
