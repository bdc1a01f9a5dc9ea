#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "geo4/exactalg.hpp"

namespace geo4 {

using IntPair = std::array<Int, 2>;

// Z^3 semidirect Z, with t v t^-1 = A v on column vectors.
struct TorusBundle4 {
    IntMatrix a;
    bool operator==(const TorusBundle4&) const = default;
};

// <x,y,z | xz=zx, yz=zy, xy=z^q yx>. Three-dimensional; usable in series
// and quotient computations but not a 4-manifold group.
struct GammaQLattice {
    Int q;
    bool operator==(const GammaQLattice&) const = default;
};

// Gamma_q semidirect Z where t g t^-1 = phi(g) with
// phi(x) = x^c11 y^c12 z^mu1, phi(y) = x^c21 y^c22 z^mu2, phi(z) = z^det(C).
struct GammaQExtension {
    Int q;
    IntMatrix c;
    IntPair mu;
    bool operator==(const GammaQExtension&) const = default;
};

// Fibre F = <l,h> = Z^2; s and t act on F by A and B; [s,t] = s t s^-1 t^-1 = l^m h^n.
struct T2BundleOverT2 {
    IntMatrix a;
    IntMatrix b;
    IntPair obstruction;
    bool operator==(const T2BundleOverT2&) const = default;
};

struct ConePoint {
    Int m;
    Int a;
    Int b;
    bool operator==(const ConePoint&) const = default;
};

// Orientable base: monodromies are A_1, B_1, ..., A_g, B_g (or empty for all
// trivial). Non-orientable base of genus g': A'_1, ..., A'_g' (or empty).
struct SeifertInvariants {
    bool base_orientable = true;
    int genus = 0;
    std::vector<IntMatrix> monodromies;
    std::vector<ConePoint> cone_points;
    IntPair obstruction{0, 0};
    bool operator==(const SeifertInvariants&) const = default;
};

enum class FactorKind { Surface, Torus2, Circle, Sphere2, Hyperbolic3 };

struct Factor {
    FactorKind kind = FactorKind::Circle;
    int genus = 0;   // Surface only
    std::string tag; // Hyperbolic3 only: opaque name
    bool operator==(const Factor&) const = default;
};

struct ProductLattice {
    Factor first;
    Factor second;
    bool operator==(const ProductLattice&) const = default;
};

// Lattices whose geometry is asserted by the user and never recognised.
enum class OpaqueGeometry { H4, H2C, H2xH2Irreducible, S4, CP2, S2xS2 };

struct OpaqueLattice {
    OpaqueGeometry geometry = OpaqueGeometry::H4;
    std::string tag;
    bool operator==(const OpaqueLattice&) const = default;
};

using LatticeDescriptor = std::variant<TorusBundle4, GammaQLattice, GammaQExtension, T2BundleOverT2,
                                       SeifertInvariants, ProductLattice, OpaqueLattice>;

// JSON kind string: torus_bundle_4, gamma_q, gamma_q_extension,
// t2_bundle_over_t2, seifert, product, opaque_lattice.
std::string kind_name(const LatticeDescriptor& d);

const char* factor_kind_name(FactorKind k);
const char* opaque_geometry_name(OpaqueGeometry g);

// Throws Error(InvalidDescriptor) with a field path on the first violation.
void validate(const LatticeDescriptor& d);
void validate(const SeifertInvariants& inv);

bool is_unimodular(const IntMatrix& m);

} // namespace geo4
