#pragma once

#include <optional>
#include <string>

#include "geo4/exactalg.hpp"

namespace geo4 {

enum class Geometry {
    E4,
    Nil3xE,
    Nil4,
    Sol4mn,
    Sol4_0,
    Sol4_1,
    Sol3xE,
    S3xE,
    S2xE2,
    H3xE,
    SL2xE,
    H2xE2,
    H2xH2,
    H2xS2,
    H4,
    H2C,
    S4,
    CP2,
    S2xS2,
    F4,
    NonGeometric,
    OutOfScope,
};

// Stable label strings: E4, Nil3_x_E, Nil4, Sol4_{m,n}, Sol4_0, Sol4_1,
// Sol3_x_E, S3_x_E, S2_x_E2, H3_x_E, SLtilde_x_E, H2_x_E2, H2_x_H2, H2_x_S2,
// H4, H2C, S4, CP2, S2_x_S2, F4, NonGeometric, OutOfScope.
const char* geometry_name(Geometry g);
std::optional<Geometry> parse_geometry(const std::string& s);

struct GeometryLabel {
    Geometry geometry = Geometry::OutOfScope;
    std::optional<Int> m, n;           // Sol4_{m,n}, m <= n
    std::optional<Int> q;              // Sol4_1
    std::optional<Geometry> asserted;  // OutOfScope: the geometry the descriptor claims

    bool operator==(const GeometryLabel&) const = default;
    // "Sol4_{5,6}" for the parametrised family, otherwise the geometry name.
    std::string to_string() const;
};

// Sol4_{m,n} normalised to m <= n; m = n becomes Sol3 x E.
GeometryLabel sol_label(const Int& m, const Int& n);

// The geometry a label stands for when comparing lattices: the asserted one
// for OutOfScope labels.
Geometry effective_geometry(const GeometryLabel& l);

// H4, H2C and H2xH2: pairs inside this set are never separated.
bool in_excluded_set(Geometry g);

} // namespace geo4
