#include "geo4/geometry.hpp"

#include <array>
#include <utility>

namespace geo4 {

namespace {

constexpr std::array<std::pair<Geometry, const char*>, 22> kNames{{
    {Geometry::E4, "E4"},
    {Geometry::Nil3xE, "Nil3_x_E"},
    {Geometry::Nil4, "Nil4"},
    {Geometry::Sol4mn, "Sol4_{m,n}"},
    {Geometry::Sol4_0, "Sol4_0"},
    {Geometry::Sol4_1, "Sol4_1"},
    {Geometry::Sol3xE, "Sol3_x_E"},
    {Geometry::S3xE, "S3_x_E"},
    {Geometry::S2xE2, "S2_x_E2"},
    {Geometry::H3xE, "H3_x_E"},
    {Geometry::SL2xE, "SLtilde_x_E"},
    {Geometry::H2xE2, "H2_x_E2"},
    {Geometry::H2xH2, "H2_x_H2"},
    {Geometry::H2xS2, "H2_x_S2"},
    {Geometry::H4, "H4"},
    {Geometry::H2C, "H2C"},
    {Geometry::S4, "S4"},
    {Geometry::CP2, "CP2"},
    {Geometry::S2xS2, "S2_x_S2"},
    {Geometry::F4, "F4"},
    {Geometry::NonGeometric, "NonGeometric"},
    {Geometry::OutOfScope, "OutOfScope"},
}};

} // namespace

const char* geometry_name(Geometry g)
{
    for (const auto& [k, v] : kNames)
        if (k == g) return v;
    return "OutOfScope";
}

std::optional<Geometry> parse_geometry(const std::string& s)
{
    for (const auto& [k, v] : kNames)
        if (s == v) return k;
    return std::nullopt;
}

std::string GeometryLabel::to_string() const
{
    if (geometry == Geometry::Sol4mn && m && n) return "Sol4_{" + m->str() + "," + n->str() + "}";
    return geometry_name(geometry);
}

GeometryLabel sol_label(const Int& m, const Int& n)
{
    GeometryLabel l;
    if (m == n) {
        l.geometry = Geometry::Sol3xE;
        return l;
    }
    l.geometry = Geometry::Sol4mn;
    l.m = m < n ? m : n;
    l.n = m < n ? n : m;
    return l;
}

Geometry effective_geometry(const GeometryLabel& l)
{
    if (l.geometry == Geometry::OutOfScope && l.asserted) return *l.asserted;
    return l.geometry;
}

bool in_excluded_set(Geometry g)
{
    return g == Geometry::H4 || g == Geometry::H2C || g == Geometry::H2xH2;
}

} // namespace geo4
