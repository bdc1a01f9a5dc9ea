#include "geo4/descriptor.hpp"

namespace geo4 {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw Error(ErrorKind::InvalidDescriptor, path + ": " + what, path);
}

void require_square(const IntMatrix& m, std::size_t n, const std::string& path)
{
    if (m.rows() != n || m.cols() != n)
        fail(path, "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
}

void require_unimodular(const IntMatrix& m, const std::string& path)
{
    if (!is_unimodular(m)) fail(path, "determinant must be +1 or -1, got " + m.determinant().str());
}

IntMatrix commutator(const IntMatrix& a, const IntMatrix& b)
{
    return a * b * a.inverse() * b.inverse();
}

} // namespace

bool is_unimodular(const IntMatrix& m)
{
    if (!m.is_square() || m.rows() == 0) return false;
    const Int d = m.determinant();
    return d == 1 || d == -1;
}

const char* factor_kind_name(FactorKind k)
{
    switch (k) {
    case FactorKind::Surface: return "surface";
    case FactorKind::Torus2: return "torus2";
    case FactorKind::Circle: return "circle";
    case FactorKind::Sphere2: return "sphere2";
    case FactorKind::Hyperbolic3: return "hyperbolic3";
    }
    return "circle";
}

const char* opaque_geometry_name(OpaqueGeometry g)
{
    switch (g) {
    case OpaqueGeometry::H4: return "H4";
    case OpaqueGeometry::H2C: return "H2C";
    case OpaqueGeometry::H2xH2Irreducible: return "H2xH2_irreducible";
    case OpaqueGeometry::S4: return "S4";
    case OpaqueGeometry::CP2: return "CP2";
    case OpaqueGeometry::S2xS2: return "S2xS2";
    }
    return "H4";
}

std::string kind_name(const LatticeDescriptor& d)
{
    return std::visit(overloaded{
                          [](const TorusBundle4&) { return std::string("torus_bundle_4"); },
                          [](const GammaQLattice&) { return std::string("gamma_q"); },
                          [](const GammaQExtension&) { return std::string("gamma_q_extension"); },
                          [](const T2BundleOverT2&) { return std::string("t2_bundle_over_t2"); },
                          [](const SeifertInvariants&) { return std::string("seifert"); },
                          [](const ProductLattice&) { return std::string("product"); },
                          [](const OpaqueLattice&) { return std::string("opaque_lattice"); },
                      },
                      d);
}

void validate(const SeifertInvariants& inv)
{
    if (inv.genus < 0) fail("payload.genus", "must be non-negative");
    if (!inv.base_orientable && inv.genus < 1) fail("payload.genus", "non-orientable genus must be at least 1");
    const std::size_t expected = inv.base_orientable ? 2 * static_cast<std::size_t>(inv.genus)
                                                     : static_cast<std::size_t>(inv.genus);
    if (!inv.monodromies.empty() && inv.monodromies.size() != expected)
        fail("payload.monodromies", "expected " + std::to_string(expected) + " matrices (or none), got " +
                                        std::to_string(inv.monodromies.size()));
    for (std::size_t i = 0; i < inv.monodromies.size(); ++i) {
        const std::string path = "payload.monodromies[" + std::to_string(i) + "]";
        require_square(inv.monodromies[i], 2, path);
        const Int d = inv.monodromies[i].determinant();
        if (inv.base_orientable && d != 1) fail(path, "orientable-base monodromy must lie in SL(2,Z)");
        if (!inv.base_orientable && d != 1 && d != -1) fail(path, "monodromy must lie in GL(2,Z)");
    }
    if (inv.base_orientable && !inv.monodromies.empty()) {
        IntMatrix prod = IntMatrix::identity(2);
        for (std::size_t i = 0; i + 1 < inv.monodromies.size(); i += 2)
            prod = prod * commutator(inv.monodromies[i], inv.monodromies[i + 1]);
        if (!prod.is_identity()) fail("payload.monodromies", "product of commutators [A_i,B_i] must be I");
    }
    for (std::size_t i = 0; i < inv.cone_points.size(); ++i) {
        const auto& c = inv.cone_points[i];
        const std::string path = "payload.conePoints[" + std::to_string(i) + "]";
        if (c.m < 2) fail(path + ".m", "cone order must be at least 2");
        if (gcd(gcd(c.m, c.a), c.b) != 1) fail(path, "gcd(m,a,b) must be 1");
    }
}

void validate(const LatticeDescriptor& d)
{
    std::visit(overloaded{
                   [](const TorusBundle4& t) {
                       require_square(t.a, 3, "payload.matrix");
                       require_unimodular(t.a, "payload.matrix");
                   },
                   [](const GammaQLattice& g) {
                       if (g.q < 2) fail("payload.q", "q must be greater than 1");
                   },
                   [](const GammaQExtension& g) {
                       if (g.q < 2) fail("payload.q", "q must be greater than 1");
                       require_square(g.c, 2, "payload.c");
                       require_unimodular(g.c, "payload.c");
                   },
                   [](const T2BundleOverT2& t) {
                       require_square(t.a, 2, "payload.a");
                       require_square(t.b, 2, "payload.b");
                       require_unimodular(t.a, "payload.a");
                       require_unimodular(t.b, "payload.b");
                       if (t.a * t.b != t.b * t.a) fail("payload", "A and B must commute");
                   },
                   [](const SeifertInvariants& s) { validate(s); },
                   [](const ProductLattice& p) {
                       for (const auto& [f, path] : {std::pair{&p.first, "payload.first"}, std::pair{&p.second, "payload.second"}}) {
                           if (f->kind == FactorKind::Surface && f->genus < 2)
                               fail(std::string(path) + ".genus", "surface factors need genus at least 2");
                       }
                   },
                   [](const OpaqueLattice&) {},
               },
               d);
}

} // namespace geo4
