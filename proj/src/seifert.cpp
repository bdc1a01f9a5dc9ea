#include "geo4/seifert.hpp"

#include "geo4/polycyc.hpp"

namespace geo4 {

const char* base_class_name(BaseClass c)
{
    switch (c) {
    case BaseClass::Bad: return "Bad";
    case BaseClass::Spherical: return "Spherical";
    case BaseClass::Flat: return "Flat";
    case BaseClass::Hyperbolic: return "Hyperbolic";
    }
    return "Hyperbolic";
}

BaseOrbifold base_orbifold_class(const SeifertInvariants& inv)
{
    validate(inv);
    BaseOrbifold b;
    b.chi = inv.base_orientable ? Rational(2 - 2 * inv.genus) : Rational(2 - inv.genus);
    for (const auto& c : inv.cone_points) b.chi -= Rational(1) - Rational(Int(1), c.m);

    const auto& cp = inv.cone_points;
    const bool sphere = inv.base_orientable && inv.genus == 0;
    if (sphere && (cp.size() == 1 || (cp.size() == 2 && cp[0].m != cp[1].m)))
        b.kind = BaseClass::Bad;
    else if (b.chi > 0)
        b.kind = BaseClass::Spherical;
    else if (b.chi == 0)
        b.kind = BaseClass::Flat;
    else
        b.kind = BaseClass::Hyperbolic;
    return b;
}

Rational orbit_invariant(const RationalPair& v)
{
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    const Int n = lcm(denominator(v[0]), denominator(v[1]));
    const Int a = numerator(v[0]) * (n / denominator(v[0]));
    const Int b = numerator(v[1]) * (n / denominator(v[1]));
    return Rational(gcd(a, b), n);
}

EulerClass euler_number(const SeifertInvariants& inv)
{
    validate(inv);
    for (const auto& m : inv.monodromies)
        if (!m.is_identity())
            throw Error(ErrorKind::MonodromyNotTrivial, "euler number needs trivial monodromies");
    EulerClass e;
    e.value = {Rational(inv.obstruction[0]), Rational(inv.obstruction[1])};
    for (const auto& c : inv.cone_points) {
        e.value[0] += Rational(c.a, c.m);
        e.value[1] += Rational(c.b, c.m);
    }
    e.orbit_invariant = orbit_invariant(e.value);
    return e;
}

MonodromyImage monodromy_image_finite(const SeifertInvariants& inv)
{
    validate(inv);
    MonodromyImage r;
    const auto group = subgroup_closure(inv.monodromies, kGL2FiniteSubgroupBound, 2);
    if (!group) return r;
    r.finite = true;
    r.order = group->size();
    for (const auto& g : *group) {
        const auto o = matrix_order(g);
        if (o && static_cast<std::size_t>(*o) == r.order) r.cyclic = true;
    }
    return r;
}

std::optional<T2BundleOverT2> as_torus_bundle(const SeifertInvariants& inv)
{
    if (!inv.base_orientable || inv.genus != 1 || !inv.cone_points.empty()) return std::nullopt;
    T2BundleOverT2 t;
    t.a = inv.monodromies.empty() ? IntMatrix::identity(2) : inv.monodromies[0];
    t.b = inv.monodromies.empty() ? IntMatrix::identity(2) : inv.monodromies[1];
    t.obstruction = inv.obstruction;
    return t;
}

namespace {

bool is_unipotent(const IntMatrix& a)
{
    return (a - IntMatrix::identity(a.rows())).power(static_cast<long long>(a.rows())).is_zero();
}

} // namespace

FlatVerdict classify_torus_bundle_over_torus(const T2BundleOverT2& d)
{
    validate(LatticeDescriptor{d});
    FlatVerdict v;
    std::optional<int> k;
    for (int c : {1, 2, 3, 4, 6, 12})
        if (is_unipotent(d.a.power(c)) && is_unipotent(d.b.power(c))) {
            k = c;
            break;
        }
    if (!k) {
        v.label.geometry = Geometry::Sol3xE;
        return v;
    }
    // sub-bundle generated by the fibre, s^k and t^k
    const PolycyclicPresentation p = build_presentation(d);
    const ExpVec c = p.commutator(p.power(p.generator(3), *k), p.power(p.generator(2), *k));
    const T2BundleOverT2 sub{d.a.power(*k), d.b.power(*k), {Int(c[0]), Int(c[1])}};
    const SeriesReport r = lower_central_series(sub);
    if (!r.length) throw Error(ErrorKind::NotNilpotent, "unipotent sub-bundle is not nilpotent");
    v.virtual_class = *r.length;
    v.index = *k;
    switch (*r.length) {
    case 1: v.label.geometry = Geometry::E4; break;
    case 2: v.label.geometry = Geometry::Nil3xE; break;
    default: v.label.geometry = Geometry::Nil4; break;
    }
    return v;
}

GeometryLabel classify_seifert(const SeifertInvariants& inv)
{
    const BaseOrbifold base = base_orbifold_class(inv);
    GeometryLabel l;
    switch (base.kind) {
    case BaseClass::Hyperbolic: {
        if (!inv.base_orientable)
            throw Error(ErrorKind::UnsupportedBase, "hyperbolic base must be orientable");
        bool trivial = true;
        for (const auto& m : inv.monodromies) trivial = trivial && m.is_identity();
        if (trivial) {
            l.geometry = euler_number(inv).orbit_invariant == 0 ? Geometry::H2xE2 : Geometry::SL2xE;
            return l;
        }
        const MonodromyImage img = monodromy_image_finite(inv);
        l.geometry = img.finite && img.cyclic ? Geometry::H2xE2 : Geometry::NonGeometric;
        return l;
    }
    case BaseClass::Flat: {
        if (auto t = as_torus_bundle(inv)) return classify_torus_bundle_over_torus(*t).label;
        throw Error(ErrorKind::UnsupportedFlatBase, "flat base other than the torus without cone points");
    }
    case BaseClass::Spherical:
    case BaseClass::Bad: {
        for (const auto& m : inv.monodromies)
            if (!m.is_identity())
                throw Error(ErrorKind::UnsupportedBase, "spherical or bad base with nontrivial monodromy");
        l.geometry = euler_number(inv).orbit_invariant != 0 ? Geometry::S3xE : Geometry::S2xE2;
        return l;
    }
    }
    return l;
}

} // namespace geo4
