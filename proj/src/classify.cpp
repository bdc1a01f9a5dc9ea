#include "geo4/classify.hpp"

#include "geo4/seifert.hpp"

namespace geo4 {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

bool is_unipotent(const IntMatrix& a)
{
    return (a - IntMatrix::identity(a.rows())).power(static_cast<long long>(a.rows())).is_zero();
}

std::optional<int> unipotent_power(const IntMatrix& a)
{
    for (int k : {1, 2, 3, 4, 6, 12})
        if (is_unipotent(a.power(k))) return k;
    return std::nullopt;
}

int unipotency_degree(const IntMatrix& a)
{
    const IntMatrix u = a - IntMatrix::identity(a.rows());
    IntMatrix p = IntMatrix::identity(a.rows());
    int k = 0;
    while (!p.is_zero()) {
        p = p * u;
        ++k;
    }
    return k;
}

int factor_dimension(const Factor& f)
{
    switch (f.kind) {
    case FactorKind::Circle: return 1;
    case FactorKind::Hyperbolic3: return 3;
    default: return 2;
    }
}

Int factor_euler_char(const Factor& f)
{
    switch (f.kind) {
    case FactorKind::Surface: return 2 - 2 * f.genus;
    case FactorKind::Sphere2: return 2;
    default: return 0;
    }
}

bool has(const ProductLattice& p, FactorKind a, FactorKind b)
{
    return (p.first.kind == a && p.second.kind == b) || (p.first.kind == b && p.second.kind == a);
}

Measure series_measure(const LatticeDescriptor& d, bool derived)
{
    const char* infinite = derived ? "NotSolvable" : "Infinite";
    try {
        const SeriesReport r = derived ? derived_series(d) : lower_central_series(d);
        return r.length ? Measure::of(*r.length) : Measure::none(infinite);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotPolycyclic) return Measure::none(infinite);
        if (e.kind() == ErrorKind::Unsupported) return Measure::none("Unknown");
        throw;
    }
}

Measure hirsch_measure(const LatticeDescriptor& d)
{
    try {
        const auto h = hirsch_length(d);
        return h ? Measure::of(*h) : Measure::none("NotPolycyclic");
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Unsupported) return Measure::none("Unknown");
        throw;
    }
}

Measure class_from_nilradical(const Nilradical& n)
{
    using K = Nilradical::Kind;
    switch (n.kind) {
    case K::WholeGroup:
    case K::FiniteIndexNilpotent: return Measure::of(n.nil_class);
    case K::FreeAbelian: return n.rank_or_q == 4 ? Measure::of(1) : Measure::none("Infinite");
    default: return Measure::none("Infinite");
    }
}

std::optional<SeifertInvariants> trivial_monodromy(const SeifertInvariants& s)
{
    for (const auto& m : s.monodromies)
        if (!m.is_identity()) return std::nullopt;
    return s;
}

void flat_features(FeatureVector& f, const T2BundleOverT2& t)
{
    const FlatVerdict v = classify_torus_bundle_over_torus(t);
    if (v.virtual_class) {
        f.virtual_nilpotent_class = Measure::of(*v.virtual_class);
        if (!f.nilradical)
            f.nilradical = v.index == 1 ? Nilradical{Nilradical::Kind::WholeGroup, 0, *v.virtual_class, 1}
                                        : Nilradical{Nilradical::Kind::FiniteIndexNilpotent, 0, *v.virtual_class, v.index};
        if (*v.virtual_class == 1) f.virtually = VirtualTag::Z4;
    } else {
        f.virtual_nilpotent_class = Measure::none("Infinite");
    }
}

} // namespace

const char* virtual_tag_name(VirtualTag t)
{
    switch (t) {
    case VirtualTag::Z: return "Z";
    case VirtualTag::Z2: return "Z2";
    case VirtualTag::Z4: return "Z4";
    case VirtualTag::SurfaceGroup: return "SurfaceGroup";
    case VirtualTag::SurfaceTimesZ2: return "SurfaceTimesZ2";
    case VirtualTag::SurfaceTimesSurface: return "SurfaceTimesSurface";
    case VirtualTag::Hyp3TimesZ: return "Hyp3TimesZ";
    case VirtualTag::None: return "None";
    }
    return "None";
}

const char* label_verdict_name(LabelVerdict v)
{
    switch (v) {
    case LabelVerdict::Distinguished: return "Distinguished";
    case LabelVerdict::SameGeometry: return "SameGeometry";
    case LabelVerdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

FeatureVector features(const LatticeDescriptor& d)
{
    validate(d);
    FeatureVector f;
    f.hirsch_length = hirsch_measure(d);
    f.nilpotent_class = series_measure(d, false);
    f.solvable_length = series_measure(d, true);
    try {
        f.nilradical = nilradical_descriptor(d);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Unsupported) throw;
    }
    try {
        f.beta1 = Measure::of(abelianization(d).free_rank);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Unsupported) throw;
        f.beta1 = Measure::none("Unknown");
    }
    f.euler_char = Measure::of(0);
    f.virtual_nilpotent_class = Measure::none("Unknown");

    std::visit(
        overloaded{
            [&](const TorusBundle4& t) {
                f.cubic_profile = cubic_profile(t.a.determinant() == -1 ? t.a * t.a : t.a);
                f.virtual_nilpotent_class = class_from_nilradical(*f.nilradical);
                if (f.virtual_nilpotent_class.value == 1) f.virtually = VirtualTag::Z4;
            },
            [&](const GammaQLattice&) { f.virtual_nilpotent_class = Measure::of(2); },
            [&](const GammaQExtension&) { f.virtual_nilpotent_class = class_from_nilradical(*f.nilradical); },
            [&](const T2BundleOverT2& t) { flat_features(f, t); },
            [&](const SeifertInvariants& s) {
                if (const auto triv = trivial_monodromy(s)) f.euler_orbit = euler_number(*triv).orbit_invariant;
                const BaseOrbifold base = base_orbifold_class(s);
                switch (base.kind) {
                case BaseClass::Hyperbolic: {
                    f.virtual_nilpotent_class = Measure::none("Infinite");
                    const MonodromyImage img = monodromy_image_finite(s);
                    const bool product_like = f.euler_orbit ? *f.euler_orbit == 0 : img.finite && img.cyclic;
                    if (product_like) f.virtually = VirtualTag::SurfaceTimesZ2;
                    break;
                }
                case BaseClass::Flat:
                    if (const auto t = as_torus_bundle(s)) flat_features(f, *t);
                    break;
                default:
                    if (f.euler_orbit) {
                        f.virtual_nilpotent_class = Measure::of(1);
                        f.virtually = *f.euler_orbit != 0 ? VirtualTag::Z : VirtualTag::Z2;
                    }
                    break;
                }
            },
            [&](const ProductLattice& p) {
                f.euler_char = Measure::of(factor_euler_char(p.first) * factor_euler_char(p.second));
                const bool hyperbolic = p.first.kind == FactorKind::Surface || p.second.kind == FactorKind::Surface ||
                                        p.first.kind == FactorKind::Hyperbolic3 || p.second.kind == FactorKind::Hyperbolic3;
                f.virtual_nilpotent_class = hyperbolic ? Measure::none("Infinite") : f.nilpotent_class;
                if (has(p, FactorKind::Surface, FactorKind::Surface))
                    f.virtually = VirtualTag::SurfaceTimesSurface;
                else if (has(p, FactorKind::Surface, FactorKind::Torus2))
                    f.virtually = VirtualTag::SurfaceTimesZ2;
                else if (has(p, FactorKind::Surface, FactorKind::Sphere2))
                    f.virtually = VirtualTag::SurfaceGroup;
                else if (has(p, FactorKind::Hyperbolic3, FactorKind::Circle))
                    f.virtually = VirtualTag::Hyp3TimesZ;
                else if (has(p, FactorKind::Torus2, FactorKind::Torus2))
                    f.virtually = VirtualTag::Z4;
                else if (has(p, FactorKind::Torus2, FactorKind::Sphere2))
                    f.virtually = VirtualTag::Z2;
            },
            [&](const OpaqueLattice& o) {
                switch (o.geometry) {
                case OpaqueGeometry::S4: f.euler_char = Measure::of(2); break;
                case OpaqueGeometry::CP2: f.euler_char = Measure::of(3); break;
                case OpaqueGeometry::S2xS2: f.euler_char = Measure::of(4); break;
                default: f.euler_char = Measure::none("Unknown"); break;
                }
                const bool simply_connected = f.euler_char.value.has_value();
                f.virtual_nilpotent_class = simply_connected ? Measure::of(0) : Measure::none("Infinite");
                if (simply_connected) f.beta1 = Measure::of(0);
            },
        },
        d);
    return f;
}

namespace {

void add(Certificate& c, std::string name, std::string value)
{
    c.invariants.push_back({std::move(name), std::move(value)});
}

GeometryLabel classify_torus(const TorusBundle4& t, Certificate& c)
{
    GeometryLabel l;
    add(c, "charpoly", charpoly(t.a).to_string());
    add(c, "det", t.a.determinant().str());
    if (const auto k = unipotent_power(t.a)) {
        const int deg = unipotency_degree(t.a.power(*k));
        add(c, "unipotentPower", std::to_string(*k));
        add(c, "unipotencyDegree", std::to_string(deg));
        l.geometry = deg <= 1 ? Geometry::E4 : deg == 2 ? Geometry::Nil3xE : Geometry::Nil4;
        c.anchors.push_back(deg <= 1   ? "virtually Z^4: flat dictionary entry"
                            : deg == 2 ? "virtually nilpotent of class 2: Nil3 x E"
                                       : "virtually nilpotent of class 3: Nil4");
        if (*k > 1) c.notes.push_back("monodromy has finite-order semisimple part; label read from A^" + std::to_string(*k));
        return l;
    }
    const bool reversing = t.a.determinant() == -1;
    const CubicProfile p = cubic_profile(reversing ? t.a * t.a : t.a);
    if (reversing) c.notes.push_back("det A = -1: cubic profile taken from A^2");
    add(c, "cubicProfile", cubic_kind_name(p.kind));
    add(c, "discriminant", p.discriminant.str());
    add(c, "trace", p.trace.str());
    add(c, "traceInverse", p.trace_inverse.str());
    const IntMatrix a2 = t.a * t.a;
    const Int tr2 = a2.trace(), tr2inv = a2.inverse().trace();
    add(c, "traceSquare", tr2.str());
    add(c, "traceInverseSquare", tr2inv.str());
    switch (p.kind) {
    case CubicKind::ThreeDistinctRealAllPositive:
        if (reversing) {
            l = sol_label(tr2, tr2inv);
            c.anchors.push_back("three real eigenvalues, not all positive: (m,n) = (tr A^2, tr A^-2)");
            break;
        }
        l = sol_label(p.trace, p.trace_inverse);
        c.anchors.push_back("three positive real eigenvalues: (m,n) = (tr A, tr A^-1)");
        break;
    case CubicKind::ThreeDistinctRealNotAllPositive:
        l = sol_label(tr2, tr2inv);
        c.anchors.push_back("three real eigenvalues, not all positive: (m,n) = (tr A^2, tr A^-2)");
        break;
    case CubicKind::HasRootOneTwoOtherReal:
        l.geometry = Geometry::Sol3xE;
        c.anchors.push_back("exactly one eigenvalue equal to 1: Sol3 x E");
        break;
    case CubicKind::OneRealTwoComplexConjugate:
        l.geometry = Geometry::Sol4_0;
        c.anchors.push_back("a pair of complex conjugate eigenvalues: Sol4_0");
        break;
    default: throw std::logic_error("repeated eigenvalue without quasi-unipotence");
    }
    if (l.geometry == Geometry::Sol3xE && p.kind != CubicKind::HasRootOneTwoOtherReal)
        c.anchors.push_back("m = n: Sol4_{m,m} is Sol3 x E");
    if (l.m) {
        c.parameters = {{"m", *l.m}, {"n", *l.n}};
        if (*l.m * *l.m < 4 * *l.n) c.notes.push_back("normalised (m,n) violates 2 sqrt(n) <= m");
    }
    return l;
}

GeometryLabel classify_extension(const GammaQExtension& g, Certificate& c)
{
    GeometryLabel l;
    const auto order = matrix_order(g.c);
    add(c, "orderC", order ? std::to_string(*order) : "infinite");
    add(c, "traceC", g.c.trace().str());
    add(c, "detC", g.c.determinant().str());
    add(c, "q", g.q.str());
    if (order) {
        l.geometry = Geometry::Nil3xE;
        c.anchors.push_back("C of finite order: Nil3 x E");
    } else if (g.c.determinant() == 1 && abs(g.c.trace()) == 2) {
        l.geometry = Geometry::Nil4;
        c.anchors.push_back("C of infinite order with eigenvalues +-1: Nil4");
    } else {
        l.geometry = Geometry::Sol4_1;
        l.q = g.q;
        c.parameters = {{"q", g.q}};
        c.anchors.push_back("C of infinite order with distinct eigenvalues other than +-1: Sol4_1");
    }
    return l;
}

GeometryLabel classify_flat(const T2BundleOverT2& t, Certificate& c)
{
    const FlatVerdict v = classify_torus_bundle_over_torus(t);
    add(c, "virtualNilpotentClass", v.virtual_class ? std::to_string(*v.virtual_class) : "Infinite");
    add(c, "unipotentPower", v.virtual_class ? std::to_string(v.index) : "none");
    c.anchors.push_back(v.virtual_class ? "flat base: nilpotent class of the unipotent sub-bundle decides E4 / Nil3 x E / Nil4"
                                        : "flat base: solvable, not virtually nilpotent: Sol3 x E");
    return v.label;
}

GeometryLabel classify_seifert_cert(const SeifertInvariants& s, Certificate& c)
{
    const BaseOrbifold base = base_orbifold_class(s);
    add(c, "baseOrbifold", base_class_name(base.kind));
    add(c, "orbifoldEulerCharacteristic", to_string(base.chi));
    if (base.kind == BaseClass::Flat) {
        if (const auto t = as_torus_bundle(s)) return classify_flat(*t, c);
    }
    const GeometryLabel l = classify_seifert(s);
    if (base.kind == BaseClass::Hyperbolic) {
        const MonodromyImage img = monodromy_image_finite(s);
        add(c, "monodromyImage", img.finite ? "Finite(" + std::to_string(img.order) + (img.cyclic ? ", cyclic)" : ")") : "Infinite");
    }
    if (const auto triv = trivial_monodromy(s)) {
        const EulerClass e = euler_number(*triv);
        add(c, "eulerNumber", "(" + to_string(e.value[0]) + ", " + to_string(e.value[1]) + ")");
        add(c, "orbitInvariant", to_string(e.orbit_invariant));
    }
    switch (l.geometry) {
    case Geometry::H2xE2: c.anchors.push_back("hyperbolic base, monodromy powers of one periodic matrix, zero euler number: H2 x E2"); break;
    case Geometry::SL2xE: c.anchors.push_back("hyperbolic base, trivial monodromy, nonzero euler number: SL2 x E"); break;
    case Geometry::NonGeometric: c.anchors.push_back("hyperbolic base, monodromy image not finite cyclic: not geometric"); break;
    default: {
        c.anchors.push_back("spherical or bad base: virtually Z or Z^2");
        c.notes.push_back("convention: nonzero orbit invariant gives S3 x E, zero gives S2 x E2");
        const auto h1 = abelianization(LatticeDescriptor{s});
        add(c, "beta1", std::to_string(h1.free_rank));
        const std::size_t expected = l.geometry == Geometry::S3xE ? 1 : 2;
        if (h1.free_rank != expected)
            c.notes.push_back("beta1 = " + std::to_string(h1.free_rank) + " does not match the virtual rank " +
                              std::to_string(expected));
        break;
    }
    }
    return l;
}

GeometryLabel classify_product(const ProductLattice& p, Certificate& c)
{
    GeometryLabel l;
    const int dim = factor_dimension(p.first) + factor_dimension(p.second);
    add(c, "factors", std::string(factor_kind_name(p.first.kind)) + " x " + factor_kind_name(p.second.kind));
    add(c, "dimension", std::to_string(dim));
    if (dim != 4) {
        c.notes.push_back("product is not four-dimensional");
        return l;
    }
    if (has(p, FactorKind::Surface, FactorKind::Torus2))
        l.geometry = Geometry::H2xE2;
    else if (has(p, FactorKind::Surface, FactorKind::Surface))
        l.geometry = Geometry::H2xH2;
    else if (has(p, FactorKind::Surface, FactorKind::Sphere2))
        l.geometry = Geometry::H2xS2;
    else if (has(p, FactorKind::Hyperbolic3, FactorKind::Circle))
        l.geometry = Geometry::H3xE;
    else if (has(p, FactorKind::Torus2, FactorKind::Torus2))
        l.geometry = Geometry::E4;
    else if (has(p, FactorKind::Torus2, FactorKind::Sphere2))
        l.geometry = Geometry::S2xE2;
    else
        l.geometry = Geometry::S2xS2;
    if (l.geometry == Geometry::H2xH2) {
        add(c, "eulerChar", (factor_euler_char(p.first) * factor_euler_char(p.second)).str());
        c.notes.push_back("reducible H2 x H2 lattice");
    }
    c.anchors.push_back("product of factor geometries");
    return l;
}

GeometryLabel classify_opaque(const OpaqueLattice& o, Certificate& c)
{
    GeometryLabel l;
    add(c, "assertedGeometry", opaque_geometry_name(o.geometry));
    switch (o.geometry) {
    case OpaqueGeometry::H4: l.asserted = Geometry::H4; break;
    case OpaqueGeometry::H2C: l.asserted = Geometry::H2C; break;
    case OpaqueGeometry::H2xH2Irreducible: l.asserted = Geometry::H2xH2; break;
    case OpaqueGeometry::S4: l.geometry = Geometry::S4; break;
    case OpaqueGeometry::CP2: l.geometry = Geometry::CP2; break;
    case OpaqueGeometry::S2xS2: l.geometry = Geometry::S2xS2; break;
    }
    if (l.asserted)
        c.notes.push_back("no recognition for this geometry; label kept as asserted only");
    else
        c.notes.push_back("simply connected model geometry taken from the descriptor");
    return l;
}

} // namespace

Classification classify(const LatticeDescriptor& d)
{
    validate(d);
    Classification out;
    Certificate& c = out.certificate;
    out.label = std::visit(
        overloaded{
            [&](const TorusBundle4& t) { return classify_torus(t, c); },
            [&](const GammaQLattice&) {
                c.notes.push_back("Gamma_q is three-dimensional");
                return GeometryLabel{};
            },
            [&](const GammaQExtension& g) { return classify_extension(g, c); },
            [&](const T2BundleOverT2& t) { return classify_flat(t, c); },
            [&](const SeifertInvariants& s) { return classify_seifert_cert(s, c); },
            [&](const ProductLattice& p) { return classify_product(p, c); },
            [&](const OpaqueLattice& o) { return classify_opaque(o, c); },
        },
        d);
    c.label = out.label;
    return out;
}

bool same_geometry(const GeometryLabel& a, const GeometryLabel& b)
{
    if (effective_geometry(a) != effective_geometry(b)) return false;
    return a.geometry != Geometry::Sol4mn || (a.m == b.m && a.n == b.n);
}

namespace {

std::string separating_invariant(const FeatureVector& a, const FeatureVector& b)
{
    if (a.hirsch_length != b.hirsch_length) return "hirschLength";
    if (a.virtual_nilpotent_class != b.virtual_nilpotent_class) return "virtualNilpotentClass";
    if (a.solvable_length != b.solvable_length) return "solvableLength";
    if (a.cubic_profile && b.cubic_profile && a.cubic_profile->kind != b.cubic_profile->kind) return "cubicProfile";
    if (a.cubic_profile && b.cubic_profile) return "characteristicPolynomial";
    if (a.virtually != b.virtually) return "virtuallyTag";
    if (a.euler_char != b.euler_char) return "eulerChar";
    if (a.euler_orbit != b.euler_orbit) return "eulerOrbit";
    return "geometry";
}

bool hyperbolic_seifert(const LatticeDescriptor& d)
{
    const auto* s = std::get_if<SeifertInvariants>(&d);
    return s && base_orbifold_class(*s).kind == BaseClass::Hyperbolic;
}

} // namespace

LabelComparison compare_labels(const LatticeDescriptor& d1, const LatticeDescriptor& d2)
{
    LabelComparison r;
    r.first = classify(d1).label;
    r.second = classify(d2).label;
    const Geometry g1 = effective_geometry(r.first), g2 = effective_geometry(r.second);
    const auto opaque = [](const GeometryLabel& l) {
        return l.geometry == Geometry::OutOfScope && !l.asserted;
    };
    if (opaque(r.first) || opaque(r.second)) {
        r.reason = "a lattice outside the four-dimensional geometric families";
        return r;
    }
    const bool ng1 = g1 == Geometry::NonGeometric, ng2 = g2 == Geometry::NonGeometric;
    if (ng1 || ng2) {
        if (ng1 != ng2 && hyperbolic_seifert(d1) && hyperbolic_seifert(d2)) {
            r.verdict = LabelVerdict::Distinguished;
            r.reason = "geometricity over a hyperbolic base";
        } else {
            r.reason = "a non-geometric lattice";
        }
        return r;
    }
    if (same_geometry(r.first, r.second)) {
        r.verdict = LabelVerdict::SameGeometry;
        r.reason = geometry_name(g1);
        return r;
    }
    if (in_excluded_set(g1) && in_excluded_set(g2)) {
        r.reason = "both geometries lie in {H4, H2C, H2 x H2}";
        return r;
    }
    r.verdict = LabelVerdict::Distinguished;
    r.reason = separating_invariant(features(d1), features(d2));
    return r;
}

} // namespace geo4
