#include "geo4/profinite.hpp"

#include <functional>

namespace geo4 {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

void require_modulus(const Int& q)
{
    if (q < 2) throw Error(ErrorKind::InvalidArgument, "modulus must be at least 2");
}

std::vector<Int> reduce(const std::vector<Int>& v, const Int& q)
{
    std::vector<Int> r;
    for (const auto& x : v) r.push_back(mod(x, q));
    return r;
}

const IntMatrix& fingerprint_matrix(const LatticeDescriptor& d)
{
    if (const auto* t = std::get_if<TorusBundle4>(&d)) return t->a;
    if (const auto* g = std::get_if<GammaQExtension>(&d)) return g->c;
    if (const auto* t = std::get_if<T2BundleOverT2>(&d)) return t->a;
    throw Error(ErrorKind::Unsupported, "fingerprints are defined for torus bundles, Gamma_q extensions and torus bundles over the torus");
}

bool is_nilpotent(const LatticeDescriptor& d)
{
    return lower_central_series(d).length.has_value();
}

// Fingerprint fields compared in this order; a field differs when it
// disagrees with both B and B^-1.
const std::vector<std::pair<const char*, std::function<bool(const CongruenceFingerprint&, const CongruenceFingerprint&)>>>&
fingerprint_fields()
{
    static const std::vector<std::pair<const char*, std::function<bool(const CongruenceFingerprint&, const CongruenceFingerprint&)>>> f{
        {"charpolyModQ", [](const auto& x, const auto& y) { return x.charpoly_mod_q == y.charpoly_mod_q; }},
        {"tracesModQ", [](const auto& x, const auto& y) { return x.traces_mod_q == y.traces_mod_q; }},
        {"quotientAbelianization", [](const auto& x, const auto& y) { return x.quotient_abelianization == y.quotient_abelianization; }},
        {"quotientNilpotentClass", [](const auto& x, const auto& y) { return x.quotient_nilpotent_class == y.quotient_nilpotent_class; }},
    };
    return f;
}

std::string fingerprint_difference(const CongruenceFingerprint& fa, const CongruenceFingerprint& fb,
                                   const CongruenceFingerprint& fbi)
{
    for (const auto& [name, same] : fingerprint_fields())
        if (!same(fa, fb) && !same(fa, fbi)) return name;
    return "fingerprint";
}

// Coefficient index named by a charpoly invariant; -1 for the whole polynomial.
int charpoly_slot(const std::string& name)
{
    if (name == "trace") return 2;
    if (name == "trace of inverse") return 1;
    if (name == "determinant") return 0;
    return -1;
}

bool charpoly_differs(const Polynomial& pa, const Polynomial& pb, const Int& q, int slot)
{
    const auto a = reduce(pa.coeffs, q), b = reduce(pb.coeffs, q);
    return slot < 0 ? a != b : a[static_cast<std::size_t>(slot)] != b[static_cast<std::size_t>(slot)];
}

bool conjugate_somewhere(const IntMatrix& a, const IntMatrix& b, const IntMatrix& binv, long long q)
{
    return conjugate_mod_q(a, b, q).has_value() || conjugate_mod_q(a, binv, q).has_value();
}

CompareVerdict distinguished(const Int& q, std::string invariant)
{
    CompareVerdict v;
    v.kind = CompareVerdict::Kind::Distinguished;
    v.witness_modulus = q;
    v.invariant = std::move(invariant);
    return v;
}

} // namespace

CongruenceFingerprint fingerprint(const LatticeDescriptor& d, const Int& q)
{
    validate(d);
    require_modulus(q);
    const IntMatrix& m = fingerprint_matrix(d);
    CongruenceFingerprint f;
    f.modulus = q;
    f.charpoly_mod_q = reduce(charpoly(m).coeffs, q);
    const IntMatrix inv = m.inverse();
    f.traces_mod_q = reduce({m.trace(), inv.trace(), (m * m).trace(), (inv * inv).trace()}, q);
    f.quotient_abelianization = abelianization(level_quotient(d, q).presentation);
    if (is_nilpotent(d)) f.quotient_nilpotent_class = quotient_nilpotent_class(d, q);
    return f;
}

const char* verdict_kind_name(CompareVerdict::Kind k)
{
    switch (k) {
    case CompareVerdict::Kind::Distinguished: return "Distinguished";
    case CompareVerdict::Kind::ConsistentUpTo: return "ConsistentUpTo";
    case CompareVerdict::Kind::ProfinitelyIsomorphic: return "ProfinitelyIsomorphic";
    }
    return "ConsistentUpTo";
}

std::optional<IntMatrix> find_integral_conjugator(const IntMatrix& a, const IntMatrix& b, int height)
{
    const std::size_t n = a.rows();
    if (a == b) return IntMatrix::identity(n);
    const IntMatrix id = IntMatrix::identity(n);
    if (a == id * a(0, 0) || b == id * b(0, 0)) return std::nullopt; // scalar: conjugate only to itself
    if (charpoly(a) != charpoly(b)) return std::nullopt;

    // P A = B P as a linear system in the n^2 entries of P (row-major).
    IntMatrix sys(n * n, n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                sys(i * n + j, i * n + k) += a(k, j);
                sys(i * n + j, k * n + j) -= b(i, k);
            }
    const IntMatrix basis = hermite_basis(integer_kernel(sys));
    const std::size_t dim = basis.cols(), len = n * n;
    std::vector<std::size_t> pivot(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        std::size_t r = 0;
        while (basis(r, j) == 0) ++r;
        pivot[j] = r;
    }

    // Box enumeration: coordinate r depends only on columns with pivot <= r.
    IntVector x(len);
    std::optional<IntMatrix> found;
    std::function<void(std::size_t)> rec = [&](std::size_t j) {
        if (found) return;
        if (j == dim) {
            IntMatrix p(n, n);
            for (std::size_t r = 0; r < len; ++r) p(r / n, r % n) = x[r];
            const Int det = p.determinant();
            if (det == 1 || det == -1) found = p;
            return;
        }
        const Int piv = basis(pivot[j], j);
        const Int cur = x[pivot[j]];
        const Int lo = -floor_div(Int(height) + cur, piv), hi = floor_div(Int(height) - cur, piv);
        const std::size_t next_pivot = j + 1 < dim ? pivot[j + 1] : len;
        std::vector<Int> order;
        for (Int c = 0; c <= hi || -c >= lo; ++c) {
            if (c >= lo && c <= hi) order.push_back(c);
            if (c != 0 && -c >= lo && -c <= hi) order.push_back(-c);
        }
        for (const Int& c : order) {
            for (std::size_t r = 0; r < len; ++r) x[r] += c * basis(r, j);
            bool ok = true;
            for (std::size_t r = pivot[j]; r < next_pivot && ok; ++r) ok = x[r] >= -height && x[r] <= height;
            if (ok) rec(j + 1);
            for (std::size_t r = 0; r < len; ++r) x[r] -= c * basis(r, j);
            if (found) return;
        }
    };
    if (dim > 0) {
        bool ok = true;
        for (std::size_t r = 0; r < pivot[0]; ++r) ok = ok && x[r] == 0;
        if (ok) rec(0);
    }
    return found;
}

CompareVerdict compare_torus_bundles(const IntMatrix& a, const IntMatrix& b, const CompareOptions& opt)
{
    validate(TorusBundle4{a});
    validate(TorusBundle4{b});
    const IntMatrix binv = b.inverse();
    const Polynomial pa = charpoly(a), pb = charpoly(b), pbi = charpoly(binv);

    if (pa != pb && pa != pbi) {
        for (Int q = 2;; ++q) {
            if (!charpoly_differs(pa, pb, q, -1) || !charpoly_differs(pa, pbi, q, -1)) continue;
            for (const char* name : {"trace", "trace of inverse", "determinant"}) {
                const int slot = charpoly_slot(name);
                if (charpoly_differs(pa, pb, q, slot) && charpoly_differs(pa, pbi, q, slot)) return distinguished(q, name);
            }
            return distinguished(q, "characteristic polynomial");
        }
    }

    CompareVerdict iso;
    iso.kind = CompareVerdict::Kind::ProfinitelyIsomorphic;
    if (pa == pb)
        if (auto p = find_integral_conjugator(a, b, opt.height)) {
            iso.conjugator = *p;
            return iso;
        }
    if (pa == pbi)
        if (auto p = find_integral_conjugator(a, binv, opt.height)) {
            iso.conjugator = *p;
            iso.inverted = true;
            return iso;
        }

    for (const long long q : opt.conjugacy_moduli)
        if (!conjugate_somewhere(a, b, binv, q)) return distinguished(q, "mod-q conjugacy");

    const LatticeDescriptor da = TorusBundle4{a}, db = TorusBundle4{b}, dbi = TorusBundle4{binv};
    for (Int q = 2; q <= opt.bound; ++q) {
        const auto fa = fingerprint(da, q), fb = fingerprint(db, q), fbi = fingerprint(dbi, q);
        if (fa != fb && fa != fbi) return distinguished(q, fingerprint_difference(fa, fb, fbi));
    }

    CompareVerdict v;
    v.kind = CompareVerdict::Kind::ConsistentUpTo;
    v.bound = opt.bound;
    v.checked = {"characteristic polynomial", "integral conjugator search to height " + std::to_string(opt.height)};
    for (const long long q : opt.conjugacy_moduli) v.checked.push_back("conjugacy mod " + std::to_string(q));
    for (const auto& [name, same] : fingerprint_fields()) v.checked.push_back(name);
    return v;
}

bool replay(const IntMatrix& a, const IntMatrix& b, const CompareVerdict& v)
{
    const IntMatrix binv = b.inverse();
    switch (v.kind) {
    case CompareVerdict::Kind::ProfinitelyIsomorphic: {
        if (!v.conjugator) return false;
        const IntMatrix& p = *v.conjugator;
        const Int det = p.determinant();
        if (det != 1 && det != -1) return false;
        return p * a * p.inverse() == (v.inverted ? binv : b);
    }
    case CompareVerdict::Kind::Distinguished: {
        const Int& q = v.witness_modulus;
        if (q < 2) return false;
        if (v.invariant == "mod-q conjugacy") return !conjugate_somewhere(a, b, binv, static_cast<long long>(q));
        const int slot = charpoly_slot(v.invariant);
        if (slot >= 0 || v.invariant == "characteristic polynomial") {
            const Polynomial pa = charpoly(a);
            return charpoly_differs(pa, charpoly(b), q, slot) && charpoly_differs(pa, charpoly(binv), q, slot);
        }
        const auto fa = fingerprint(TorusBundle4{a}, q), fb = fingerprint(TorusBundle4{b}, q),
                   fbi = fingerprint(TorusBundle4{binv}, q);
        if (v.invariant == "fingerprint") return fa != fb && fa != fbi;
        for (const auto& [name, same] : fingerprint_fields())
            if (v.invariant == name) return !same(fa, fb) && !same(fa, fbi);
        return false;
    }
    case CompareVerdict::Kind::ConsistentUpTo: {
        for (Int q = 2; q <= v.bound; ++q) {
            const auto fa = fingerprint(TorusBundle4{a}, q);
            if (fa != fingerprint(TorusBundle4{b}, q) && fa != fingerprint(TorusBundle4{binv}, q)) return false;
        }
        return true;
    }
    }
    return false;
}

LatticeComparison compare_lattices(const LatticeDescriptor& d1, const LatticeDescriptor& d2, const CompareOptions& opt)
{
    LatticeComparison r;
    r.labels = compare_labels(d1, d2);
    r.reason = r.labels.reason;
    switch (r.labels.verdict) {
    case LabelVerdict::Distinguished: r.verdict = "Distinguished"; return r;
    case LabelVerdict::Inconclusive: r.verdict = "Inconclusive"; return r;
    case LabelVerdict::SameGeometry: break;
    }
    if (in_excluded_set(effective_geometry(r.labels.first))) {
        r.verdict = "Inconclusive";
        r.reason = "both lattices are " + std::string(geometry_name(effective_geometry(r.labels.first))) +
                   ", where geometry does not decide profinite isomorphism";
        return r;
    }
    const auto* t1 = std::get_if<TorusBundle4>(&d1);
    const auto* t2 = std::get_if<TorusBundle4>(&d2);
    if (t1 && t2) {
        r.deep = compare_torus_bundles(t1->a, t2->a, opt);
        r.verdict = verdict_kind_name(r.deep->kind);
        r.reason = r.deep->kind == CompareVerdict::Kind::Distinguished ? r.deep->invariant : r.labels.reason;
        return r;
    }
    r.verdict = "SameGeometry";
    return r;
}

SplittingVerdict splitting_witness(const IntPair& e)
{
    SplittingVerdict v;
    if (e[0] == 0 && e[1] == 0) return v;
    v.split = false;
    for (Int q = 2;; ++q)
        if (mod(e[0], q) != 0 || mod(e[1], q) != 0) {
            v.witness = q;
            return v;
        }
}

SplittingVerdict splitting_witness(const RationalPair& e)
{
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    const Int n = lcm(denominator(e[0]), denominator(e[1]));
    return splitting_witness(IntPair{numerator(e[0]) * (n / denominator(e[0])), numerator(e[1]) * (n / denominator(e[1]))});
}

namespace {

Int surface_beta1(int genus, const Int& d)
{
    if (d < 1) throw Error(ErrorKind::InvalidArgument, "index must be at least 1");
    return d * (2 * genus - 2) + 2;
}

void require_hyperbolic(int genus)
{
    if (genus < 2) throw Error(ErrorKind::NotHyperbolic, "genus " + std::to_string(genus) + " surface is not hyperbolic");
}

} // namespace

LuckReport luck_approximation_surface(int genus, const std::vector<Int>& indices)
{
    require_hyperbolic(genus);
    LuckReport r;
    for (const auto& d : indices) {
        const Int b = surface_beta1(genus, d);
        r.rows.push_back({d, b, Rational(b, d)});
    }
    r.limit = 2 * genus - 2;
    return r;
}

LuckReport luck_approximation_product(int g, int h, const std::vector<std::pair<Int, Int>>& indices)
{
    require_hyperbolic(g);
    require_hyperbolic(h);
    LuckReport r;
    for (const auto& [c, d] : indices) {
        const Int b = surface_beta1(g, c) + surface_beta1(h, d);
        r.rows.push_back({c * d, b, Rational(b, c * d)});
    }
    r.limit = 0;
    return r;
}

NilclassReport nilclass_stabilization(const LatticeDescriptor& d, const std::vector<Int>& moduli)
{
    validate(d);
    NilclassReport r;
    std::optional<int> c;
    try {
        c = lower_central_series(d).length;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotPolycyclic) throw;
    }
    if (!c) throw Error(ErrorKind::NotNilpotent, "lattice is not nilpotent");
    r.group_class = *c;

    const auto bottom = lower_central_term(d, *c);
    r.bottom_content = 0;
    bool only_z = true;
    for (const auto& v : bottom)
        for (std::size_t i = 0; i < v.size(); ++i) {
            r.bottom_content = gcd(r.bottom_content, v[i]);
            if (i > 0 && v[i] != 0) only_z = false;
        }
    r.central_layer = only_z && (std::holds_alternative<GammaQLattice>(d) || std::holds_alternative<GammaQExtension>(d));
    r.description = "class " + std::to_string(*c) + " at every modulus whose " +
                    (r.central_layer ? std::string("z modulus") : std::string("fibre modulus")) +
                    " does not divide " + r.bottom_content.str();

    for (const auto& q : moduli) {
        require_modulus(q);
        const auto qc = quotient_nilpotent_class(d, q);
        if (!qc) throw std::logic_error("quotient of a nilpotent lattice is not nilpotent");
        r.classes.emplace_back(q, *qc);
        if (predicted_stable(r, d, q)) r.predicted_stable.push_back(q);
    }
    return r;
}

bool predicted_stable(const NilclassReport& r, const LatticeDescriptor& d, const Int& q)
{
    if (r.group_class <= 1) return true;
    const LevelQuotient lq = level_quotient(d, q);
    const Int layer = r.central_layer ? lq.central_modulus : lq.modulus;
    return mod(r.bottom_content, layer) != 0;
}

} // namespace geo4
