#include "geo4/polycyc.hpp"
#include "heisenberg.hpp"

namespace geo4 {

using detail::HAuto;
using detail::HElem;
using detail::Heisenberg;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void not_polycyclic(const std::string& what)
{
    throw Error(ErrorKind::NotPolycyclic, what + " is not polycyclic");
}

ExpVec pad(const IntVector& v, std::size_t k)
{
    ExpVec r(k);
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i];
    return r;
}

ExpVec helem_vec(const HElem& g, std::size_t k)
{
    ExpVec r(k);
    r[0] = g.c;
    r[1] = g.b;
    r[2] = g.a;
    return r;
}

Rational orbifold_euler_characteristic(const SeifertInvariants& s)
{
    Rational chi = s.base_orientable ? Rational(2 - 2 * s.genus) : Rational(2 - s.genus);
    for (const auto& c : s.cone_points) chi -= Rational(1) - Rational(Int(1), c.m);
    return chi;
}

std::optional<T2BundleOverT2> as_t2_bundle(const SeifertInvariants& s)
{
    if (!s.base_orientable || s.genus != 1 || !s.cone_points.empty()) return std::nullopt;
    T2BundleOverT2 t;
    t.a = s.monodromies.empty() ? IntMatrix::identity(2) : s.monodromies[0];
    t.b = s.monodromies.empty() ? IntMatrix::identity(2) : s.monodromies[1];
    t.obstruction = s.obstruction;
    return t;
}

std::size_t factor_hirsch(const Factor& f)
{
    switch (f.kind) {
    case FactorKind::Torus2: return 2;
    case FactorKind::Circle: return 1;
    case FactorKind::Sphere2: return 0;
    default: not_polycyclic(std::string("product with a ") + factor_kind_name(f.kind) + " factor");
    }
}

bool is_unipotent(const IntMatrix& a)
{
    const IntMatrix u = a - IntMatrix::identity(a.rows());
    return u.power(static_cast<long long>(a.rows())).is_zero();
}

// ------------------------------------------------------------ presentations

PolycyclicPresentation torus_bundle_presentation(const IntMatrix& a)
{
    PolycyclicPresentation p;
    for (const char* n : {"e1", "e2", "e3", "t"}) p.add_generator(n);
    const IntMatrix ai = a.inverse();
    for (std::size_t i = 0; i < 3; ++i) {
        p.set_conjugate(3, i, pad(ai.column(i), 4));
        p.set_inverse_conjugate(3, i, pad(a.column(i), 4));
    }
    return p;
}

PolycyclicPresentation gamma_q_presentation(const Int& q, const HAuto* phi)
{
    PolycyclicPresentation p;
    for (const char* n : {"z", "y", "x"}) p.add_generator(n);
    if (phi) p.add_generator("t");
    const std::size_t k = p.size();
    p.set_conjugate(2, 1, helem_vec({0, 1, -q}, k));
    p.set_inverse_conjugate(2, 1, helem_vec({0, 1, q}, k));
    if (phi) {
        const Heisenberg h{q};
        const HAuto inv = phi->inverse(h);
        const HElem gens[3] = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
        for (std::size_t i = 0; i < 3; ++i) {
            p.set_conjugate(3, i, helem_vec(inv.apply(h, gens[i]), k));
            p.set_inverse_conjugate(3, i, helem_vec(phi->apply(h, gens[i]), k));
        }
    }
    return p;
}

PolycyclicPresentation t2_presentation(const T2BundleOverT2& d)
{
    PolycyclicPresentation p;
    for (const char* n : {"l", "h", "t", "s"}) p.add_generator(n);
    const IntMatrix ai = d.a.inverse(), bi = d.b.inverse();
    const IntVector e{d.obstruction[0], d.obstruction[1]};
    for (std::size_t i = 0; i < 2; ++i) {
        p.set_conjugate(2, i, pad(bi.column(i), 4));
        p.set_inverse_conjugate(2, i, pad(d.b.column(i), 4));
        p.set_conjugate(3, i, pad(ai.column(i), 4));
        p.set_inverse_conjugate(3, i, pad(d.a.column(i), 4));
    }
    // s t s^-1 = e t = t (B^-1 e); s^-1 t s = t (-B^-1 A^-1 e)
    ExpVec fwd = pad(bi * (ai * e), 4);
    for (auto& x : fwd) x = -x;
    fwd[2] = 1;
    ExpVec back = pad(bi * e, 4);
    back[2] = 1;
    p.set_conjugate(3, 2, fwd);
    p.set_inverse_conjugate(3, 2, back);
    return p;
}

PolycyclicPresentation free_abelian_presentation(std::size_t n)
{
    PolycyclicPresentation p;
    for (std::size_t i = 0; i < n; ++i) p.add_generator("a" + std::to_string(i + 1));
    return p;
}

HAuto extension_auto(const GammaQExtension& g)
{
    return HAuto{g.c, {g.mu[0], g.mu[1]}};
}

// ------------------------------------------------------- Heisenberg subgroups

// A subgroup H of Gamma_q: pi(H) has Hermite basis w (2 x r), lift[j] is the
// z-exponent of the element of H over column j, and H meets the centre in <z^e>.
struct HSub {
    IntMatrix w = IntMatrix(2, 0);
    std::vector<Int> lift;
    Int e = 0;

    bool operator==(const HSub&) const = default;
    bool trivial() const { return w.cols() == 0 && e == 0; }

    HElem lift_elem(std::size_t j) const { return {w(0, j), w(1, j), lift[j]}; }

    HElem element(const Heisenberg& h, const IntVector& n) const
    {
        HElem r{0, 0, 0};
        for (std::size_t j = 0; j < n.size(); ++j) r = h.mul(r, h.pow(lift_elem(j), n[j]));
        return r;
    }

    std::vector<HElem> generators() const
    {
        std::vector<HElem> g;
        for (std::size_t j = 0; j < w.cols(); ++j) g.push_back(lift_elem(j));
        if (e != 0) g.push_back({0, 0, e});
        return g;
    }

    static HSub generated_by(const Heisenberg& h, const std::vector<HElem>& gens)
    {
        HSub s;
        if (gens.empty()) return s;
        IntMatrix v(2, gens.size());
        for (std::size_t i = 0; i < gens.size(); ++i) {
            v(0, i) = gens[i].a;
            v(1, i) = gens[i].b;
        }
        const ColumnHermite ch = column_hermite(v);
        s.w = IntMatrix(2, ch.rank);
        Int e = 0;
        for (std::size_t j = 0; j < gens.size(); ++j) {
            HElem x{0, 0, 0};
            for (std::size_t i = 0; i < gens.size(); ++i) x = h.mul(x, h.pow(gens[i], ch.transform(i, j)));
            if (j < ch.rank) {
                s.w(0, j) = x.a;
                s.w(1, j) = x.b;
                s.lift.push_back(x.c);
            } else {
                e = gcd(e, x.c);
            }
        }
        if (ch.rank == 2) e = gcd(e, h.q * (s.w(0, 0) * s.w(1, 1) - s.w(0, 1) * s.w(1, 0)));
        s.e = e;
        if (e != 0)
            for (auto& c : s.lift) c = mod(c, e);
        return s;
    }

    // Coordinates (lift exponents, central exponent / e).
    std::optional<IntVector> coordinates(const Heisenberg& h, const HElem& g) const
    {
        auto n = lattice_coordinates(w, {g.a, g.b});
        if (!n) return std::nullopt;
        const Int d = g.c - element(h, *n).c;
        if (e == 0) {
            if (d != 0) return std::nullopt;
            return n;
        }
        if (d % e != 0) return std::nullopt;
        n->push_back(d / e);
        return n;
    }
};

// Smallest subgroup of Gamma_q containing `gens`, normalised by Gamma_q and phi.
HSub normal_closure(const Heisenberg& h, const HAuto& phi, const HAuto& phi_inv, std::vector<HElem> gens)
{
    HSub cur = HSub::generated_by(h, gens);
    for (;;) {
        std::vector<HElem> g = cur.generators();
        const std::size_t base = g.size();
        for (std::size_t i = 0; i < base; ++i) {
            g.push_back(h.comm({1, 0, 0}, g[i]));
            g.push_back(h.comm({0, 1, 0}, g[i]));
            g.push_back(phi.apply(h, g[i]));
            g.push_back(phi_inv.apply(h, g[i]));
        }
        HSub next = HSub::generated_by(h, g);
        if (next == cur) return cur;
        cur = std::move(next);
    }
}

// outer / inner for HSubs with inner normal in outer and abelian quotient.
AbelianInvariants hsub_quotient(const Heisenberg& h, const HSub& outer, const HSub& inner)
{
    const std::size_t r = outer.w.cols();
    const std::size_t dim = r + (outer.e != 0 ? 1 : 0);
    std::vector<IntVector> rows;
    if (r == 2) {
        const Int om = h.q * (outer.w(0, 0) * outer.w(1, 1) - outer.w(0, 1) * outer.w(1, 0));
        rows.push_back({0, 0, om / outer.e});
    }
    for (const auto& g : inner.generators()) {
        auto c = outer.coordinates(h, g);
        if (!c) throw Error(ErrorKind::InvalidArgument, "series term is not contained in its predecessor");
        rows.push_back(*c);
    }
    if (rows.empty()) return cokernel(IntMatrix(0, dim), dim);
    return cokernel(IntMatrix::from_rows(rows), dim);
}

// ----------------------------------------------------------------- families
//
// Each family exposes the second term of both series, the recursion for the
// lower central series, equality, triviality, the layer invariants and the
// exponent vectors of a term's generators in build_presentation order.

struct LatticeFamily {
    // Fibre lattices as Hermite bases (dim x r).
    std::size_t dim;
    std::size_t total;
    IntMatrix second;
    std::vector<IntMatrix> ops; // gamma_{k+1} = sum ops[i] * gamma_k

    using Term = IntMatrix;

    Term lcs_second() const { return second; }
    Term derived_second() const { return second; }
    Term lcs_next(const Term& t) const
    {
        IntMatrix acc(dim, 0);
        for (const auto& op : ops) acc = hstack(acc, op * t);
        return hermite_basis(acc);
    }
    Term derived_next(const Term&) const { return IntMatrix(dim, 0); }
    bool trivial(const Term& t) const { return t.cols() == 0; }
    bool equal(const Term& a, const Term& b) const { return a == b; }
    AbelianInvariants layer(const Term& outer, const Term& inner) const { return lattice_quotient(outer, inner); }
    std::vector<ExpVec> elements(const Term& t) const
    {
        std::vector<ExpVec> r;
        for (std::size_t j = 0; j < t.cols(); ++j) r.push_back(pad(t.column(j), total));
        return r;
    }
};

LatticeFamily torus_family(const IntMatrix& a)
{
    const IntMatrix u = a - IntMatrix::identity(3);
    return {3, 4, hermite_basis(u), {u}};
}

LatticeFamily t2_family(const T2BundleOverT2& d)
{
    const IntMatrix ua = d.a - IntMatrix::identity(2), ub = d.b - IntMatrix::identity(2);
    IntMatrix e(2, 1);
    e(0, 0) = d.obstruction[0];
    e(1, 0) = d.obstruction[1];
    return {2, 4, hermite_basis(hstack(hstack(ua, ub), e)), {ua, ub}};
}

struct GammaFamily {
    Heisenberg h;
    HAuto phi;
    HAuto phi_inv;
    bool has_t;

    using Term = HSub;

    std::vector<HElem> commutators_with_gens(const std::vector<HElem>& gens) const
    {
        std::vector<HElem> r;
        for (const auto& g : gens) {
            r.push_back(h.comm({1, 0, 0}, g));
            r.push_back(h.comm({0, 1, 0}, g));
            if (has_t) r.push_back(h.mul(phi.apply(h, g), h.inv(g)));
        }
        return r;
    }

    Term lcs_second() const
    {
        return normal_closure(h, phi, phi_inv, commutators_with_gens({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    }
    Term derived_second() const { return lcs_second(); }
    Term lcs_next(const Term& t) const { return normal_closure(h, phi, phi_inv, commutators_with_gens(t.generators())); }
    Term derived_next(const Term& t) const
    {
        HSub r;
        if (t.w.cols() == 2) r.e = abs(h.q * (t.w(0, 0) * t.w(1, 1) - t.w(0, 1) * t.w(1, 0)));
        return r;
    }
    bool trivial(const Term& t) const { return t.trivial(); }
    bool equal(const Term& a, const Term& b) const { return a == b; }
    AbelianInvariants layer(const Term& outer, const Term& inner) const { return hsub_quotient(h, outer, inner); }
    std::vector<ExpVec> elements(const Term& t) const
    {
        std::vector<ExpVec> r;
        for (const auto& g : t.generators()) r.push_back(helem_vec(g, has_t ? 4 : 3));
        return r;
    }
};

GammaFamily gamma_family(const Int& q)
{
    const HAuto id{IntMatrix::identity(2), {0, 0}};
    return {Heisenberg{q}, id, id, false};
}

GammaFamily gamma_family(const GammaQExtension& g)
{
    const Heisenberg h{g.q};
    const HAuto phi = extension_auto(g);
    return {h, phi, phi.inverse(h), true};
}

// Terms past the cap are not examined; for the families here a nilpotent group
// of Hirsch length at most 4 has class at most 3, so a truncated series is
// never nilpotent.
template <class F>
SeriesReport run_series(const F& f, const AbelianInvariants& first, typename F::Term second, int cap, bool derived)
{
    SeriesReport rep;
    rep.layers.push_back(first);
    if (f.trivial(second)) {
        rep.length = 1;
        return rep;
    }
    typename F::Term cur = std::move(second);
    for (int i = 2; i <= cap; ++i) {
        typename F::Term next = derived ? f.derived_next(cur) : f.lcs_next(cur);
        if (f.equal(next, cur)) {
            rep.stabilized = true;
            return rep;
        }
        rep.layers.push_back(f.layer(cur, next));
        if (f.trivial(next)) {
            rep.length = i;
            return rep;
        }
        cur = std::move(next);
    }
    rep.truncated = true;
    return rep;
}

template <class F>
SeriesReport lcs_of(const F& f, const PolycyclicPresentation& p, int cap)
{
    return run_series(f, abelianization(p), f.lcs_second(), cap, false);
}

template <class F>
SeriesReport derived_of(const F& f, const PolycyclicPresentation& p, int cap)
{
    return run_series(f, abelianization(p), f.derived_second(), cap, true);
}

SeriesReport free_abelian_series(std::size_t n)
{
    SeriesReport r;
    r.layers.push_back(AbelianInvariants{n, {}});
    r.length = 1;
    return r;
}

std::size_t product_rank(const ProductLattice& p)
{
    return factor_hirsch(p.first) + factor_hirsch(p.second);
}

void require_cap(int cap)
{
    if (cap < 1) throw Error(ErrorKind::InvalidArgument, "series cap must be positive");
}

template <class Fn>
SeriesReport series_dispatch(const LatticeDescriptor& d, int cap, bool derived, Fn&& family_series)
{
    require_cap(cap);
    return std::visit(
        overloaded{
            [&](const TorusBundle4& t) { return family_series(torus_family(t.a), build_presentation(d)); },
            [&](const GammaQLattice& g) { return family_series(gamma_family(g.q), build_presentation(d)); },
            [&](const GammaQExtension& g) { return family_series(gamma_family(g), build_presentation(d)); },
            [&](const T2BundleOverT2& t) { return family_series(t2_family(t), build_presentation(d)); },
            [&](const SeifertInvariants& s) -> SeriesReport {
                if (auto t = as_t2_bundle(s)) {
                    const LatticeDescriptor td = *t;
                    return derived ? derived_series(td, cap) : lower_central_series(td, cap);
                }
                if (orbifold_euler_characteristic(s) < 0) not_polycyclic("Seifert fibration over a hyperbolic base");
                throw Error(ErrorKind::Unsupported, "series are only computed for torus bases without cone points");
            },
            [&](const ProductLattice& p) { return free_abelian_series(product_rank(p)); },
            [&](const OpaqueLattice&) -> SeriesReport {
                throw Error(ErrorKind::Unsupported, "opaque lattices carry no presentation");
            },
        },
        d);
}

// ---------------------------------------------------------- level quotients

Int matrix_order_mod(const IntMatrix& a, const Int& n)
{
    if (n < (Int(1) << 31)) {
        const std::size_t d = a.rows();
        const long long nn = static_cast<long long>(n);
        std::vector<long long> am(d * d), p(d * d), tmp(d * d), id(d * d, 0);
        for (std::size_t i = 0; i < d; ++i) {
            id[i * d + i] = 1 % nn;
            for (std::size_t j = 0; j < d; ++j) am[i * d + j] = static_cast<long long>(mod(a(i, j), n));
        }
        p = am;
        for (long long k = 1; k <= 100000; ++k) {
            if (p == id) return k;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) {
                    long long acc = 0;
                    for (std::size_t l = 0; l < d; ++l) acc = (acc + p[i * d + l] * am[l * d + j]) % nn;
                    tmp[i * d + j] = acc;
                }
            std::swap(p, tmp);
        }
        throw Error(ErrorKind::RangeExceeded, "matrix order modulo " + n.str() + " exceeds search bound");
    }
    const IntMatrix id = IntMatrix::identity(a.rows());
    const IntMatrix am = a.reduced(n);
    IntMatrix p = am;
    for (Int k = 1; k <= 100000; ++k) {
        if (p == id.reduced(n)) return k;
        p = (p * am).reduced(n);
    }
    throw Error(ErrorKind::RangeExceeded, "matrix order modulo " + n.str() + " exceeds search bound");
}

// (a^k, sum_{i<k} a^i) mod n by doubling.
std::pair<IntMatrix, IntMatrix> power_and_norm_mod(const IntMatrix& a, const Int& k, const Int& n)
{
    if (k == 0) return {IntMatrix::identity(a.rows()), IntMatrix::zero(a.rows(), a.cols())};
    if (k % 2 == 1) {
        const auto [p, s] = power_and_norm_mod(a, k - 1, n);
        return {(p * a).reduced(n), (s + p).reduced(n)};
    }
    const auto [p, s] = power_and_norm_mod(a, k / 2, n);
    return {(p * p).reduced(n), (s + p * s).reduced(n)};
}

// Sum_{i<k} a^i mod n.
IntMatrix norm_mod(const IntMatrix& a, const Int& k, const Int& n)
{
    return power_and_norm_mod(a.reduced(n), k, n).second;
}

// Least k >= 1 with k * m = 0 (mod n).
Int annihilating_multiple(const IntMatrix& m, const Int& n)
{
    return n / gcd(m.reduced(n).content(), n);
}

ExpVec reduced_vec(ExpVec v, const std::vector<Int>& moduli)
{
    for (std::size_t i = 0; i < v.size(); ++i)
        if (moduli[i] != 0) v[i] = mod(v[i], moduli[i]);
    return v;
}

LevelQuotient torus_quotient(const IntMatrix& a, const Int& n)
{
    const Int r = matrix_order_mod(a, n);
    const Int l0 = lcm(n, r);
    const Int l = l0 * annihilating_multiple(norm_mod(a, l0, n), n);
    PolycyclicPresentation p;
    for (const char* nm : {"e1", "e2", "e3"}) p.add_generator(nm, n);
    p.add_generator("t", l);
    const std::vector<Int> mods{n, n, n, l};
    const IntMatrix ai = a.inverse();
    for (std::size_t i = 0; i < 3; ++i) {
        p.set_conjugate(3, i, reduced_vec(pad(ai.column(i), 4), mods));
        p.set_inverse_conjugate(3, i, reduced_vec(pad(a.column(i), 4), mods));
    }
    // consistent by construction: r divides l, so A^l = I mod n
    return {std::move(p), n, n, l};
}

LevelQuotient t2_quotient(const T2BundleOverT2& d, const Int& n)
{
    const Int l0 = lcm(n, lcm(matrix_order_mod(d.a, n), matrix_order_mod(d.b, n)));
    const Int k = lcm(annihilating_multiple(norm_mod(d.a, l0, n), n), annihilating_multiple(norm_mod(d.b, l0, n), n));
    const PolycyclicPresentation full = t2_presentation(d);
    for (Int l = l0 * k; l <= l0 * k * 64; l *= 2) {
        PolycyclicPresentation p;
        p.add_generator("l", n);
        p.add_generator("h", n);
        p.add_generator("t", l);
        p.add_generator("s", l);
        const std::vector<Int> mods{n, n, l, l};
        for (std::size_t j = 1; j < 4; ++j)
            for (std::size_t i = 0; i < j; ++i) {
                p.set_conjugate(j, i, reduced_vec(full.conjugate_relation(j, i), mods));
                p.set_inverse_conjugate(j, i, reduced_vec(full.inverse_conjugate_relation(j, i), mods));
            }
        try {
            p.check_consistency();
        } catch (const Error&) {
            continue;
        }
        return {std::move(p), n, n, l};
    }
    throw Error(ErrorKind::RangeExceeded, "no consistent level-" + n.str() + " quotient found");
}

struct ModHeisenberg {
    Heisenberg h;
    Int n, m;

    HElem red(const HElem& g) const { return {mod(g.a, n), mod(g.b, n), mod(g.c, m)}; }
    HElem mul(const HElem& u, const HElem& v) const { return red(h.mul(u, v)); }
    HElem apply(const HAuto& f, const HElem& g) const { return red(f.apply(h, g)); }
    bool is_one(const HElem& g) const { return g.a == 0 && g.b == 0 && g.c == 0; }
    Int order(const HElem& g) const
    {
        HElem x = g;
        for (Int k = 1;; ++k) {
            if (is_one(x)) return k;
            x = mul(x, g);
        }
    }
};

Int central_modulus(const Int& q, const Int& n)
{
    return (n % 2 == 0 && q % 2 != 0) ? n / 2 : n;
}

LevelQuotient gamma_quotient(const Int& q, const HAuto* phi, const Int& n)
{
    const Int m = central_modulus(q, n);
    const ModHeisenberg mh{Heisenberg{q}, n, m};
    PolycyclicPresentation p;
    p.add_generator("z", m);
    p.add_generator("y", n);
    p.add_generator("x", n);
    Int l = 0;
    std::vector<Int> mods{m, n, n};
    if (phi) {
        // order of phi on the fibre quotient
        const HElem gens[3] = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
        std::vector<HElem> img(gens, gens + 3);
        Int r = 0;
        for (Int k = 1; k <= 100000; ++k) {
            for (auto& g : img) g = mh.apply(*phi, g);
            bool id = true;
            for (std::size_t i = 0; i < 3; ++i) id = id && img[i] == mh.red(gens[i]);
            if (id) {
                r = k;
                break;
            }
        }
        if (r == 0) throw Error(ErrorKind::RangeExceeded, "automorphism order exceeds search bound");
        const Int l0 = lcm(n, r);
        Int k = 1;
        for (Int a = 0; a < n; ++a)
            for (Int b = 0; b < n; ++b)
                for (Int c = 0; c < m; ++c) {
                    HElem g{a, b, c}, prod{0, 0, 0};
                    for (Int i = 0; i < l0; ++i) {
                        prod = mh.mul(prod, g);
                        g = mh.apply(*phi, g);
                    }
                    k = lcm(k, mh.order(prod));
                }
        l = l0 * k;
        p.add_generator("t", l);
        mods.push_back(l);
    }
    const std::size_t sz = p.size();
    p.set_conjugate(2, 1, reduced_vec(helem_vec({0, 1, -q}, sz), mods));
    p.set_inverse_conjugate(2, 1, reduced_vec(helem_vec({0, 1, q}, sz), mods));
    if (phi) {
        const HAuto inv = phi->inverse(mh.h);
        const HElem gens[3] = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
        for (std::size_t i = 0; i < 3; ++i) {
            p.set_conjugate(3, i, helem_vec(mh.apply(inv, gens[i]), sz));
            p.set_inverse_conjugate(3, i, helem_vec(mh.apply(*phi, gens[i]), sz));
        }
    }
    p.check_consistency();
    return {std::move(p), n, m, l};
}

ExpVec map_to_quotient(const PolycyclicPresentation& q, const ExpVec& v)
{
    Word w;
    for (std::size_t i = v.size(); i-- > 0;)
        if (v[i] != 0) w.push_back({i, v[i]});
    return q.collect(w);
}

template <class F>
std::optional<int> quotient_class_of(const F& f, const LevelQuotient& lq)
{
    const auto inside = [&](const typename F::Term& t) {
        for (const auto& v : f.elements(t))
            if (!lq.presentation.is_identity(map_to_quotient(lq.presentation, v))) return false;
        return true;
    };
    // The quotient series strictly descends until it stabilises, so its class
    // is at most log2 |Q|.
    const Int order = lq.order();
    int bound = 2;
    for (Int o = order; o > 1; o /= 2) ++bound;
    typename F::Term cur = f.lcs_second();
    for (int k = 1; k <= bound; ++k) {
        if (inside(cur)) return k;
        cur = f.lcs_next(cur);
    }
    return std::nullopt;
}

void require_modulus(const Int& n)
{
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "modulus must be at least 2");
}

} // namespace

// ----------------------------------------------------------------- public API

PolycyclicPresentation build_presentation(const LatticeDescriptor& d)
{
    validate(d);
    PolycyclicPresentation p = std::visit(
        overloaded{
            [](const TorusBundle4& t) { return torus_bundle_presentation(t.a); },
            [](const GammaQLattice& g) { return gamma_q_presentation(g.q, nullptr); },
            [](const GammaQExtension& g) {
                const HAuto phi = extension_auto(g);
                return gamma_q_presentation(g.q, &phi);
            },
            [](const T2BundleOverT2& t) { return t2_presentation(t); },
            [](const SeifertInvariants& s) -> PolycyclicPresentation {
                if (auto t = as_t2_bundle(s)) return t2_presentation(*t);
                if (orbifold_euler_characteristic(s) < 0) not_polycyclic("Seifert fibration over a hyperbolic base");
                throw Error(ErrorKind::Unsupported, "presentations are only built for torus bases without cone points");
            },
            [](const ProductLattice& p) { return free_abelian_presentation(product_rank(p)); },
            [](const OpaqueLattice& o) -> PolycyclicPresentation {
                throw Error(ErrorKind::Unsupported,
                            std::string("no presentation for an opaque ") + opaque_geometry_name(o.geometry) + " lattice");
            },
        },
        d);
    p.check_consistency();
    return p;
}

SeriesReport lower_central_series(const LatticeDescriptor& d, int cap)
{
    return series_dispatch(d, cap, false, [&](const auto& f, const PolycyclicPresentation& p) { return lcs_of(f, p, cap); });
}

SeriesReport derived_series(const LatticeDescriptor& d, int cap)
{
    return series_dispatch(d, cap, true,
                           [&](const auto& f, const PolycyclicPresentation& p) { return derived_of(f, p, cap); });
}

namespace {

AbelianInvariants factor_h1(const Factor& f)
{
    switch (f.kind) {
    case FactorKind::Surface: return {static_cast<std::size_t>(2 * f.genus), {}};
    case FactorKind::Torus2: return {2, {}};
    case FactorKind::Circle: return {1, {}};
    case FactorKind::Sphere2: return {0, {}};
    case FactorKind::Hyperbolic3: break;
    }
    throw Error(ErrorKind::Unsupported, "first homology of an opaque hyperbolic 3-manifold factor is unknown");
}

// Generators l, h, base generators, cone generators c_j.
//   s l s^-1 = A l, c_j^m_j = l^-a_j h^-b_j,
//   prod [s_i,t_i] prod c_j = l^m h^n (orientable), prod v_i^2 prod c_j = l^m h^n.
AbelianInvariants seifert_h1(const SeifertInvariants& s)
{
    const std::size_t nbase = s.base_orientable ? 2 * static_cast<std::size_t>(s.genus) : static_cast<std::size_t>(s.genus);
    const std::size_t ncone = s.cone_points.size();
    const std::size_t n = 2 + nbase + ncone;
    std::vector<IntVector> rows;
    for (const auto& a : s.monodromies) {
        const IntMatrix u = a - IntMatrix::identity(2);
        for (std::size_t c = 0; c < 2; ++c) {
            IntVector r(n);
            r[0] = u(0, c);
            r[1] = u(1, c);
            rows.push_back(r);
        }
    }
    for (std::size_t j = 0; j < ncone; ++j) {
        IntVector r(n);
        r[0] = s.cone_points[j].a;
        r[1] = s.cone_points[j].b;
        r[2 + nbase + j] = s.cone_points[j].m;
        rows.push_back(r);
    }
    IntVector r(n);
    r[0] = -s.obstruction[0];
    r[1] = -s.obstruction[1];
    if (!s.base_orientable)
        for (std::size_t i = 0; i < nbase; ++i) r[2 + i] = 2;
    for (std::size_t j = 0; j < ncone; ++j) r[2 + nbase + j] = 1;
    rows.push_back(r);
    return cokernel(IntMatrix::from_rows(rows), n);
}

} // namespace

AbelianInvariants abelianization(const LatticeDescriptor& d)
{
    validate(d);
    if (const auto* p = std::get_if<ProductLattice>(&d)) {
        const AbelianInvariants a = factor_h1(p->first), b = factor_h1(p->second);
        return {a.free_rank + b.free_rank, {}};
    }
    if (const auto* s = std::get_if<SeifertInvariants>(&d)) return seifert_h1(*s);
    return abelianization(build_presentation(d));
}

std::optional<std::size_t> hirsch_length(const LatticeDescriptor& d)
{
    validate(d);
    return std::visit(
        overloaded{
            [](const TorusBundle4&) -> std::optional<std::size_t> { return 4; },
            [](const GammaQLattice&) -> std::optional<std::size_t> { return 3; },
            [](const GammaQExtension&) -> std::optional<std::size_t> { return 4; },
            [](const T2BundleOverT2&) -> std::optional<std::size_t> { return 4; },
            [](const SeifertInvariants& s) -> std::optional<std::size_t> {
                const Rational chi = orbifold_euler_characteristic(s);
                if (chi < 0) return std::nullopt;
                if (chi == 0) return 4;
                if (!s.base_orientable)
                    throw Error(ErrorKind::Unsupported, "Hirsch length over a non-orientable spherical base");
                return seifert_h1(s).free_rank;
            },
            [](const ProductLattice& p) -> std::optional<std::size_t> {
                std::size_t h = 0;
                for (const Factor* f : {&p.first, &p.second}) {
                    if (f->kind == FactorKind::Surface || f->kind == FactorKind::Hyperbolic3) return std::nullopt;
                    h += factor_hirsch(*f);
                }
                return h;
            },
            [](const OpaqueLattice& o) -> std::optional<std::size_t> {
                switch (o.geometry) {
                case OpaqueGeometry::S4:
                case OpaqueGeometry::CP2:
                case OpaqueGeometry::S2xS2: return 0;
                default: return std::nullopt;
                }
            },
        },
        d);
}

std::string Nilradical::to_string() const
{
    switch (kind) {
    case Kind::FreeAbelian: return "FreeAbelian(" + rank_or_q.str() + ")";
    case Kind::GammaQ: return "GammaQ(" + rank_or_q.str() + ")";
    case Kind::FibreZ2: return "FibreZ2";
    case Kind::WholeGroup: return "WholeGroup(class " + std::to_string(nil_class) + ")";
    case Kind::FiniteIndexNilpotent:
        return "FiniteIndexNilpotent(class " + std::to_string(nil_class) + ", index " + std::to_string(index) + ")";
    }
    return "";
}

namespace {

int class_of(const LatticeDescriptor& d)
{
    const SeriesReport r = lower_central_series(d);
    if (!r.length) throw Error(ErrorKind::NotNilpotent, "expected a nilpotent group");
    return *r.length;
}

// Least k in {1,2,3,4,6} with (A^k - I) nilpotent, when A is quasi-unipotent.
std::optional<int> unipotent_power(const IntMatrix& a)
{
    for (int k : {1, 2, 3, 4, 6, 12})
        if (is_unipotent(a.power(k))) return k;
    return std::nullopt;
}

Nilradical torus_nilradical(const IntMatrix& a)
{
    using K = Nilradical::Kind;
    if (a.is_identity()) return {K::FreeAbelian, 4, 0, 1};
    const auto k = unipotent_power(a);
    if (!k) return {K::FreeAbelian, 3, 0, 1};
    const IntMatrix ak = a.power(*k);
    if (*k == 1) return {K::WholeGroup, 0, class_of(TorusBundle4{a}), 1};
    if (ak.is_identity()) return {K::FreeAbelian, 4, 0, *k};
    return {K::FiniteIndexNilpotent, 0, class_of(TorusBundle4{ak}), *k};
}

Nilradical extension_nilradical(const GammaQExtension& g)
{
    using K = Nilradical::Kind;
    const auto k = unipotent_power(g.c);
    if (!k) return {K::GammaQ, g.q, 0, 1};
    if (*k == 1) return {K::WholeGroup, 0, class_of(g), 1};
    const HAuto pk = extension_auto(g).power(Heisenberg{g.q}, *k);
    const GammaQExtension sub{g.q, pk.c, {pk.mu[0], pk.mu[1]}};
    return {K::FiniteIndexNilpotent, 0, class_of(sub), *k};
}

} // namespace

Nilradical nilradical_descriptor(const LatticeDescriptor& d)
{
    validate(d);
    using K = Nilradical::Kind;
    return std::visit(
        overloaded{
            [](const TorusBundle4& t) { return torus_nilradical(t.a); },
            [](const GammaQLattice& g) { return Nilradical{K::GammaQ, g.q, 0, 1}; },
            [](const GammaQExtension& g) { return extension_nilradical(g); },
            [](const T2BundleOverT2& t) -> Nilradical {
                if (is_unipotent(t.a) && is_unipotent(t.b)) return {K::WholeGroup, 0, class_of(t), 1};
                throw Error(ErrorKind::Unsupported, "nilradical of a non-nilpotent torus bundle over the torus");
            },
            [](const SeifertInvariants& s) -> Nilradical {
                if (orbifold_euler_characteristic(s) < 0) return {K::FibreZ2, 0, 0, 1};
                if (auto t = as_t2_bundle(s); t && is_unipotent(t->a) && is_unipotent(t->b))
                    return {K::WholeGroup, 0, class_of(*t), 1};
                throw Error(ErrorKind::Unsupported, "nilradical of a Seifert fibration over a non-hyperbolic base");
            },
            [](const ProductLattice& p) -> Nilradical {
                auto rank = [](const Factor& f) -> int {
                    return f.kind == FactorKind::Torus2 ? 2 : f.kind == FactorKind::Circle ? 1 : 0;
                };
                const int r = rank(p.first) + rank(p.second);
                const bool surface = p.first.kind == FactorKind::Surface || p.second.kind == FactorKind::Surface;
                if (surface && r == 2) return {K::FibreZ2, 0, 0, 1};
                return {K::FreeAbelian, r, 0, 1};
            },
            [](const OpaqueLattice&) -> Nilradical {
                throw Error(ErrorKind::Unsupported, "nilradical of an opaque lattice");
            },
        },
        d);
}

Int LevelQuotient::order() const
{
    Int o = 1;
    for (std::size_t i = 0; i < presentation.size(); ++i) o *= *presentation.relative_order(i);
    return o;
}

LevelQuotient level_quotient(const LatticeDescriptor& d, const Int& n)
{
    validate(d);
    require_modulus(n);
    return std::visit(
        overloaded{
            [&](const TorusBundle4& t) { return torus_quotient(t.a, n); },
            [&](const GammaQLattice& g) { return gamma_quotient(g.q, nullptr, n); },
            [&](const GammaQExtension& g) {
                const HAuto phi = extension_auto(g);
                return gamma_quotient(g.q, &phi, n);
            },
            [&](const T2BundleOverT2& t) { return t2_quotient(t, n); },
            [&](const SeifertInvariants& s) -> LevelQuotient {
                if (auto t = as_t2_bundle(s)) return t2_quotient(*t, n);
                throw Error(ErrorKind::Unsupported, "level quotients need a torus base without cone points");
            },
            [&](const ProductLattice& p) -> LevelQuotient {
                const std::size_t r = product_rank(p);
                PolycyclicPresentation q;
                for (std::size_t i = 0; i < r; ++i) q.add_generator("a" + std::to_string(i + 1), n);
                return {std::move(q), n, n, 0};
            },
            [&](const OpaqueLattice&) -> LevelQuotient {
                throw Error(ErrorKind::Unsupported, "level quotients of opaque lattices");
            },
        },
        d);
}

std::optional<int> quotient_nilpotent_class(const LatticeDescriptor& d, const Int& n)
{
    const LevelQuotient lq = level_quotient(d, n);
    return std::visit(
        overloaded{
            [&](const TorusBundle4& t) { return quotient_class_of(torus_family(t.a), lq); },
            [&](const GammaQLattice& g) { return quotient_class_of(gamma_family(g.q), lq); },
            [&](const GammaQExtension& g) { return quotient_class_of(gamma_family(g), lq); },
            [&](const T2BundleOverT2& t) { return quotient_class_of(t2_family(t), lq); },
            [&](const SeifertInvariants& s) { return quotient_class_of(t2_family(*as_t2_bundle(s)), lq); },
            [&](const ProductLattice&) -> std::optional<int> { return 1; },
            [&](const OpaqueLattice&) -> std::optional<int> { return std::nullopt; },
        },
        d);
}

namespace {

template <class F>
std::vector<ExpVec> lcs_term_of(const F& f, int k)
{
    typename F::Term cur = f.lcs_second();
    for (int i = 2; i < k; ++i) cur = f.lcs_next(cur);
    return f.elements(cur);
}

} // namespace

std::vector<ExpVec> lower_central_term(const LatticeDescriptor& d, int k)
{
    if (k < 1) throw Error(ErrorKind::InvalidArgument, "series index must be at least 1");
    const PolycyclicPresentation p = build_presentation(d);
    if (k == 1) {
        std::vector<ExpVec> gens;
        for (std::size_t i = 0; i < p.size(); ++i) gens.push_back(p.generator(i));
        return gens;
    }
    return std::visit(
        overloaded{
            [&](const TorusBundle4& t) { return lcs_term_of(torus_family(t.a), k); },
            [&](const GammaQLattice& g) { return lcs_term_of(gamma_family(g.q), k); },
            [&](const GammaQExtension& g) { return lcs_term_of(gamma_family(g), k); },
            [&](const T2BundleOverT2& t) { return lcs_term_of(t2_family(t), k); },
            [&](const SeifertInvariants& s) { return lcs_term_of(t2_family(*as_t2_bundle(s)), k); },
            [&](const ProductLattice&) { return std::vector<ExpVec>{}; },
            [&](const OpaqueLattice&) { return std::vector<ExpVec>{}; },
        },
        d);
}

} // namespace geo4
