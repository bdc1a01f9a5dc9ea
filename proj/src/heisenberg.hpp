#pragma once

// Gamma_q = <x,y,z | [x,z]=[y,z]=1, xy = z^q yx> as pairs (v, c) with
// x^a y^b z^c <-> (a, b, c) and (v,c)(v',c') = (v+v', c+c' - q v_2 v'_1).

#include <array>
#include <vector>

#include "geo4/exactalg.hpp"

namespace geo4::detail {

struct HElem {
    Int a, b, c;
    bool operator==(const HElem&) const = default;
};

struct Heisenberg {
    Int q;

    HElem mul(const HElem& u, const HElem& v) const { return {u.a + v.a, u.b + v.b, u.c + v.c - q * u.b * v.a}; }
    HElem inv(const HElem& u) const { return {-u.a, -u.b, -u.c - q * u.a * u.b}; }
    HElem pow(const HElem& u, const Int& n) const
    {
        if (n < 0) return pow(inv(u), -n);
        return {n * u.a, n * u.b, n * u.c - q * u.a * u.b * (n * (n - 1) / 2)};
    }
    HElem comm(const HElem& u, const HElem& v) const { return {0, 0, q * (u.a * v.b - v.a * u.b)}; }
};

// Automorphism x -> (c11, c12, mu1), y -> (c21, c22, mu2), z -> z^det C.
struct HAuto {
    IntMatrix c;
    std::array<Int, 2> mu{};

    HElem apply(const Heisenberg& h, const HElem& g) const
    {
        const HElem px{c(0, 0), c(0, 1), mu[0]};
        const HElem py{c(1, 0), c(1, 1), mu[1]};
        HElem r = h.mul(h.pow(px, g.a), h.pow(py, g.b));
        r.c += c.determinant() * g.c;
        return r;
    }

    HAuto compose(const Heisenberg& h, const HAuto& inner) const
    {
        // (this o inner)(g) = this(inner(g))
        const HElem ix = apply(h, inner.apply(h, HElem{1, 0, 0}));
        const HElem iy = apply(h, inner.apply(h, HElem{0, 1, 0}));
        HAuto r;
        r.c = IntMatrix{{ix.a, ix.b}, {iy.a, iy.b}};
        r.mu = {ix.c, iy.c};
        return r;
    }

    HAuto inverse(const Heisenberg& h) const
    {
        const IntMatrix ci = c.inverse();
        const Int d = c.determinant();
        HAuto r;
        r.c = ci;
        for (int k = 0; k < 2; ++k) {
            const HElem w{ci(k, 0), ci(k, 1), 0};
            const HElem img = apply(h, w);
            r.mu[k] = -d * img.c;
        }
        return r;
    }

    HAuto power(const Heisenberg& h, long long k) const
    {
        HAuto base = k < 0 ? inverse(h) : *this;
        HAuto r{IntMatrix::identity(2), {0, 0}};
        for (long long i = 0; i < (k < 0 ? -k : k); ++i) r = base.compose(h, r);
        return r;
    }
};

} // namespace geo4::detail
