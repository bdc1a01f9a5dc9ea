#pragma once

// Oracle: a finite polycyclic group as a literal multiplication table, with
// series computed by enumerating commutators and closing under products.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "geo4/polycyc.hpp"

namespace oracle {

class FiniteGroup {
public:
    explicit FiniteGroup(const geo4::PolycyclicPresentation& p, std::size_t max_order = 8000)
    {
        std::size_t n = 1;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto& m = p.relative_order(i);
            if (!m) throw std::invalid_argument("infinite group");
            radix_.push_back(static_cast<std::size_t>(*m));
            n *= radix_.back();
            if (n > max_order || n > 65535) throw std::invalid_argument("group too large for a table");
        }
        n_ = n;
        // right multiplication by each pc generator, via collection
        std::vector<std::vector<int>> gen_perm(p.size(), std::vector<int>(n_));
        for (std::size_t x = 0; x < n_; ++x) {
            const geo4::ExpVec v = vec(x);
            for (std::size_t g = 0; g < p.size(); ++g) gen_perm[g][x] = index(p.multiply(v, p.generator(g)));
        }
        // table[x][y] = x y; column y is right multiplication by y
        table_.assign(n_ * n_, 0);
        for (std::size_t g = 0; g < p.size(); ++g) gens_.push_back(static_cast<std::size_t>(gen_perm[g][0]));
        std::vector<bool> done(n_);
        std::vector<std::size_t> queue{0};
        for (std::size_t x = 0; x < n_; ++x) table_[x * n_] = static_cast<std::uint16_t>(x);
        done[0] = true;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const std::size_t y = queue[qi];
            for (std::size_t g = 0; g < p.size(); ++g) {
                const std::size_t yg = static_cast<std::size_t>(gen_perm[g][y]);
                if (done[yg]) continue;
                done[yg] = true;
                for (std::size_t x = 0; x < n_; ++x)
                    table_[x * n_ + yg] = static_cast<std::uint16_t>(gen_perm[g][table_[x * n_ + y]]);
                queue.push_back(yg);
            }
        }
        if (queue.size() != n_) throw std::logic_error("generators do not reach every element");
        inverse_.assign(n_, 0);
        for (std::size_t x = 0; x < n_; ++x)
            for (std::size_t y = 0; y < n_; ++y)
                if (table_[x * n_ + y] == 0) inverse_[x] = y;
    }

    std::size_t order() const { return n_; }
    std::size_t mul(std::size_t x, std::size_t y) const { return table_[x * n_ + y]; }
    std::size_t inv(std::size_t x) const { return inverse_[x]; }
    std::size_t comm(std::size_t x, std::size_t y) const { return mul(mul(x, y), inv(mul(y, x))); }

    std::vector<bool> closure(const std::vector<std::size_t>& gens) const
    {
        std::vector<bool> in(n_);
        std::vector<std::size_t> elems{0}, basis;
        in[0] = true;
        for (const auto s : gens) {
            if (in[s]) continue;
            basis.push_back(s);
            for (std::size_t qi = 0; qi < elems.size(); ++qi)
                for (const auto b : basis) {
                    const std::size_t y = mul(elems[qi], b);
                    if (!in[y]) {
                        in[y] = true;
                        elems.push_back(y);
                    }
                }
        }
        return in;
    }

    // Normal closure of gens, closing under conjugation by the pc generators.
    std::vector<bool> normal_closure(std::vector<std::size_t> gens) const
    {
        for (;;) {
            const std::vector<bool> in = closure(gens);
            bool grew = false;
            for (std::size_t i = 0, n = gens.size(); i < n; ++i)
                for (const auto g : gens_) {
                    const std::size_t c = mul(mul(g, gens[i]), inv(g));
                    if (!in[c]) {
                        gens.push_back(c);
                        grew = true;
                    }
                }
            if (!grew) return in;
        }
    }

    // Orders of the lower central series from generators only:
    // gamma_{k+1} = ncl{[g, y] : g a pc generator, y generating gamma_k}.
    std::vector<std::size_t> lower_central_orders_by_generators() const
    {
        std::vector<std::size_t> cur = gens_;
        std::vector<std::size_t> orders{n_};
        for (;;) {
            std::vector<std::size_t> comms;
            for (const auto g : gens_)
                for (const auto y : cur) comms.push_back(comm(g, y));
            const std::vector<bool> next = normal_closure(comms);
            const std::size_t c = count(next);
            if (c == orders.back()) return orders;
            orders.push_back(c);
            if (c == 1) return orders;
            cur.clear();
            for (std::size_t x = 0; x < n_; ++x)
                if (next[x]) cur.push_back(x);
            // a generating set suffices: keep the closure basis only
            cur = basis_of(cur);
        }
    }

    // [G, H] for a subgroup H given as a membership vector.
    std::vector<bool> commutator_with_all(const std::vector<bool>& h) const
    {
        std::vector<bool> seen(n_);
        std::vector<std::size_t> gens;
        for (std::size_t x = 0; x < n_; ++x)
            for (std::size_t y = 0; y < n_; ++y) {
                if (!h[y]) continue;
                const std::size_t c = comm(x, y);
                if (!seen[c]) {
                    seen[c] = true;
                    gens.push_back(c);
                }
            }
        return closure(gens);
    }

    static std::size_t count(const std::vector<bool>& s)
    {
        std::size_t c = 0;
        for (bool b : s) c += b;
        return c;
    }

    // Orders of the lower central series terms, ending at 1 or a repeat.
    std::vector<std::size_t> lower_central_orders() const
    {
        std::vector<bool> cur(n_, true);
        std::vector<std::size_t> orders{n_};
        for (;;) {
            std::vector<bool> next = commutator_with_all(cur);
            const std::size_t c = count(next);
            if (c == orders.back()) return orders;
            orders.push_back(c);
            if (c == 1) return orders;
            cur = std::move(next);
        }
    }

    // nullopt when not nilpotent. Large groups use the generator-based series.
    std::optional<int> nilpotent_class() const
    {
        const auto o = n_ > 1000 ? lower_central_orders_by_generators() : lower_central_orders();
        if (o.back() != 1) return std::nullopt;
        return static_cast<int>(o.size()) - 1;
    }

    // |G / [G,G]|
    std::size_t abelianization_order() const
    {
        std::vector<bool> all(n_, true);
        return n_ / count(commutator_with_all(all));
    }

    // A generating set of the subgroup spanned by elems, chosen greedily.
    std::vector<std::size_t> basis_of(const std::vector<std::size_t>& elems) const
    {
        std::vector<std::size_t> basis;
        std::vector<bool> in = closure({});
        for (const auto e : elems) {
            if (in[e]) continue;
            basis.push_back(e);
            in = closure(basis);
        }
        return basis;
    }

private:
    std::size_t index(const geo4::ExpVec& v) const
    {
        std::size_t r = 0;
        for (std::size_t i = radix_.size(); i-- > 0;) r = r * radix_[i] + static_cast<std::size_t>(v[i]);
        return r;
    }

    geo4::ExpVec vec(std::size_t x) const
    {
        geo4::ExpVec v(radix_.size());
        for (std::size_t i = 0; i < radix_.size(); ++i) {
            v[i] = static_cast<long>(x % radix_[i]);
            x /= radix_[i];
        }
        return v;
    }

    std::size_t n_ = 0;
    std::vector<std::size_t> radix_;
    std::vector<std::uint16_t> table_;
    std::vector<std::size_t> gens_;
    std::vector<std::size_t> inverse_;
};

} // namespace oracle
