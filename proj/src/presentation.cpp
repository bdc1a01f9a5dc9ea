#include <sstream>

#include "geo4/polycyc.hpp"

namespace geo4 {

namespace {

ExpVec unit(std::size_t k, std::size_t i)
{
    ExpVec v(k);
    v[i] = 1;
    return v;
}

} // namespace

std::size_t PolycyclicPresentation::add_generator(std::string name, std::optional<Int> relative_order)
{
    if (relative_order && *relative_order < 1)
        throw Error(ErrorKind::InvalidArgument, "relative order must be positive");
    const std::size_t j = names_.size();
    names_.push_back(std::move(name));
    orders_.push_back(relative_order);
    for (auto& row : conj_)
        for (auto& v : row) v.push_back(0);
    for (auto& row : conj_inv_)
        for (auto& v : row) v.push_back(0);
    for (auto& v : power_) v.push_back(0);
    std::vector<ExpVec> row, row_inv;
    for (std::size_t i = 0; i < j; ++i) {
        row.push_back(unit(j + 1, i));
        row_inv.push_back(unit(j + 1, i));
    }
    conj_.push_back(std::move(row));
    conj_inv_.push_back(std::move(row_inv));
    power_.push_back(ExpVec(j + 1));
    return j;
}

void PolycyclicPresentation::set_conjugate(std::size_t j, std::size_t i, ExpVec v)
{
    if (i >= j || j >= size() || v.size() != size())
        throw Error(ErrorKind::InvalidArgument, "bad conjugate relation");
    for (std::size_t t = j; t < size(); ++t)
        if (v[t] != 0) throw Error(ErrorKind::InvalidArgument, "conjugate relation must lie below g_j");
    conj_[j][i] = std::move(v);
}

void PolycyclicPresentation::set_inverse_conjugate(std::size_t j, std::size_t i, ExpVec v)
{
    if (i >= j || j >= size() || v.size() != size())
        throw Error(ErrorKind::InvalidArgument, "bad conjugate relation");
    for (std::size_t t = j; t < size(); ++t)
        if (v[t] != 0) throw Error(ErrorKind::InvalidArgument, "conjugate relation must lie below g_j");
    conj_inv_[j][i] = std::move(v);
}

void PolycyclicPresentation::set_power(std::size_t j, ExpVec v)
{
    if (j >= size() || !orders_[j] || v.size() != size())
        throw Error(ErrorKind::InvalidArgument, "bad power relation");
    for (std::size_t t = j; t < size(); ++t)
        if (v[t] != 0) throw Error(ErrorKind::InvalidArgument, "power relation must lie below g_j");
    power_[j] = std::move(v);
}

std::optional<std::size_t> PolycyclicPresentation::index_of(const std::string& name) const
{
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    return std::nullopt;
}

std::size_t PolycyclicPresentation::hirsch_length() const
{
    std::size_t h = 0;
    for (const auto& o : orders_)
        if (!o) ++h;
    return h;
}

ExpVec PolycyclicPresentation::generator(std::size_t i) const
{
    ExpVec v = identity();
    v[i] = 1;
    if (orders_[i] && *orders_[i] == 1) return multiply(identity(), v);
    return v;
}

bool PolycyclicPresentation::is_identity(const ExpVec& v) const
{
    for (const auto& e : v)
        if (e != 0) return false;
    return true;
}

bool PolycyclicPresentation::is_normal(const ExpVec& v) const
{
    if (v.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
        if (orders_[i] && (v[i] < 0 || v[i] >= *orders_[i])) return false;
    return true;
}

ExpVec PolycyclicPresentation::apply_conj(const ExpVec& low, std::size_t j, bool inverse) const
{
    const auto& rel = inverse ? conj_inv_[j] : conj_[j];
    ExpVec r = identity();
    for (std::size_t i = j; i-- > 0;) {
        if (low[i] == 0) continue;
        r = multiply(r, power(rel[i], low[i]));
    }
    return r;
}

void PolycyclicPresentation::mul_gen(ExpVec& u, std::size_t j, bool inverse) const
{
    ExpVec low = identity();
    bool has_low = false;
    for (std::size_t i = 0; i < j; ++i)
        if (u[i] != 0) {
            low[i] = u[i];
            u[i] = 0;
            has_low = true;
        }
    const auto& m = orders_[j];
    if (!inverse) {
        u[j] += 1;
        if (m && u[j] == *m) {
            u[j] = 0;
            for (std::size_t i = 0; i < j; ++i) u[i] = power_[j][i];
        }
    } else if (m && u[j] == 0) {
        // g^-1 = g^(m-1) w^-1 where g^m = w
        u[j] = *m - 1;
        const ExpVec winv = this->inverse(power_[j]);
        for (std::size_t i = 0; i < j; ++i) u[i] = winv[i];
    } else {
        u[j] -= 1;
    }
    if (has_low) u = multiply(u, apply_conj(low, j, inverse));
}

void PolycyclicPresentation::mul_gen_power(ExpVec& u, std::size_t j, const Int& e) const
{
    if (e == 0) return;
    bool low_zero = true;
    for (std::size_t i = 0; i < j; ++i)
        if (u[i] != 0) {
            low_zero = false;
            break;
        }
    if (low_zero) {
        const auto& m = orders_[j];
        if (!m) {
            u[j] += e;
            return;
        }
        const Int total = u[j] + e;
        const Int r = mod(total, *m);
        const Int qt = (total - r) / *m;
        u[j] = r;
        if (qt != 0) {
            const ExpVec w = power(power_[j], qt);
            for (std::size_t i = 0; i < j; ++i) u[i] = w[i];
        }
        return;
    }
    const bool inv = e < 0;
    if (abs(e) <= 8) {
        for (Int k = abs(e); k > 0; --k) mul_gen(u, j, inv);
        return;
    }
    // u g^e = high g^e (g^-e low g^e), with the conjugation raised to |e|
    ExpVec low = identity();
    for (std::size_t i = 0; i < j; ++i) {
        low[i] = u[i];
        u[i] = 0;
    }
    mul_gen_power(u, j, e);
    u = multiply(u, apply_auto(conj_power(j, e), low));
}

ExpVec PolycyclicPresentation::apply_auto(const std::vector<ExpVec>& images, const ExpVec& v) const
{
    ExpVec r = identity();
    for (std::size_t i = images.size(); i-- > 0;)
        if (v[i] != 0) r = multiply(r, power(images[i], v[i]));
    return r;
}

std::vector<ExpVec> PolycyclicPresentation::conj_power(std::size_t j, const Int& e) const
{
    // images of g_0..g_{j-1} under x -> g_j^-e x g_j^e
    std::vector<ExpVec> base = e < 0 ? conj_inv_[j] : conj_[j];
    std::vector<ExpVec> result;
    for (std::size_t i = 0; i < j; ++i) result.push_back(generator(i));
    auto compose = [&](const std::vector<ExpVec>& outer, const std::vector<ExpVec>& inner) {
        std::vector<ExpVec> c;
        for (const auto& g : inner) c.push_back(apply_auto(outer, g));
        return c;
    };
    for (Int k = abs(e); k > 0; k /= 2) {
        if (k % 2 == 1) result = compose(base, result);
        if (k > 1) base = compose(base, base);
    }
    return result;
}

ExpVec PolycyclicPresentation::multiply(const ExpVec& u, const ExpVec& v) const
{
    ExpVec r = u;
    for (std::size_t i = size(); i-- > 0;) mul_gen_power(r, i, v[i]);
    return r;
}

ExpVec PolycyclicPresentation::inverse(const ExpVec& u) const
{
    ExpVec r = identity();
    for (std::size_t i = 0; i < size(); ++i) mul_gen_power(r, i, -u[i]);
    return r;
}

ExpVec PolycyclicPresentation::power(const ExpVec& u, const Int& n) const
{
    if (n < 0) return power(inverse(u), -n);
    ExpVec result = identity(), base = u;
    Int e = n;
    while (e > 0) {
        if (e % 2 == 1) result = multiply(result, base);
        e /= 2;
        if (e > 0) base = multiply(base, base);
    }
    return result;
}

ExpVec PolycyclicPresentation::commutator(const ExpVec& u, const ExpVec& v) const
{
    return multiply(multiply(u, v), inverse(multiply(v, u)));
}

ExpVec PolycyclicPresentation::conjugate(const ExpVec& u, const ExpVec& by) const
{
    return multiply(multiply(by, u), inverse(by));
}

ExpVec PolycyclicPresentation::collect(const Word& w) const
{
    ExpVec r = identity();
    for (const auto& l : w) {
        if (l.gen >= size())
            throw Error(ErrorKind::BadWord, "unknown generator index " + std::to_string(l.gen));
        mul_gen_power(r, l.gen, l.exp);
    }
    return r;
}

ExpVec PolycyclicPresentation::collect(const std::vector<std::pair<std::string, Int>>& w) const
{
    Word word;
    for (const auto& [name, e] : w) {
        const auto i = index_of(name);
        if (!i) throw Error(ErrorKind::BadWord, "unknown generator '" + name + "'");
        word.push_back({*i, e});
    }
    return collect(word);
}

void PolycyclicPresentation::check_consistency() const
{
    const std::size_t k = size();
    auto fail = [&](const std::string& what) { throw Error(ErrorKind::Inconsistent, "inconsistent presentation: " + what); };
    auto g = [&](std::size_t i) { return generator(i); };
    auto gp = [&](std::size_t i, const Int& e) {
        ExpVec v = identity();
        mul_gen_power(v, i, e);
        return v;
    };

    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            // conjugation by g_j and by g_j^-1 are mutually inverse
            if (multiply(multiply(inverse(g(j)), conj_inv_[j][i]), g(j)) != g(i))
                fail(name(j) + " conjugates of " + name(i) + " are not inverse");
            if (multiply(multiply(g(j), conj_[j][i]), inverse(g(j))) != g(i))
                fail(name(j) + " inverse conjugates of " + name(i) + " are not inverse");
        }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b)
            for (std::size_t c = 0; c < b; ++c)
                if (multiply(multiply(g(a), g(b)), g(c)) != multiply(g(a), multiply(g(b), g(c))))
                    fail("overlap " + name(a) + name(b) + name(c));
    for (std::size_t j = 0; j < k; ++j) {
        const auto& mj = orders_[j];
        for (std::size_t i = 0; i < j; ++i) {
            if (mj) {
                const ExpVec lhs = multiply(gp(j, *mj), g(i));
                const ExpVec rhs = multiply(gp(j, *mj - 1), multiply(g(j), g(i)));
                if (lhs != rhs) fail("power overlap " + name(j) + "^m " + name(i));
            }
            const auto& mi = orders_[i];
            if (mi) {
                const ExpVec lhs = multiply(g(j), gp(i, *mi));
                const ExpVec rhs = multiply(multiply(g(j), g(i)), gp(i, *mi - 1));
                if (lhs != rhs) fail("power overlap " + name(j) + " " + name(i) + "^m");
            }
            if (!mi) {
                const ExpVec lhs = multiply(multiply(g(j), inverse(g(i))), g(i));
                if (lhs != g(j)) fail("inverse overlap " + name(j) + " " + name(i));
            }
        }
        if (mj) {
            const ExpVec w = gp(j, *mj);
            if (multiply(g(j), w) != multiply(w, g(j))) fail("power relation of " + name(j) + " not central in <g_j>");
        }
    }
}

std::string PolycyclicPresentation::format(const ExpVec& v) const
{
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = size(); i-- > 0;) {
        if (v[i] == 0) continue;
        if (!first) os << ' ';
        os << name(i);
        if (v[i] != 1) os << '^' << v[i];
        first = false;
    }
    if (first) os << '1';
    return os.str();
}

AbelianInvariants abelianization(const PolycyclicPresentation& p)
{
    const std::size_t k = p.size();
    std::vector<IntVector> rows;
    for (std::size_t j = 0; j < k; ++j) {
        if (const auto& m = p.relative_order(j)) {
            IntVector r(k);
            for (std::size_t i = 0; i < k; ++i) r[i] = -p.power_relation(j)[i];
            r[j] += *m;
            rows.push_back(r);
        }
        for (std::size_t i = 0; i < j; ++i) {
            IntVector r = p.conjugate_relation(j, i);
            r[i] -= 1;
            rows.push_back(r);
        }
    }
    if (rows.empty()) return cokernel(IntMatrix(0, k), k);
    return cokernel(IntMatrix::from_rows(rows), k);
}

} // namespace geo4
