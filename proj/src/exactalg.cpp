#include "geo4/exactalg.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace geo4 {

std::string to_string(const Int& v)
{
    return v.str();
}

std::string to_string(const Rational& v)
{
    const Int num = boost::multiprecision::numerator(v);
    const Int den = boost::multiprecision::denominator(v);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

Rational parse_rational(const std::string& s)
{
    auto parse_int = [&](const std::string& t) -> Int {
        if (t.empty()) throw Error(ErrorKind::Parse, "empty integer in '" + s + "'");
        std::size_t start = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (start == t.size()) throw Error(ErrorKind::Parse, "bad integer '" + t + "'");
        for (std::size_t i = start; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') throw Error(ErrorKind::Parse, "bad integer '" + t + "'");
        return Int(t[0] == '+' ? t.substr(1) : t);
    };
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(parse_int(s));
    const Int den = parse_int(s.substr(slash + 1));
    if (den == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + s + "'");
    return Rational(parse_int(s.substr(0, slash)), den);
}

Int mod(const Int& a, const Int& q)
{
    const Int m = abs(q);
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

Int floor_div(const Int& a, const Int& b)
{
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Int gcd(const Int& a, const Int& b)
{
    Int x = abs(a), y = abs(b);
    while (y != 0) {
        Int r = x % y;
        x = y;
        y = r;
    }
    return x;
}

Int lcm(const Int& a, const Int& b)
{
    if (a == 0 || b == 0) return 0;
    return abs(a / gcd(a, b) * b);
}

Xgcd xgcd(const Int& a, const Int& b)
{
    Int old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        Int qt = old_r / r;
        Int tmp = old_r - qt * r;
        old_r = r;
        r = tmp;
        tmp = old_s - qt * s;
        old_s = s;
        s = tmp;
        tmp = old_t - qt * t;
        old_t = t;
        t = tmp;
    }
    if (old_r < 0) return {-old_r, -old_s, -old_t};
    return {old_r, old_s, old_t};
}

// ---------------------------------------------------------------- IntMatrix

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols)
{
}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<Int>> rows)
{
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw Error(ErrorKind::InvalidArgument, "ragged matrix literal");
        for (const auto& v : r) data_.push_back(v);
    }
}

IntMatrix IntMatrix::identity(std::size_t n)
{
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::zero(std::size_t rows, std::size_t cols)
{
    return IntMatrix(rows, cols);
}

IntMatrix IntMatrix::from_rows(const std::vector<IntVector>& rows)
{
    IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols_) throw Error(ErrorKind::InvalidArgument, "ragged matrix rows");
        for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

IntMatrix IntMatrix::from_columns(const std::vector<IntVector>& cols, std::size_t height)
{
    IntMatrix m(height, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != height) throw Error(ErrorKind::InvalidArgument, "column of wrong height");
        for (std::size_t i = 0; i < height; ++i) m(i, j) = cols[j][i];
    }
    return m;
}

bool IntMatrix::is_zero() const
{
    return std::all_of(data_.begin(), data_.end(), [](const Int& v) { return v == 0; });
}

bool IntMatrix::is_identity() const
{
    return is_square() && *this == identity(rows_);
}

IntVector IntMatrix::row(std::size_t i) const
{
    return IntVector(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
}

IntVector IntMatrix::column(std::size_t j) const
{
    IntVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

IntMatrix IntMatrix::transpose() const
{
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Int IntMatrix::trace() const
{
    Int t = 0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

Int IntMatrix::determinant() const
{
    if (!is_square()) throw Error(ErrorKind::InvalidArgument, "determinant of non-square matrix");
    const std::size_t n = rows_;
    if (n == 0) return 1;
    // Bareiss fraction-free elimination.
    IntMatrix m = *this;
    Int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

IntMatrix IntMatrix::inverse() const
{
    const Int d = determinant();
    if (d != 1 && d != -1) throw Error(ErrorKind::NotUnimodular, "matrix is not unimodular: det = " + d.str());
    const std::size_t n = rows_;
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = Rational((*this)(i, j));
        a[i][n + i] = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (a[p][c] == 0) ++p;
        std::swap(a[p], a[c]);
        const Rational piv = a[c][c];
        for (auto& v : a[c]) v /= piv;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            const Rational f = a[i][c];
            for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    IntMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = boost::multiprecision::numerator(a[i][n + j]);
    return inv;
}

IntMatrix IntMatrix::power(long long k) const
{
    if (!is_square()) throw Error(ErrorKind::InvalidArgument, "power of non-square matrix");
    IntMatrix base = k < 0 ? inverse() : *this;
    unsigned long long e = k < 0 ? static_cast<unsigned long long>(-(k + 1)) + 1 : static_cast<unsigned long long>(k);
    IntMatrix result = identity(rows_);
    while (e) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

IntMatrix IntMatrix::reduced(const Int& q) const
{
    IntMatrix r = *this;
    for (auto& v : r.data_) v = mod(v, q);
    return r;
}

Int IntMatrix::content() const
{
    Int g = 0;
    for (const auto& v : data_) g = gcd(g, v);
    return g;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const
{
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorKind::InvalidArgument, "shape mismatch in +");
    IntMatrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
    return r;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const
{
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorKind::InvalidArgument, "shape mismatch in -");
    IntMatrix r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
    return r;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const
{
    if (cols_ != o.rows_) throw Error(ErrorKind::InvalidArgument, "shape mismatch in *");
    IntMatrix r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Int& a = (*this)(i, k);
            if (a == 0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
        }
    return r;
}

IntVector IntMatrix::operator*(const IntVector& v) const
{
    if (cols_ != v.size()) throw Error(ErrorKind::InvalidArgument, "shape mismatch in matrix-vector product");
    IntVector r(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
}

IntMatrix IntMatrix::operator*(const Int& s) const
{
    IntMatrix r = *this;
    for (auto& v : r.data_) v *= s;
    return r;
}

bool IntMatrix::operator<(const IntMatrix& o) const
{
    if (rows_ != o.rows_) return rows_ < o.rows_;
    if (cols_ != o.cols_) return cols_ < o.cols_;
    return data_ < o.data_;
}

std::string IntMatrix::to_string() const
{
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i) os << ',';
        os << '[';
        for (std::size_t j = 0; j < cols_; ++j) {
            if (j) os << ',';
            os << (*this)(i, j);
        }
        os << ']';
    }
    os << ']';
    return os.str();
}

IntMatrix hstack(const IntMatrix& a, const IntMatrix& b)
{
    if (a.cols() == 0) return b;
    if (b.cols() == 0) return a;
    if (a.rows() != b.rows()) throw Error(ErrorKind::InvalidArgument, "hstack height mismatch");
    IntMatrix r(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) r(i, a.cols() + j) = b(i, j);
    }
    return r;
}

// --------------------------------------------------------------- Polynomial

int Polynomial::degree() const
{
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
        if (coeffs[i] != 0) return i;
    return -1;
}

Int Polynomial::operator()(const Int& x) const
{
    Int r = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * x + *it;
    return r;
}

Polynomial Polynomial::reduced(const Int& q) const
{
    Polynomial r = *this;
    for (auto& c : r.coeffs) c = mod(c, q);
    return r;
}

std::string Polynomial::to_string() const
{
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        const Int& c = coeffs[i];
        if (c == 0) continue;
        Int a = abs(c);
        if (first) {
            if (c < 0) os << '-';
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        if (a != 1 || i == 0) os << a;
        if (i >= 1) os << 'x';
        if (i >= 2) os << '^' << i;
        first = false;
    }
    if (first) os << '0';
    return os.str();
}

Polynomial charpoly(const IntMatrix& a)
{
    if (!a.is_square() || (a.rows() != 2 && a.rows() != 3))
        throw Error(ErrorKind::UnsupportedDimension,
                    "charpoly supports 2x2 and 3x3 matrices, got " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()));
    if (a.rows() == 2) return Polynomial{{a.determinant(), -a.trace(), 1}};
    Int minors = 0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) minors += a(i, i) * a(j, j) - a(i, j) * a(j, i);
    return Polynomial{{-a.determinant(), minors, -a.trace(), 1}};
}

// ------------------------------------------------------------------- cubics

const char* cubic_kind_name(CubicKind k)
{
    switch (k) {
    case CubicKind::TripleRootOne: return "TripleRootOne";
    case CubicKind::ThreeDistinctRealAllPositive: return "ThreeDistinctRealAllPositive";
    case CubicKind::ThreeDistinctRealNotAllPositive: return "ThreeDistinctRealNotAllPositive";
    case CubicKind::HasRootOneTwoOtherReal: return "HasRootOneTwoOtherReal";
    case CubicKind::OneRealTwoComplexConjugate: return "OneRealTwoComplexConjugate";
    case CubicKind::Other: return "Other";
    }
    return "Other";
}

namespace {

void check_cubic(const Polynomial& p)
{
    if (p.degree() != 3 || p.coeffs[3] != 1)
        throw Error(ErrorKind::InvalidCubic, "expected a monic cubic, got " + p.to_string());
    if (p.coeffs[0] != -1)
        throw Error(ErrorKind::InvalidCubic, "constant term must be -1, got " + p.to_string());
}

using RPoly = std::vector<Rational>;

void trim(RPoly& p)
{
    while (!p.empty() && p.back() == 0) p.pop_back();
}

RPoly derivative(const RPoly& p)
{
    RPoly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
    trim(d);
    return d;
}

RPoly remainder(RPoly a, const RPoly& b)
{
    while (a.size() >= b.size() && !a.empty()) {
        const Rational f = a.back() / b.back();
        const std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

int sign_of(const Rational& v)
{
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

// Sign of p at x, or at +-infinity when x is empty (dir gives which one).
int sign_at(const RPoly& p, const std::optional<Rational>& x, int dir)
{
    if (x) {
        Rational r = 0;
        for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * *x + *it;
        return sign_of(r);
    }
    const int lead = sign_of(p.back());
    const bool odd = (p.size() - 1) % 2 == 1;
    return (dir < 0 && odd) ? -lead : lead;
}

int variations(const std::vector<RPoly>& seq, const std::optional<Rational>& x, int dir)
{
    int count = 0, last = 0;
    for (const auto& p : seq) {
        const int s = sign_at(p, x, dir);
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

} // namespace

int sturm_root_count(const Polynomial& p, const std::optional<Rational>& lo,
                     const std::optional<Rational>& hi)
{
    RPoly p0;
    for (const auto& c : p.coeffs) p0.push_back(Rational(c));
    trim(p0);
    if (p0.size() <= 1) return 0;
    std::vector<RPoly> seq{p0, derivative(p0)};
    while (seq.back().size() > 1) {
        RPoly r = remainder(seq[seq.size() - 2], seq.back());
        if (r.empty()) break;
        for (auto& c : r) c = -c;
        seq.push_back(r);
    }
    // Roots at the endpoints are excluded.
    return variations(seq, lo, -1) - variations(seq, hi, +1) - ((hi && sign_at(p0, hi, 1) == 0) ? 1 : 0);
}

Int cubic_discriminant(const Polynomial& p)
{
    if (p.degree() != 3) throw Error(ErrorKind::InvalidCubic, "not a cubic: " + p.to_string());
    const Int& d = p.coeffs[0];
    const Int& c = p.coeffs[1];
    const Int& b = p.coeffs[2];
    const Int& a = p.coeffs[3];
    return b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d;
}

CubicProfile cubic_profile(const Polynomial& p)
{
    check_cubic(p);
    CubicProfile prof;
    prof.discriminant = cubic_discriminant(p);
    prof.trace = -p.coeffs[2];
    prof.trace_inverse = p.coeffs[1];

    if (p == Polynomial{{-1, 3, -3, 1}}) {
        prof.kind = CubicKind::TripleRootOne;
    } else if (prof.discriminant < 0) {
        prof.kind = CubicKind::OneRealTwoComplexConjugate;
    } else if (prof.discriminant == 0) {
        // A repeated root must be +-1; with constant term -1 this leaves (x+1)^2(x-1).
        prof.kind = CubicKind::Other;
    } else {
        if (sturm_root_count(p, std::nullopt, std::nullopt) != 3)
            throw std::logic_error("positive discriminant but Sturm count differs from 3");
        if (p(1) == 0)
            prof.kind = CubicKind::HasRootOneTwoOtherReal;
        else if (sturm_root_count(p, Rational(0), std::nullopt) == 3)
            prof.kind = CubicKind::ThreeDistinctRealAllPositive;
        else
            prof.kind = CubicKind::ThreeDistinctRealNotAllPositive;
    }
    return prof;
}

CubicProfile cubic_profile(const IntMatrix& a)
{
    CubicProfile prof = cubic_profile(charpoly(a));
    if (prof.kind == CubicKind::TripleRootOne) {
        const IntMatrix u = a - IntMatrix::identity(a.rows());
        IntMatrix pw = u;
        int k = 1;
        while (!pw.is_zero()) {
            pw = pw * u;
            ++k;
        }
        prof.unipotency_degree = k;
    }
    return prof;
}

// --------------------------------------------------------------------- SNF

SmithForm smith_normal_form(const IntMatrix& input)
{
    IntMatrix a = input;
    const std::size_t m = a.rows(), n = a.cols();
    const std::size_t r = std::min(m, n);

    auto swap_rows = [&](std::size_t i, std::size_t j) {
        if (i != j)
            for (std::size_t c = 0; c < n; ++c) std::swap(a(i, c), a(j, c));
    };
    auto swap_cols = [&](std::size_t i, std::size_t j) {
        if (i != j)
            for (std::size_t c = 0; c < m; ++c) std::swap(a(c, i), a(c, j));
    };

    for (std::size_t t = 0; t < r; ++t) {
        for (;;) {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            std::size_t pi = m, pj = n;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j)
                    if (a(i, j) != 0 && (pi == m || abs(a(i, j)) < abs(a(pi, pj)))) {
                        pi = i;
                        pj = j;
                    }
            if (pi == m) goto done;
            swap_rows(t, pi);
            swap_cols(t, pj);

            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (a(i, t) == 0) continue;
                const Int f = a(i, t) / a(t, t);
                for (std::size_t c = t; c < n; ++c) a(i, c) -= f * a(t, c);
                if (a(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (a(t, j) == 0) continue;
                const Int f = a(t, j) / a(t, t);
                for (std::size_t c = t; c < m; ++c) a(c, j) -= f * a(c, t);
                if (a(t, j) != 0) clean = false;
            }
            if (!clean) continue;

            bool divides = true;
            for (std::size_t i = t + 1; i < m && divides; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (a(i, j) % a(t, t) != 0) {
                        for (std::size_t c = t; c < n; ++c) a(t, c) += a(i, c);
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
    }
done:
    SmithForm sf;
    for (std::size_t t = 0; t < r; ++t) {
        sf.diagonal.push_back(abs(a(t, t)));
        if (a(t, t) != 0) ++sf.rank;
    }
    return sf;
}

AbelianInvariants cokernel(const IntMatrix& relations, std::size_t n)
{
    AbelianInvariants inv;
    if (relations.rows() == 0 || relations.cols() == 0) {
        inv.free_rank = n;
        return inv;
    }
    if (relations.cols() != n) throw Error(ErrorKind::InvalidArgument, "relation matrix width mismatch");
    const SmithForm sf = smith_normal_form(relations);
    inv.free_rank = n - sf.rank;
    for (const auto& d : sf.diagonal)
        if (d > 1) inv.torsion.push_back(d);
    return inv;
}

std::string AbelianInvariants::to_string() const
{
    std::ostringstream os;
    bool first = true;
    if (free_rank > 0) {
        os << "Z";
        if (free_rank > 1) os << '^' << free_rank;
        first = false;
    }
    for (const auto& t : torsion) {
        os << (first ? "" : " + ") << "Z/" << t;
        first = false;
    }
    if (first) os << '0';
    return os.str();
}

// ------------------------------------------------------------ finite order

std::optional<int> matrix_order(const IntMatrix& a, int cutoff)
{
    if (!a.is_square()) throw Error(ErrorKind::InvalidArgument, "matrix_order needs a square matrix");
    if (cutoff < kGL3ElementOrderBound)
        throw Error(ErrorKind::InvalidArgument, "matrix_order cutoff must be at least 12");
    const Int d = a.determinant();
    if (d != 1 && d != -1) throw Error(ErrorKind::NotUnimodular, "matrix is not unimodular: det = " + d.str());
    const IntMatrix id = IntMatrix::identity(a.rows());
    IntMatrix p = a;
    for (int k = 1; k <= cutoff; ++k) {
        if (p == id) return k;
        p = p * a;
    }
    return std::nullopt;
}

std::optional<std::vector<IntMatrix>> subgroup_closure(const std::vector<IntMatrix>& gens, std::size_t bound,
                                                       std::size_t dim)
{
    if (!gens.empty()) dim = gens.front().rows();
    for (const auto& g : gens) {
        if (!g.is_square() || g.rows() != dim)
            throw Error(ErrorKind::InvalidArgument, "generators must share one square dimension");
        const Int d = g.determinant();
        if (d != 1 && d != -1) throw Error(ErrorKind::NotUnimodular, "generator is not unimodular");
    }
    std::set<IntMatrix> seen{IntMatrix::identity(dim)};
    std::vector<IntMatrix> frontier{IntMatrix::identity(dim)};
    while (!frontier.empty()) {
        std::vector<IntMatrix> next;
        for (const auto& x : frontier)
            for (const auto& g : gens) {
                IntMatrix y = x * g;
                if (seen.insert(y).second) {
                    if (seen.size() > bound) return std::nullopt;
                    next.push_back(std::move(y));
                }
            }
        frontier = std::move(next);
    }
    return std::vector<IntMatrix>(seen.begin(), seen.end());
}

// ------------------------------------------------------- conjugacy mod q

namespace {

using SmallMat = std::vector<long long>;

SmallMat small_reduce(const IntMatrix& a, long long q)
{
    SmallMat s(a.rows() * a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s[i * a.cols() + j] = mod(a(i, j), q).convert_to<long long>();
    return s;
}

SmallMat small_mul(const SmallMat& x, const SmallMat& y, std::size_t n, long long q)
{
    SmallMat r(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const long long a = x[i * n + k];
            if (!a) continue;
            for (std::size_t j = 0; j < n; ++j) r[i * n + j] = (r[i * n + j] + a * y[k * n + j]) % q;
        }
    return r;
}

long long mod_pow(long long b, long long e, long long q)
{
    long long r = 1 % q;
    b %= q;
    while (e) {
        if (e & 1) r = r * b % q;
        b = b * b % q;
        e >>= 1;
    }
    return r;
}

int rank_mod_p(SmallMat a, std::size_t n, long long p)
{
    int rank = 0;
    for (std::size_t c = 0; c < n && static_cast<std::size_t>(rank) < n; ++c) {
        std::size_t piv = rank;
        while (piv < n && a[piv * n + c] == 0) ++piv;
        if (piv == n) continue;
        for (std::size_t j = 0; j < n; ++j) std::swap(a[piv * n + j], a[rank * n + j]);
        const long long inv = mod_pow(a[rank * n + c], p - 2, p);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == static_cast<std::size_t>(rank) || a[i * n + c] == 0) continue;
            const long long f = a[i * n + c] * inv % p;
            for (std::size_t j = 0; j < n; ++j) a[i * n + j] = ((a[i * n + j] - f * a[rank * n + j]) % p + p) % p;
        }
        ++rank;
    }
    return rank;
}

bool is_prime(long long q)
{
    if (q < 2) return false;
    for (long long d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

} // namespace

std::optional<IntMatrix> conjugate_mod_q(const IntMatrix& a, const IntMatrix& b, long long q,
                                         const ConjugacyLimits& limits)
{
    if (!a.is_square() || a.rows() != b.rows() || !b.is_square())
        throw Error(ErrorKind::InvalidArgument, "conjugate_mod_q needs square matrices of one dimension");
    if (q < 2) throw Error(ErrorKind::InvalidArgument, "modulus must be at least 2");
    const std::size_t n = a.rows();
    const long long limit = n == 2 ? limits.max_q_dim2 : (n == 3 ? limits.max_q_dim3 : 0);
    if (q > limit)
        throw Error(ErrorKind::RangeExceeded, "modulus " + std::to_string(q) + " outside the brute-force range for " +
                                                  std::to_string(n) + "x" + std::to_string(n));

    if (charpoly(a).reduced(q) != charpoly(b).reduced(q)) return std::nullopt;

    const SmallMat sa = small_reduce(a, q), sb = small_reduce(b, q);
    if (is_prime(q)) {
        for (long long lambda = 0; lambda < q; ++lambda) {
            SmallMat ma = sa, mb = sb;
            for (std::size_t i = 0; i < n; ++i) {
                ma[i * n + i] = (ma[i * n + i] - lambda + q) % q;
                mb[i * n + i] = (mb[i * n + i] - lambda + q) % q;
            }
            SmallMat pa = ma, pb = mb;
            for (std::size_t k = 1; k <= n; ++k) {
                if (rank_mod_p(pa, n, q) != rank_mod_p(pb, n, q)) return std::nullopt;
                pa = small_mul(pa, ma, n, q);
                pb = small_mul(pb, mb, n, q);
            }
        }
    }

    SmallMat p(n * n, 0);
    const std::size_t cells = n * n;
    for (;;) {
        // P A = B P
        if (small_mul(p, sa, n, q) == small_mul(sb, p, n, q)) {
            IntMatrix pm(n, n);
            for (std::size_t i = 0; i < cells; ++i) pm(i / n, i % n) = p[i];
            if (gcd(pm.determinant(), Int(q)) == 1) return pm;
        }
        std::size_t i = 0;
        while (i < cells && ++p[i] == q) p[i++] = 0;
        if (i == cells) break;
    }
    return std::nullopt;
}

// ----------------------------------------------------------------- lattices

namespace {

// Column echelon form by unimodular column operations; returns the number of
// nonzero columns (which come first). If u is non-null it accumulates the
// transform so that input * u = output.
std::size_t column_echelon(IntMatrix& h, IntMatrix* u)
{
    const std::size_t m = h.rows(), n = h.cols();
    auto col_op = [&](IntMatrix& x, std::size_t i, std::size_t j, const Int& a, const Int& b, const Int& c,
                      const Int& d) {
        // (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const Int vi = x(r, i), vj = x(r, j);
            x(r, i) = a * vi + b * vj;
            x(r, j) = c * vi + d * vj;
        }
    };
    std::size_t p = 0;
    for (std::size_t row = 0; row < m && p < n; ++row) {
        for (std::size_t j = p + 1; j < n; ++j) {
            if (h(row, j) == 0) continue;
            const Int x = h(row, p), y = h(row, j);
            const Xgcd g = xgcd(x, y);
            const Int xd = x / g.g, yd = y / g.g;
            col_op(h, p, j, g.s, g.t, -yd, xd);
            if (u) col_op(*u, p, j, g.s, g.t, -yd, xd);
        }
        if (h(row, p) == 0) continue;
        if (h(row, p) < 0) {
            for (std::size_t r = 0; r < m; ++r) h(r, p) = -h(r, p);
            if (u)
                for (std::size_t r = 0; r < u->rows(); ++r) (*u)(r, p) = -(*u)(r, p);
        }
        // Reduce earlier columns modulo this pivot for a canonical form.
        for (std::size_t j = 0; j < p; ++j) {
            const Int f = floor_div(h(row, j), h(row, p));
            if (f == 0) continue;
            for (std::size_t r = 0; r < m; ++r) h(r, j) -= f * h(r, p);
            if (u)
                for (std::size_t r = 0; r < u->rows(); ++r) (*u)(r, j) -= f * (*u)(r, p);
        }
        ++p;
    }
    return p;
}

} // namespace

IntMatrix hermite_basis(const IntMatrix& gens)
{
    IntMatrix h = gens;
    const std::size_t r = column_echelon(h, nullptr);
    IntMatrix b(h.rows(), r);
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < r; ++j) b(i, j) = h(i, j);
    return b;
}

ColumnHermite column_hermite(const IntMatrix& m)
{
    ColumnHermite r{m, IntMatrix::identity(m.cols()), 0};
    r.rank = column_echelon(r.form, &r.transform);
    return r;
}

bool same_lattice(const IntMatrix& g1, const IntMatrix& g2)
{
    return hermite_basis(g1) == hermite_basis(g2);
}

std::optional<IntVector> lattice_coordinates(const IntMatrix& basis, const IntVector& v)
{
    IntVector res = v;
    IntVector x(basis.cols());
    std::size_t row = 0;
    for (std::size_t k = 0; k < basis.cols(); ++k) {
        while (row < basis.rows() && basis(row, k) == 0) {
            if (res[row] != 0) return std::nullopt;
            ++row;
        }
        if (row == basis.rows()) return std::nullopt;
        if (res[row] % basis(row, k) != 0) return std::nullopt;
        x[k] = res[row] / basis(row, k);
        for (std::size_t i = 0; i < basis.rows(); ++i) res[i] -= x[k] * basis(i, k);
        ++row;
    }
    for (const auto& r : res)
        if (r != 0) return std::nullopt;
    return x;
}

bool lattice_contains(const IntMatrix& gens, const IntVector& v)
{
    if (gens.cols() == 0) return std::all_of(v.begin(), v.end(), [](const Int& x) { return x == 0; });
    return lattice_coordinates(hermite_basis(gens), v).has_value();
}

IntMatrix integer_kernel(const IntMatrix& m)
{
    IntMatrix h = m;
    IntMatrix u = IntMatrix::identity(m.cols());
    const std::size_t r = column_echelon(h, &u);
    IntMatrix k(m.cols(), m.cols() - r);
    for (std::size_t i = 0; i < m.cols(); ++i)
        for (std::size_t j = r; j < m.cols(); ++j) k(i, j - r) = u(i, j);
    return k;
}

IntMatrix lll_reduce(const IntMatrix& basis)
{
    const std::size_t n = basis.cols(), dim = basis.rows();
    std::vector<IntVector> b(n);
    for (std::size_t j = 0; j < n; ++j) b[j] = basis.column(j);

    std::vector<std::vector<Rational>> mu(n, std::vector<Rational>(n));
    std::vector<Rational> bstar_norm(n);
    auto gram_schmidt = [&]() {
        std::vector<std::vector<Rational>> bs(n, std::vector<Rational>(dim));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < dim; ++t) bs[i][t] = Rational(b[i][t]);
            for (std::size_t j = 0; j < i; ++j) {
                Rational d = 0;
                for (std::size_t t = 0; t < dim; ++t) d += Rational(b[i][t]) * bs[j][t];
                mu[i][j] = d / bstar_norm[j];
                for (std::size_t t = 0; t < dim; ++t) bs[i][t] -= mu[i][j] * bs[j][t];
            }
            bstar_norm[i] = 0;
            for (std::size_t t = 0; t < dim; ++t) bstar_norm[i] += bs[i][t] * bs[i][t];
        }
    };
    gram_schmidt();
    const Rational delta(3, 4);
    std::size_t k = 1;
    while (k < n) {
        for (std::size_t jj = k; jj-- > 0;) {
            const Rational m = mu[k][jj];
            // nearest integer
            const Int r = floor_div(
                boost::multiprecision::numerator(m) * 2 + boost::multiprecision::denominator(m),
                boost::multiprecision::denominator(m) * 2);
            if (r != 0) {
                for (std::size_t t = 0; t < dim; ++t) b[k][t] -= r * b[jj][t];
                gram_schmidt();
            }
        }
        if (bstar_norm[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar_norm[k - 1]) {
            ++k;
        } else {
            std::swap(b[k], b[k - 1]);
            gram_schmidt();
            k = std::max<std::size_t>(k - 1, 1);
        }
    }
    return IntMatrix::from_columns(b, dim);
}

AbelianInvariants lattice_quotient(const IntMatrix& outer, const IntMatrix& inner)
{
    const IntMatrix ob = hermite_basis(outer);
    const std::size_t r = ob.cols();
    std::vector<IntVector> rows;
    for (std::size_t j = 0; j < inner.cols(); ++j) {
        auto c = lattice_coordinates(ob, inner.column(j));
        if (!c) throw Error(ErrorKind::InvalidArgument, "inner lattice is not contained in outer lattice");
        rows.push_back(*c);
    }
    if (rows.empty()) return cokernel(IntMatrix(0, r), r);
    return cokernel(IntMatrix::from_rows(rows), r);
}

} // namespace geo4
