#pragma once

// Independent reference computations used to check the library.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "geo4/exactalg.hpp"

namespace oracle {

using geo4::Int;
using geo4::IntMatrix;
using geo4::Rational;

// Leibniz expansion.
inline Int det_leibniz(const IntMatrix& a)
{
    const std::size_t n = a.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Int total = 0;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        Int term = inversions % 2 ? -1 : 1;
        for (std::size_t i = 0; i < n; ++i) term *= a(i, perm[i]);
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

// det(xI - A) sampled at x = 0..n and interpolated.
inline std::vector<Int> charpoly_by_interpolation(const IntMatrix& a)
{
    const std::size_t n = a.rows();
    std::vector<Rational> xs, ys;
    for (std::size_t x = 0; x <= n; ++x) {
        IntMatrix m = IntMatrix::identity(n) * Int(x) - a;
        xs.push_back(Rational(x));
        ys.push_back(Rational(det_leibniz(m)));
    }
    std::vector<Rational> coeffs(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        std::vector<Rational> basis{Rational(1)};
        Rational denom = 1;
        for (std::size_t j = 0; j <= n; ++j) {
            if (j == i) continue;
            std::vector<Rational> next(basis.size() + 1);
            for (std::size_t k = 0; k < basis.size(); ++k) {
                next[k] -= basis[k] * xs[j];
                next[k + 1] += basis[k];
            }
            basis = next;
            denom *= xs[i] - xs[j];
        }
        for (std::size_t k = 0; k < basis.size(); ++k) coeffs[k] += ys[i] * basis[k] / denom;
    }
    std::vector<Int> out;
    for (const auto& c : coeffs) out.push_back(boost::multiprecision::numerator(c));
    return out;
}

inline void minors_rec(const IntMatrix& a, std::size_t k, std::vector<std::size_t>& rows, std::size_t next_row,
                       Int& g)
{
    if (rows.size() == k) {
        std::vector<std::size_t> cols;
        std::vector<bool> pick(a.cols(), false);
        std::fill(pick.begin(), pick.begin() + k, true);
        do {
            cols.clear();
            for (std::size_t j = 0; j < a.cols(); ++j)
                if (pick[j]) cols.push_back(j);
            IntMatrix sub(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) sub(i, j) = a(rows[i], cols[j]);
            g = geo4::gcd(g, det_leibniz(sub));
        } while (std::prev_permutation(pick.begin(), pick.end()));
        return;
    }
    for (std::size_t r = next_row; r < a.rows(); ++r) {
        rows.push_back(r);
        minors_rec(a, k, rows, r + 1, g);
        rows.pop_back();
    }
}

// Invariant factors from determinantal divisors.
inline std::vector<Int> invariant_factors(const IntMatrix& a)
{
    const std::size_t r = std::min(a.rows(), a.cols());
    std::vector<Int> out;
    Int prev = 1;
    for (std::size_t k = 1; k <= r; ++k) {
        Int g = 0;
        std::vector<std::size_t> rows;
        minors_rec(a, k, rows, 0, g);
        if (g == 0 || prev == 0) {
            out.push_back(0);
            prev = 0;
        } else {
            out.push_back(g / prev);
            prev = g;
        }
    }
    return out;
}

// Real roots of a monic cubic (constant term first) by the trigonometric /
// Cardano formulas in long double.
inline std::vector<long double> cubic_real_roots(const std::vector<Int>& c)
{
    const long double a = c[2].convert_to<long double>(), b = c[1].convert_to<long double>(),
                      d = c[0].convert_to<long double>();
    const long double p = b - a * a / 3, q = 2 * a * a * a / 27 - a * b / 3 + d;
    const long double disc = q * q / 4 + p * p * p / 27;
    std::vector<long double> roots;
    if (disc > 1e-12L) {
        const long double s = std::sqrt(disc);
        roots.push_back(std::cbrt(-q / 2 + s) + std::cbrt(-q / 2 - s) - a / 3);
    } else {
        const long double r = std::sqrt(-p / 3);
        const long double arg = r == 0 ? 0 : std::clamp<long double>(-q / (2 * r * r * r), -1, 1);
        const long double phi = std::acos(arg);
        for (int k = 0; k < 3; ++k) roots.push_back(2 * r * std::cos((phi + 2 * M_PIl * k) / 3) - a / 3);
    }
    return roots;
}

inline IntMatrix random_unimodular(std::mt19937_64& rng, std::size_t n, int height)
{
    std::uniform_int_distribution<int> dist(-height, height);
    for (;;) {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = dist(rng);
        const Int d = m.determinant();
        if (d == 1 || d == -1) return m;
    }
}

inline IntMatrix companion(const Int& m, const Int& n)
{
    // charpoly x^3 - m x^2 + n x - 1
    return IntMatrix{{0, 0, 1}, {1, 0, -n}, {0, 1, m}};
}

} // namespace oracle
