#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "geo4/error.hpp"

namespace geo4 {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using IntVector = std::vector<Int>;

std::string to_string(const Int& v);
// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& v);
Rational parse_rational(const std::string& s);

// Remainder in [0, |q|).
Int mod(const Int& a, const Int& q);
Int floor_div(const Int& a, const Int& b);
Int gcd(const Int& a, const Int& b);
Int lcm(const Int& a, const Int& b);

struct Xgcd {
    Int g;
    Int s;
    Int t;
};
// g = s*a + t*b, g >= 0.
Xgcd xgcd(const Int& a, const Int& b);

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols);
    IntMatrix(std::initializer_list<std::initializer_list<Int>> rows);

    static IntMatrix identity(std::size_t n);
    static IntMatrix zero(std::size_t rows, std::size_t cols);
    static IntMatrix from_rows(const std::vector<IntVector>& rows);
    static IntMatrix from_columns(const std::vector<IntVector>& cols, std::size_t height);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool is_zero() const;
    bool is_identity() const;

    Int& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Int& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    IntVector row(std::size_t i) const;
    IntVector column(std::size_t j) const;

    IntMatrix transpose() const;
    Int trace() const;
    Int determinant() const;
    // Requires det = +-1.
    IntMatrix inverse() const;
    // Negative exponents require det = +-1.
    IntMatrix power(long long k) const;
    // Entries reduced into [0, q).
    IntMatrix reduced(const Int& q) const;
    // Gcd of all entries; 0 for the zero matrix.
    Int content() const;

    IntMatrix operator+(const IntMatrix& o) const;
    IntMatrix operator-(const IntMatrix& o) const;
    IntMatrix operator*(const IntMatrix& o) const;
    IntVector operator*(const IntVector& v) const;
    IntMatrix operator*(const Int& s) const;

    bool operator==(const IntMatrix& o) const = default;
    bool operator<(const IntMatrix& o) const;

    std::string to_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Int> data_;
};

// Coefficients listed from the constant term upwards.
struct Polynomial {
    std::vector<Int> coeffs;

    int degree() const;
    Int operator()(const Int& x) const;
    Polynomial reduced(const Int& q) const;
    bool operator==(const Polynomial& o) const = default;
    std::string to_string() const;
};

Polynomial charpoly(const IntMatrix& a);

enum class CubicKind {
    TripleRootOne,
    ThreeDistinctRealAllPositive,
    ThreeDistinctRealNotAllPositive,
    HasRootOneTwoOtherReal,
    OneRealTwoComplexConjugate,
    Other,
};

const char* cubic_kind_name(CubicKind k);

struct CubicProfile {
    CubicKind kind = CubicKind::Other;
    // Only set by the matrix overload for (x-1)^3: least k with (A-I)^k = 0.
    std::optional<int> unipotency_degree;
    Int discriminant;
    Int trace;
    Int trace_inverse;
};

Int cubic_discriminant(const Polynomial& p);
CubicProfile cubic_profile(const Polynomial& p);
CubicProfile cubic_profile(const IntMatrix& a);

// Distinct real roots of p in the open interval (lo, hi); nullopt means unbounded.
int sturm_root_count(const Polynomial& p, const std::optional<Rational>& lo,
                     const std::optional<Rational>& hi);

struct SmithForm {
    std::vector<Int> diagonal;
    std::size_t rank = 0;
};

SmithForm smith_normal_form(const IntMatrix& m);

// Crystallographic restriction: elements of finite order in GL(2,Z) have order
// in {1,2,3,4,6}, in GL(3,Z) at most 12; finite subgroups of GL(2,Z) have at
// most 12 elements.
inline constexpr int kGL2ElementOrderBound = 6;
inline constexpr int kGL3ElementOrderBound = 12;
inline constexpr std::size_t kGL2FiniteSubgroupBound = 12;

// nullopt means infinite order.
std::optional<int> matrix_order(const IntMatrix& a, int cutoff = kGL3ElementOrderBound);

// nullopt means more than `bound` elements were found.
std::optional<std::vector<IntMatrix>> subgroup_closure(const std::vector<IntMatrix>& gens,
                                                       std::size_t bound = kGL2FiniteSubgroupBound,
                                                       std::size_t dim = 2);

struct ConjugacyLimits {
    long long max_q_dim2 = 7;
    long long max_q_dim3 = 3;
};

// Returns P with P A P^-1 = B (mod q), or nullopt.
std::optional<IntMatrix> conjugate_mod_q(const IntMatrix& a, const IntMatrix& b, long long q,
                                         const ConjugacyLimits& limits = {});

// Lattice tools. Lattices are spanned by the columns of a matrix.

// Canonical column Hermite basis of the column span (rank columns).
IntMatrix hermite_basis(const IntMatrix& gens);

// m * transform = form, with the first `rank` columns of form the Hermite
// basis and the rest zero; transform is unimodular.
struct ColumnHermite {
    IntMatrix form;
    IntMatrix transform;
    std::size_t rank = 0;
};
ColumnHermite column_hermite(const IntMatrix& m);
bool same_lattice(const IntMatrix& g1, const IntMatrix& g2);
bool lattice_contains(const IntMatrix& gens, const IntVector& v);
// Coordinates of v in a basis returned by hermite_basis.
std::optional<IntVector> lattice_coordinates(const IntMatrix& basis, const IntVector& v);
// Basis (columns) of {x in Z^cols : M x = 0}.
IntMatrix integer_kernel(const IntMatrix& m);
// LLL (delta = 3/4) on linearly independent columns.
IntMatrix lll_reduce(const IntMatrix& basis);

struct AbelianInvariants {
    std::size_t free_rank = 0;
    std::vector<Int> torsion; // each > 1, divisibility chain

    bool operator==(const AbelianInvariants& o) const = default;
    std::string to_string() const;
};

// Z^n modulo the row span of `relations` (relations has n columns).
AbelianInvariants cokernel(const IntMatrix& relations, std::size_t n);
// outer / inner for column-spanned lattices with inner inside outer.
AbelianInvariants lattice_quotient(const IntMatrix& outer, const IntMatrix& inner);

IntMatrix hstack(const IntMatrix& a, const IntMatrix& b);

} // namespace geo4
