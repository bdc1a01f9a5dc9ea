#include <doctest.h>

#include <random>

#include "geo4/exactalg.hpp"
#include "support/oracles.hpp"

using namespace geo4;

TEST_SUITE("exactalg") {

TEST_CASE("charpoly examples")
{
    CHECK(charpoly(IntMatrix::identity(3)) == Polynomial{{-1, 3, -3, 1}});
    CHECK(charpoly(oracle::companion(5, 6)) == Polynomial{{-1, 6, -5, 1}});
    CHECK(charpoly(IntMatrix{{2, 1}, {1, 1}}) == Polynomial{{1, -3, 1}});
    CHECK_THROWS_AS(charpoly(IntMatrix::identity(4)), Error);
    try {
        charpoly(IntMatrix::identity(4));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedDimension);
    }
}

TEST_CASE("charpoly agrees with interpolated Leibniz determinant")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> d(-7, 7);
    for (int it = 0; it < 60; ++it) {
        const std::size_t n = it % 2 ? 2 : 3;
        IntMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = d(rng);
        CHECK(charpoly(a).coeffs == oracle::charpoly_by_interpolation(a));
        CHECK(a.determinant() == oracle::det_leibniz(a));
    }
}

TEST_CASE("charpoly is a conjugacy invariant and the SL3 coefficients are traces")
{
    std::mt19937_64 rng(12);
    const IntMatrix a = oracle::companion(5, 6);
    for (int it = 0; it < 50; ++it) {
        const IntMatrix p = oracle::random_unimodular(rng, 3, 3);
        const IntMatrix b = p * a * p.inverse();
        CHECK(charpoly(b) == charpoly(a));
        CHECK(charpoly(b).coeffs[2] == -b.trace());
        CHECK(charpoly(b).coeffs[1] == b.inverse().trace());
    }
}

TEST_CASE("cubic profile examples")
{
    CHECK(cubic_profile(Polynomial{{-1, 3, -3, 1}}).kind == CubicKind::TripleRootOne);
    const auto sol = cubic_profile(Polynomial{{-1, 6, -5, 1}});
    CHECK(sol.kind == CubicKind::ThreeDistinctRealAllPositive);
    CHECK(sol.trace == 5);
    CHECK(sol.trace_inverse == 6);
    const auto c = cubic_profile(Polynomial{{-1, 0, -1, 1}});
    CHECK(c.kind == CubicKind::OneRealTwoComplexConjugate);
    CHECK(c.discriminant == -31);
    CHECK(cubic_profile(Polynomial{{-1, 4, -4, 1}}).kind == CubicKind::HasRootOneTwoOtherReal);
    CHECK(cubic_profile(Polynomial{{-1, -1, 1, 1}}).kind == CubicKind::Other);
    CHECK_THROWS_AS(cubic_profile(Polynomial{{1, 0, 0, 1}}), Error);
    CHECK_THROWS_AS(cubic_profile(Polynomial{{-1, 0, 1}}), Error);
}

TEST_CASE("cubic profile unipotency degree from the matrix")
{
    CHECK(cubic_profile(IntMatrix::identity(3)).unipotency_degree == 1);
    CHECK(cubic_profile(IntMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}).unipotency_degree == 2);
    CHECK(cubic_profile(IntMatrix{{1, 1, 0}, {0, 1, 1}, {0, 0, 1}}).unipotency_degree == 3);
    CHECK_FALSE(cubic_profile(oracle::companion(5, 6)).unipotency_degree.has_value());
}

TEST_CASE("sign changes of x^3-5x^2+6x-1 bracket three positive roots")
{
    const Polynomial p{{-1, 6, -5, 1}};
    CHECK(p(0) < 0);
    CHECK(p(1) > 0);
    CHECK(p(2) < 0);
    CHECK(p(4) > 0);
    CHECK(sturm_root_count(p, Rational(0), Rational(1)) == 1);
    CHECK(sturm_root_count(p, Rational(1), Rational(2)) == 1);
    CHECK(sturm_root_count(p, Rational(2), Rational(4)) == 1);
}

TEST_CASE("cubic profile agrees with numerical roots on generated cubics")
{
    for (int m = -12; m <= 12; ++m)
        for (int n = -12; n <= 12; ++n) {
            const Polynomial p{{-1, n, -m, 1}};
            const auto prof = cubic_profile(p);
            // Discriminant sign and the kind must match in both directions.
            const bool three_real = prof.kind == CubicKind::ThreeDistinctRealAllPositive ||
                                    prof.kind == CubicKind::ThreeDistinctRealNotAllPositive ||
                                    prof.kind == CubicKind::HasRootOneTwoOtherReal;
            CHECK((prof.kind == CubicKind::OneRealTwoComplexConjugate) == (prof.discriminant < 0));
            CHECK(three_real == (prof.discriminant > 0));
            if (prof.discriminant > 0) {
                const auto roots = oracle::cubic_real_roots(p.coeffs);
                REQUIRE(roots.size() == 3);
                bool all_pos = true, has_one = false;
                for (auto r : roots) {
                    if (r <= 0) all_pos = false;
                    if (std::fabs(r - 1) < 1e-9L) has_one = true;
                }
                if (has_one)
                    CHECK(prof.kind == CubicKind::HasRootOneTwoOtherReal);
                else
                    CHECK((prof.kind == CubicKind::ThreeDistinctRealAllPositive) == all_pos);
            }
        }
}

TEST_CASE("smith normal form examples")
{
    const auto z = smith_normal_form(IntMatrix::zero(2, 2));
    CHECK(z.diagonal == std::vector<Int>{0, 0});
    CHECK(z.rank == 0);
    CHECK(smith_normal_form(IntMatrix{{2, 0}, {0, 3}}).diagonal == std::vector<Int>{1, 6});
    const IntMatrix u = oracle::companion(5, 6) - IntMatrix::identity(3);
    CHECK(smith_normal_form(u).diagonal == std::vector<Int>{1, 1, 1});
}

TEST_CASE("smith normal form matches determinantal divisors")
{
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> d(-9, 9), shape(1, 4);
    for (int it = 0; it < 80; ++it) {
        IntMatrix a(shape(rng), shape(rng));
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = it % 5 == 0 ? 2 * d(rng) : d(rng);
        const auto sf = smith_normal_form(a);
        CHECK(sf.diagonal == oracle::invariant_factors(a));
        for (std::size_t i = 0; i + 1 < sf.diagonal.size(); ++i)
            if (sf.diagonal[i] != 0) CHECK(sf.diagonal[i + 1] % sf.diagonal[i] == 0);
    }
}

TEST_CASE("smith normal form is unchanged by unimodular multiplication")
{
    std::mt19937_64 rng(14);
    std::uniform_int_distribution<int> d(-6, 6);
    for (int it = 0; it < 40; ++it) {
        IntMatrix a(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) a(i, j) = d(rng);
        const IntMatrix p = oracle::random_unimodular(rng, 3, 2), q = oracle::random_unimodular(rng, 3, 2);
        CHECK(smith_normal_form(p * a * q).diagonal == smith_normal_form(a).diagonal);
    }
}

TEST_CASE("matrix order")
{
    CHECK(matrix_order(IntMatrix{{0, -1}, {1, 0}}) == 4);
    CHECK_FALSE(matrix_order(IntMatrix{{1, 1}, {0, 1}}).has_value());
    CHECK(matrix_order(IntMatrix::identity(2)) == 1);
    CHECK(matrix_order(IntMatrix{{0, -1}, {1, 1}}) == 6);
    CHECK(matrix_order(IntMatrix{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}}) == 3);
    CHECK_THROWS_AS(matrix_order(IntMatrix{{2, 0}, {0, 1}}), Error);
    CHECK_THROWS_AS(matrix_order(IntMatrix::identity(2), 6), Error);
}

TEST_CASE("subgroup closure")
{
    CHECK(subgroup_closure({IntMatrix::identity(2)})->size() == 1);
    CHECK(subgroup_closure({})->size() == 1);
    CHECK(subgroup_closure({IntMatrix{{0, -1}, {1, 0}}})->size() == 4);
    CHECK_FALSE(subgroup_closure({IntMatrix{{1, 1}, {0, 1}}}, 12).has_value());
    // The dihedral group of order 12 is the largest finite subgroup.
    const auto d12 = subgroup_closure({IntMatrix{{0, -1}, {1, 1}}, IntMatrix{{0, 1}, {1, 0}}});
    REQUIRE(d12.has_value());
    CHECK(d12->size() == 12);
}

TEST_CASE("subgroup closure of random 2x2 sets never exceeds twelve")
{
    std::mt19937_64 rng(15);
    for (int it = 0; it < 200; ++it) {
        std::vector<IntMatrix> gens{oracle::random_unimodular(rng, 2, 2), oracle::random_unimodular(rng, 2, 1)};
        const auto c = subgroup_closure(gens, 12);
        if (c) CHECK(c->size() <= 12);
    }
}

TEST_CASE("conjugacy mod q")
{
    const IntMatrix a = oracle::companion(5, 6);
    auto p = conjugate_mod_q(a, a, 2);
    REQUIRE(p.has_value());
    CHECK(((*p) * a).reduced(2) == (a * (*p)).reduced(2));
    CHECK_FALSE(conjugate_mod_q(a, oracle::companion(5, 7), 2).has_value());
    CHECK_THROWS_AS(conjugate_mod_q(a, a, 5), Error);

    std::mt19937_64 rng(16);
    for (int it = 0; it < 10; ++it) {
        const IntMatrix u = oracle::random_unimodular(rng, 3, 3);
        const IntMatrix b = (u * a * u.inverse()).reduced(3);
        auto w = conjugate_mod_q(a, b, 3);
        REQUIRE(w.has_value());
        CHECK(((*w) * a).reduced(3) == (b * (*w)).reduced(3));
        CHECK(gcd(w->determinant(), 3) == 1);
    }
    for (long long q = 2; q <= 7; ++q) {
        const IntMatrix c{{2, 1}, {1, 1}};
        const IntMatrix u = oracle::random_unimodular(rng, 2, 3);
        auto w = conjugate_mod_q(c, u * c * u.inverse(), q);
        REQUIRE(w.has_value());
        CHECK(((*w) * c).reduced(q) == (u * c * u.inverse() * (*w)).reduced(q));
    }
}

TEST_CASE("same charpoly but non-conjugate mod 2")
{
    // I and a nontrivial unipotent share (x-1)^2 but are never conjugate.
    CHECK_FALSE(conjugate_mod_q(IntMatrix::identity(2), IntMatrix{{1, 1}, {0, 1}}, 2).has_value());
}

TEST_CASE("kernel, hermite basis and LLL")
{
    const IntMatrix m{{1, 2, 3, 4}, {2, 4, 6, 9}};
    const IntMatrix k = integer_kernel(m);
    CHECK(k.cols() == 2);
    CHECK((m * k).is_zero());
    const IntMatrix r = lll_reduce(k);
    CHECK((m * r).is_zero());
    CHECK(same_lattice(k, r));

    const IntMatrix gens{{2, 4, 6}, {0, 2, 2}};
    const IntMatrix b = hermite_basis(gens);
    CHECK(b.cols() == 2);
    CHECK(lattice_contains(gens, {2, 2}));
    CHECK_FALSE(lattice_contains(gens, {1, 0}));
    CHECK(lattice_quotient(IntMatrix::identity(2), gens) == AbelianInvariants{0, {2, 2}});
}

TEST_CASE("cokernel")
{
    CHECK(cokernel(IntMatrix{{0, 0, 3}}, 3) == AbelianInvariants{2, {3}});
    CHECK(cokernel(IntMatrix(0, 0), 4).free_rank == 4);
    CHECK(AbelianInvariants{2, {3}}.to_string() == "Z^2 + Z/3");
}

TEST_CASE("rational formatting")
{
    CHECK(to_string(Rational(1, 2)) == "1/2");
    CHECK(to_string(Rational(-4, 2)) == "-2");
    CHECK(parse_rational("-1/42") == Rational(-1, 42));
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

}
