// One pass/fail line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "geo4/classify.hpp"
#include "geo4/profinite.hpp"
#include "geo4/seifert.hpp"
#include "support/finite_group.hpp"
#include "support/igs.hpp"
#include "support/oracles.hpp"
#include "support/seifert_corpus.hpp"

using namespace geo4;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

struct Criterion {
    int number;
    const char* name;
    double time_limit; // seconds, 0 for none
    std::function<Outcome()> run;
};

const IntMatrix kCat{{2, 1}, {1, 1}};

struct Golden {
    IntMatrix a;
    std::string label;
};

std::vector<Golden> golden_torus_bundles()
{
    return {
        {IntMatrix::identity(3), "E4"},
        {IntMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}, "Nil3_x_E"},
        {IntMatrix{{1, 1, 0}, {0, 1, 1}, {0, 0, 1}}, "Nil4"},
        {oracle::companion(5, 6), "Sol4_{5,6}"},
        {oracle::companion(4, 4), "Sol3_x_E"},
        {oracle::companion(1, 0), "Sol4_0"},
    };
}

std::vector<LatticeDescriptor> golden_polycyclic()
{
    std::vector<LatticeDescriptor> ds;
    for (const auto& g : golden_torus_bundles()) ds.push_back(TorusBundle4{g.a});
    ds.push_back(GammaQLattice{2});
    ds.push_back(GammaQLattice{3});
    ds.push_back(GammaQExtension{2, kCat, {0, 0}});
    ds.push_back(GammaQExtension{2, IntMatrix::identity(2), {0, 0}});
    ds.push_back(GammaQExtension{2, IntMatrix{{1, 1}, {0, 1}}, {0, 0}});
    ds.push_back(GammaQExtension{3, IntMatrix{{-1, 0}, {0, -1}}, {0, 0}});
    ds.push_back(T2BundleOverT2{IntMatrix::identity(2), IntMatrix::identity(2), {1, 0}});
    ds.push_back(T2BundleOverT2{IntMatrix{{1, 1}, {0, 1}}, IntMatrix::identity(2), {0, 1}});
    ds.push_back(T2BundleOverT2{kCat, kCat.power(2), {1, 1}});
    return ds;
}

std::vector<LatticeDescriptor> golden_nilpotent()
{
    return {
        TorusBundle4{IntMatrix::identity(3)},
        TorusBundle4{IntMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}},
        TorusBundle4{IntMatrix{{1, 1, 0}, {0, 1, 1}, {0, 0, 1}}},
        GammaQLattice{2},
        GammaQLattice{3},
        GammaQExtension{2, IntMatrix::identity(2), {0, 0}},
        GammaQExtension{2, IntMatrix{{1, 1}, {0, 1}}, {0, 0}},
        T2BundleOverT2{IntMatrix::identity(2), IntMatrix::identity(2), {1, 0}},
        T2BundleOverT2{IntMatrix{{1, 1}, {0, 1}}, IntMatrix::identity(2), {0, 1}},
    };
}

std::string str(const auto& v)
{
    std::ostringstream s;
    s << v;
    return s.str();
}

Outcome solvable_dictionary()
{
    Outcome o;
    for (const auto& g : golden_torus_bundles()) {
        const std::string got = classify(TorusBundle4{g.a}).label.to_string();
        o.require(got == g.label, g.a.to_string() + " gave " + got + ", expected " + g.label);
    }
    return o;
}

Outcome conjugation_invariance()
{
    Outcome o;
    std::mt19937_64 rng(2024);
    for (const auto& g : golden_torus_bundles()) {
        const Classification base = classify(TorusBundle4{g.a});
        for (int i = 0; i < 200; ++i) {
            const IntMatrix p = oracle::random_unimodular(rng, 3, 3);
            const Classification c = classify(TorusBundle4{p * g.a * p.inverse()});
            o.require(c.label == base.label && c.certificate.parameters == base.certificate.parameters,
                      "conjugate of " + g.label + " by " + p.to_string() + " gave " + c.label.to_string());
        }
    }
    return o;
}

Outcome seifert_trichotomy()
{
    Outcome o;
    SeifertInvariants s;
    s.genus = 2;
    const auto label = [](const SeifertInvariants& inv) { return classify_seifert(inv).to_string(); };
    o.require(label(s) == "H2_x_E2", "obstruction (0,0) gave " + label(s));
    s.obstruction = {1, 0};
    o.require(label(s) == "SLtilde_x_E", "obstruction (1,0) gave " + label(s));
    const IntMatrix i2 = IntMatrix::identity(2);
    for (const IntPair e : {IntPair{0, 0}, IntPair{1, 0}}) {
        s.obstruction = e;
        s.monodromies = {IntMatrix{{1, 1}, {0, 1}}, i2, i2, i2};
        validate(s);
        o.require(label(s) == "NonGeometric", "unipotent monodromy gave " + label(s));
    }
    return o;
}

Outcome finite_monodromy()
{
    Outcome o;
    const auto corpus = oracle::hyperbolic_seifert_corpus(120, 7);
    int geometric = 0;
    for (const auto& c : corpus) {
        validate(c.inv);
        o.require(base_orbifold_class(c.inv).kind == BaseClass::Hyperbolic, "corpus base is not hyperbolic");
        const GeometryLabel l = classify_seifert(c.inv);
        const bool is_geometric = l.geometry != Geometry::NonGeometric;
        const bool finite = monodromy_image_finite(c.inv).finite;
        o.require(is_geometric == finite, "geometricity and finiteness disagree on a corpus entry");
        o.require(finite == c.expect_finite, "finiteness differs from the construction");
        geometric += is_geometric;
    }
    o.require(geometric > 0 && geometric < static_cast<int>(corpus.size()), "corpus does not mix both cases");
    o.detail = o.pass ? std::to_string(corpus.size()) + " cases, " + std::to_string(geometric) + " geometric" : o.detail;
    return o;
}

Outcome series_oracle()
{
    Outcome o;
    for (const auto& d : golden_polycyclic()) {
        const auto p = build_presentation(d);
        o.require(lower_central_series(d) == oracle::igs_series(p, false), kind_name(d) + ": lower central series differs");
        o.require(derived_series(d) == oracle::igs_series(p, true), kind_name(d) + ": derived series differs");
    }
    for (int q : {2, 3}) {
        const auto r = lower_central_series(GammaQLattice{q});
        o.require(r.length == std::optional<int>(2), "Gamma_q class is not 2");
        o.require(hirsch_length(GammaQLattice{q}) == std::optional<std::size_t>(3), "Gamma_q Hirsch length is not 3");
    }
    const LatticeDescriptor hyp = GammaQExtension{2, kCat, {0, 0}};
    o.require(derived_series(hyp).length == std::optional<int>(3), "hyperbolic Gamma_2 extension: derived length is not 3");
    // beta1 from the oracle's first layer
    o.require(oracle::igs_series(build_presentation(hyp), false).layers.front().free_rank == 1,
              "hyperbolic Gamma_2 extension: beta1 is not 1");
    return o;
}

Outcome fingerprint_soundness()
{
    Outcome o;
    const IntMatrix a = oracle::companion(5, 6);
    const IntMatrix p{{1, 2, 0}, {0, 1, -1}, {1, 0, 1}};
    const IntMatrix b = p * a * p.inverse();
    const auto iso = compare_torus_bundles(a, b);
    o.require(iso.kind == CompareVerdict::Kind::ProfinitelyIsomorphic && replay(a, b, iso), "(A, PAP^-1) not ProfinitelyIsomorphic");

    const IntMatrix c = oracle::companion(5, 7);
    const auto dist = compare_torus_bundles(a, c);
    o.require(dist.kind == CompareVerdict::Kind::Distinguished && dist.witness_modulus == 2,
              "companion pair not Distinguished at q = 2");
    // independent recomputation: the trace of the inverse is the x coefficient
    o.require(dist.invariant == "trace of inverse" && oracle::charpoly_by_interpolation(a)[1] % 2 !=
                                                          oracle::charpoly_by_interpolation(c)[1] % 2,
              "witness does not recompute");
    o.require(replay(a, c, dist), "companion witness does not replay");

    // no conjugator search: the full sweep to q = 50 runs and agrees at every modulus
    CompareOptions sweep;
    sweep.height = 0;
    const auto cons = compare_torus_bundles(a, a.transpose(), sweep);
    o.require(cons.kind == CompareVerdict::Kind::ConsistentUpTo && cons.bound == 50, "A vs A^T is not ConsistentUpTo(50)");
    o.require(replay(a, a.transpose(), cons), "ConsistentUpTo(50) does not re-check");

    std::mt19937_64 rng(99);
    int distinguished = 0;
    for (int i = 0; i < 24; ++i) {
        const IntMatrix x = oracle::random_unimodular(rng, 3, 2);
        const IntMatrix y = i % 3 == 0 ? x.transpose() : oracle::random_unimodular(rng, 3, 2);
        const auto v = compare_torus_bundles(x, y);
        if (v.kind == CompareVerdict::Kind::Distinguished) {
            ++distinguished;
            o.require(replay(x, y, v), "a Distinguished verdict does not replay");
        }
    }
    o.detail = o.pass ? std::to_string(distinguished + 1) + " Distinguished verdicts replayed" : o.detail;
    return o;
}

Outcome nilclass_invariance()
{
    Outcome o;
    std::vector<Int> moduli;
    for (int q = 2; q <= 7; ++q) moduli.push_back(q);
    std::size_t largest = 0;
    for (const auto& d : golden_nilpotent()) {
        const auto r = nilclass_stabilization(d, moduli);
        for (const auto& [q, cls] : r.classes) {
            const LevelQuotient lq = level_quotient(d, q);
            const oracle::FiniteGroup g(lq.presentation);
            largest = std::max(largest, g.order());
            const auto table_class = g.nilpotent_class();
            const std::string where = kind_name(d) + " at q = " + q.str();
            o.require(table_class && *table_class == cls, where + ": class differs from the multiplication table");
            o.require(cls <= r.group_class, where + ": quotient class exceeds group class");
            if (predicted_stable(r, d, q)) o.require(cls == r.group_class, where + ": predicted stable but smaller");
        }
    }
    o.detail = o.pass ? "largest quotient " + std::to_string(largest) + " elements" : o.detail;
    return o;
}

Outcome splitting()
{
    Outcome o;
    o.require(splitting_witness(IntPair{0, 0}).split, "(0,0) is not Split");
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long long> dist(-1000000, 1000000);
    for (int i = 0; i < 100; ++i) {
        IntPair e{dist(rng), dist(rng)};
        if (e[0] == 0 && e[1] == 0) e[1] = 1;
        const auto w = splitting_witness(e);
        o.require(!w.split, "nonzero pair reported Split");
        if (w.split) continue;
        o.require(e[0] % w.witness != 0 || e[1] % w.witness != 0, "witness divides the pair");
        for (Int q = 2; q < w.witness; ++q)
            o.require(e[0] % q == 0 && e[1] % q == 0, "witness is not minimal");
    }
    return o;
}

Outcome luck()
{
    Outcome o;
    for (int g : {2, 3}) {
        std::vector<Int> idx;
        for (int d = 1; d <= 10000; ++d) idx.push_back(d);
        const auto r = luck_approximation_surface(g, idx);
        for (const auto& row : r.rows) {
            // a degree-d cover has euler characteristic d (2 - 2g), so beta1 = 2 - d (2 - 2g)
            o.require(row.beta1 == 2 - row.index * (2 - 2 * g), "beta1 differs from the cover's euler characteristic");
            Rational err = row.ratio - (2 * g - 2);
            if (err < 0) err = -err;
            o.require(err <= Rational(2) / row.index, "error exceeds 2/d at d = " + row.index.str());
        }
        o.require(r.limit == 2 * g - 2, "limit is not 2g - 2");
    }
    return o;
}

Outcome exclusion()
{
    Outcome o;
    const auto surf = [](int g) { return Factor{FactorKind::Surface, g, {}}; };
    const std::vector<std::pair<LatticeDescriptor, LatticeDescriptor>> pairs{
        {ProductLattice{surf(2), surf(2)}, ProductLattice{surf(2), surf(3)}},
        {ProductLattice{surf(2), surf(3)}, ProductLattice{surf(3), surf(2)}},
        {ProductLattice{surf(4), surf(5)}, ProductLattice{surf(2), surf(9)}},
        {ProductLattice{surf(2), surf(2)}, ProductLattice{surf(2), surf(2)}},
    };
    for (const auto& [a, b] : pairs) {
        const auto r = compare_lattices(a, b);
        o.require(r.verdict == "Inconclusive", "verdict " + r.verdict);
        o.require(!r.deep, "a deep verdict was produced");
    }
    return o;
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "solvable dictionary on the golden torus bundles", 1.0, solvable_dictionary},
        {2, "conjugation invariance over 200 conjugators per golden matrix", 0, conjugation_invariance},
        {3, "Seifert trichotomy over a genus-2 base", 0, seifert_trichotomy},
        {4, "geometricity iff finite monodromy on a hyperbolic-base corpus", 0, finite_monodromy},
        {5, "closed-form series agree with the collection oracle", 0, series_oracle},
        {6, "fingerprint soundness at bound 50", 5.0, fingerprint_soundness},
        {7, "nilpotent class of level quotients against multiplication tables", 0, nilclass_invariance},
        {8, "splitting witnesses are minimal", 0, splitting},
        {9, "Lueck approximation for surface groups", 1.0, luck},
        {10, "exclusion honesty for reducible H2 x H2 products", 0, exclusion},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.time_limit > 0 && secs > c.time_limit && o.pass) {
            o.pass = false;
            o.detail = "took " + str(secs) + " s, limit " + str(c.time_limit) + " s";
        }
        failed += !o.pass;
        std::printf("%s criterion %2d: %s (%.3f s)%s%s\n", o.pass ? "PASS" : "FAIL", c.number, c.name, secs,
                    o.detail.empty() ? "" : " - ", o.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
