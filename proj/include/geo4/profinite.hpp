#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geo4/classify.hpp"
#include "geo4/descriptor.hpp"
#include "geo4/polycyc.hpp"
#include "geo4/seifert.hpp"

namespace geo4 {

// For torus bundles the matrix is A; for Gamma_q extensions C; for torus
// bundles over the torus the first monodromy A.
struct CongruenceFingerprint {
    Int modulus;
    std::vector<Int> charpoly_mod_q;      // constant term first
    std::vector<Int> traces_mod_q;        // tr M^k for k = 1, -1, 2, -2
    AbelianInvariants quotient_abelianization;
    std::optional<int> quotient_nilpotent_class; // nilpotent lattices only

    bool operator==(const CongruenceFingerprint&) const = default;
};

CongruenceFingerprint fingerprint(const LatticeDescriptor& d, const Int& q);

struct CompareOptions {
    Int bound = 50;                 // fingerprint moduli 2..bound
    int height = 5;                 // integral conjugator entries within +-height
    std::vector<long long> conjugacy_moduli{2, 3};
};

struct CompareVerdict {
    enum class Kind { Distinguished, ConsistentUpTo, ProfinitelyIsomorphic };
    Kind kind = Kind::ConsistentUpTo;
    // Distinguished
    Int witness_modulus;
    std::string invariant;
    // ConsistentUpTo
    Int bound;
    std::vector<std::string> checked;
    // ProfinitelyIsomorphic: P A P^-1 = B, or B^-1 when inverted
    std::optional<IntMatrix> conjugator;
    bool inverted = false;
};

const char* verdict_kind_name(CompareVerdict::Kind k);

CompareVerdict compare_torus_bundles(const IntMatrix& a, const IntMatrix& b, const CompareOptions& opt = {});

// Re-checks a verdict from its recorded data alone.
bool replay(const IntMatrix& a, const IntMatrix& b, const CompareVerdict& v);

// Integral P with entries in [-height, height], det P = +-1 and P A P^-1 = B.
std::optional<IntMatrix> find_integral_conjugator(const IntMatrix& a, const IntMatrix& b, int height);

// Label comparison, chained into compare_torus_bundles for two torus bundles
// of the same geometry. Lattices of the same geometry inside {H4, H2C, H2 x H2}
// are reported Inconclusive.
struct LatticeComparison {
    LabelComparison labels;
    std::optional<CompareVerdict> deep;
    std::string verdict; // Distinguished, SameGeometry, Inconclusive or a deep verdict kind
    std::string reason;
};

LatticeComparison compare_lattices(const LatticeDescriptor& d1, const LatticeDescriptor& d2, const CompareOptions& opt = {});

struct SplittingVerdict {
    bool split = true;
    Int witness; // least q >= 2 with e mod q != 0, when not split
};

SplittingVerdict splitting_witness(const IntPair& e);
// Rational pairs are scaled by their common denominator first.
SplittingVerdict splitting_witness(const RationalPair& e);

struct LuckRow {
    Int index;
    Int beta1;
    Rational ratio;
};

struct LuckReport {
    std::vector<LuckRow> rows;
    Rational limit;
};

// beta1 of an index-d subgroup of the genus-g surface group, d(2g-2) + 2.
LuckReport luck_approximation_surface(int genus, const std::vector<Int>& indices);
// Surface(g) x Surface(h): index pairs (c, d), ratio (beta1_c + beta1_d) / (c d), limit 0.
LuckReport luck_approximation_product(int g, int h, const std::vector<std::pair<Int, Int>>& indices);

struct NilclassReport {
    int group_class = 0;
    std::vector<std::pair<Int, int>> classes; // (q, class of the level-q quotient)
    // Stable moduli: those q whose bottom-layer modulus does not divide
    // bottom_content; cofinite in q.
    Int bottom_content;
    bool central_layer = false; // bottom layer reduced by the z modulus
    std::vector<Int> predicted_stable;
    std::string description;
};

NilclassReport nilclass_stabilization(const LatticeDescriptor& d, const std::vector<Int>& moduli);
bool predicted_stable(const NilclassReport& r, const LatticeDescriptor& d, const Int& q);

} // namespace geo4
