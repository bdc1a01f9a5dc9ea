#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geo4/descriptor.hpp"

namespace geo4 {

using ExpVec = std::vector<Int>;

struct Letter {
    std::size_t gen;
    Int exp;
};
using Word = std::vector<Letter>;

// Power-conjugate presentation. Generators are indexed bottom-up: index 0 is
// the deepest generator, and a normal form reads g_{k-1}^e_{k-1} ... g_0^e_0.
// Unset relations default to commuting generators and trivial powers.
class PolycyclicPresentation {
public:
    std::size_t add_generator(std::string name, std::optional<Int> relative_order = std::nullopt);
    // g_j^-1 g_i g_j for i < j.
    void set_conjugate(std::size_t j, std::size_t i, ExpVec v);
    // g_j g_i g_j^-1 for i < j.
    void set_inverse_conjugate(std::size_t j, std::size_t i, ExpVec v);
    // g_j^m_j for a generator of finite relative order m_j.
    void set_power(std::size_t j, ExpVec v);

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }
    const std::optional<Int>& relative_order(std::size_t i) const { return orders_[i]; }
    std::optional<std::size_t> index_of(const std::string& name) const;
    std::size_t hirsch_length() const;
    const ExpVec& conjugate_relation(std::size_t j, std::size_t i) const { return conj_[j][i]; }
    const ExpVec& inverse_conjugate_relation(std::size_t j, std::size_t i) const { return conj_inv_[j][i]; }
    const ExpVec& power_relation(std::size_t j) const { return power_[j]; }

    ExpVec identity() const { return ExpVec(size()); }
    ExpVec generator(std::size_t i) const;
    bool is_identity(const ExpVec& v) const;
    // Finite-order exponents lie in [0, m).
    bool is_normal(const ExpVec& v) const;

    ExpVec collect(const Word& w) const;
    ExpVec collect(const std::vector<std::pair<std::string, Int>>& w) const;
    ExpVec multiply(const ExpVec& u, const ExpVec& v) const;
    ExpVec inverse(const ExpVec& u) const;
    ExpVec power(const ExpVec& u, const Int& n) const;
    // u v u^-1 v^-1
    ExpVec commutator(const ExpVec& u, const ExpVec& v) const;
    // by u by^-1
    ExpVec conjugate(const ExpVec& u, const ExpVec& by) const;

    // Overlap test on generator triples; throws Error(Inconsistent).
    void check_consistency() const;
    std::string format(const ExpVec& v) const;

private:
    void mul_gen(ExpVec& u, std::size_t j, bool inverse) const;
    void mul_gen_power(ExpVec& u, std::size_t j, const Int& e) const;
    ExpVec apply_conj(const ExpVec& low, std::size_t j, bool inverse) const;
    ExpVec apply_auto(const std::vector<ExpVec>& images, const ExpVec& v) const;
    std::vector<ExpVec> conj_power(std::size_t j, const Int& e) const;

    std::vector<std::string> names_;
    std::vector<std::optional<Int>> orders_;
    std::vector<std::vector<ExpVec>> conj_;
    std::vector<std::vector<ExpVec>> conj_inv_;
    std::vector<ExpVec> power_;
};

// Exponent-vector abelianization of a presentation.
AbelianInvariants abelianization(const PolycyclicPresentation& p);

// Generator orders: TorusBundle4 (e1,e2,e3,t); GammaQLattice (z,y,x);
// GammaQExtension (z,y,x,t); T2BundleOverT2 (l,h,t,s).
PolycyclicPresentation build_presentation(const LatticeDescriptor& d);

struct SeriesReport {
    // layers[i] is term_(i+1) / term_(i+2).
    std::vector<AbelianInvariants> layers;
    // Nilpotent class or derived length; nullopt when infinite.
    std::optional<int> length;
    // The series reached a nontrivial term equal to its successor.
    bool stabilized = false;
    // Layer computation stopped at the cap while still descending.
    bool truncated = false;

    bool operator==(const SeriesReport&) const = default;
};

inline constexpr int kSeriesLayerCap = 6;

SeriesReport lower_central_series(const LatticeDescriptor& d, int cap = kSeriesLayerCap);
SeriesReport derived_series(const LatticeDescriptor& d, int cap = kSeriesLayerCap);
AbelianInvariants abelianization(const LatticeDescriptor& d);
// nullopt when the group is not polycyclic.
std::optional<std::size_t> hirsch_length(const LatticeDescriptor& d);

struct Nilradical {
    enum class Kind { FreeAbelian, GammaQ, FibreZ2, WholeGroup, FiniteIndexNilpotent };
    Kind kind = Kind::FreeAbelian;
    Int rank_or_q;     // FreeAbelian rank, GammaQ q
    int nil_class = 0; // WholeGroup, FiniteIndexNilpotent
    int index = 1;     // index in the whole group

    bool operator==(const Nilradical&) const = default;
    std::string to_string() const;
};

Nilradical nilradical_descriptor(const LatticeDescriptor& d);

// Level-N congruence quotient as a finite polycyclic presentation. The fibre
// lattice is reduced mod N (z mod N or N/2 for Gamma_q, see below) and the
// base generators get the least order L (a multiple of N) for which the
// presentation is consistent and, for torus bundles and Gamma_q extensions,
// the t-norms lie in the kernel.
struct LevelQuotient {
    PolycyclicPresentation presentation;
    Int modulus;
    Int central_modulus; // z modulus for Gamma_q families, else = modulus
    Int base_modulus;    // L, or 0 when there is no base generator
    Int order() const;
};

LevelQuotient level_quotient(const LatticeDescriptor& d, const Int& n);

// Nilpotent class of the level-N quotient from the closed-form series
// (least k with gamma_{k+1} inside the kernel); nullopt if not nilpotent.
std::optional<int> quotient_nilpotent_class(const LatticeDescriptor& d, const Int& n);

// Generators of the k-th lower central term (k = 1 is the whole group) as
// exponent vectors of build_presentation(d).
std::vector<ExpVec> lower_central_term(const LatticeDescriptor& d, int k);

} // namespace geo4
