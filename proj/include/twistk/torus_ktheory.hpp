#pragma once

// Twisted K-groups of T^{n+1} = T_φ × T^n with twist class dφ ∪ k·dθ1∧dθ2,
// character quotient lattices and coset classification of supercharge characters.
//
// Character lattices live in the exterior algebra on n+2 generators:
// generator 1 is ds, generator 2 is dφ, generator i+2 is dθ_i.

#include <array>
#include <vector>

#include "twistk/lattice.hpp"

namespace twistk {

struct TwistSpec {
    int n = 2;
    long k = 1;

    static TwistSpec make(int n, long k);
    void validate() const;

    // k·dθ1∧dθ2 on n generators
    ExtElement chern_class() const;
};

// Accepts an integral 2-form twist and checks it has the normal form k·dθ1∧dθ2.
TwistSpec validate_twist_form(const ExtElement& c1);

constexpr int kDsBit = 0;
constexpr int kDphiBit = 1;
constexpr int kCircleGenerators = 2;

// Lift a monomial over dθ_1..dθ_n to the (n+2)-generator algebra.
inline uint32_t lift_theta(uint32_t bits) { return bits << kCircleGenerators; }
inline uint32_t ds_bit() { return 1u << kDsBit; }
inline uint32_t dphi_bit() { return 1u << kDphiBit; }

// Matrix of x ↦ a∧x from span(domain) to span(codomain), columns indexed by domain.
IntMatrix multiplication_matrix(const ExtElement& a, const std::vector<uint32_t>& domain,
                                const std::vector<uint32_t>& codomain);

ExtElement vector_to_element(int n, const std::vector<uint32_t>& basis, const std::vector<Integer>& coords);

// Saturated basis of ker(k·dθ12 ∧ ·) on Λ_n^parity.
std::vector<ExtElement> invariant_subgroup(const TwistSpec& spec, Parity parity);

struct KGroupResult {
    int degree = 0;
    AbelianGroup group;
    // Λ_{n-2} part, Λ_{n-1} part, quotient part
    std::array<AbelianGroup, 3> summands;
    std::vector<ExtElement> generators;
    AbelianGroup closed_form;
    std::array<AbelianGroup, 3> closed_form_summands;
    bool cross_check_ok = false;
};

std::array<AbelianGroup, 3> closed_form_summands(const TwistSpec& spec, int degree);
KGroupResult twisted_k_group(const TwistSpec& spec, int degree);

struct CharacterQuotient {
    Parity parity = Parity::odd;
    int generators = 0;  // n + 2
    std::vector<uint32_t> lattice;  // decomposable lattice basis
    IntMatrix sublattice;           // columns in lattice coordinates
    AbelianGroup group;
    QuotientPresentation presentation;
    HermiteForm reduction;
    // Same sublattice inside every monomial of the parity on T_φ × T^n (odd) or T_s × T_φ × T^n (even).
    std::vector<uint32_t> full_lattice;
    AbelianGroup full_group;
};

CharacterQuotient character_quotient(const TwistSpec& spec, Parity parity);

// Integer lattice coordinates of c, or DomainError if c is not a lattice vector.
std::vector<Integer> lattice_coordinates(const ExtClassQ& c, const std::vector<uint32_t>& lattice);

ExtClassQ reduce_character(const ExtClassQ& c, const TwistSpec& spec, Parity parity);
ExtClassQ reduce_character(const ExtClassQ& c, const CharacterQuotient& q);

struct Coset {
    ExtClassQ representative;
    // Cyclic coordinates in presentation order; moduli[i] == 0 marks a free coordinate.
    std::vector<Integer> coordinates;
    std::vector<Integer> moduli;
    AbelianGroup group;

    std::vector<Integer> torsion() const;
};

// Coset of flow_sign · dφ ∧ xi_chern in the odd character quotient.
Coset classify_supercharge(const ExtClassQ& xi_chern, int flow_sign, const TwistSpec& spec);

// True when the given lattice vectors together with the sublattice span the whole lattice.
bool generates_quotient(const CharacterQuotient& q, const std::vector<ExtClassQ>& images);

}  // namespace twistk
