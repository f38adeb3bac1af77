#pragma once

// Truncated spinor ⊗ charged boson Fock spaces and the mode operators acting on them.
//
// Exact operators live in the monomial basis ψ_{n1}…ψ_{nj} η ⊗ e_{k1}…e_{kl} S^m|0⟩,
// which is orthogonal but not normalized. Norms squared are 2^{#fermions} for the
// spinor part and ∏ k^{ν_k} ν_k! for the boson part; floating-point exports are
// rescaled to the orthonormal basis.

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "twistk/sparse.hpp"

namespace twistk {

using ComplexSparse = Eigen::SparseMatrix<std::complex<double>>;

struct TruncationParams {
    int cutoff = 8;          // L: max total excitation energy
    int charge_window = 4;   // C: max |charge|
    int mode_max = -1;       // largest |n| retained; -1 means cutoff

    static TruncationParams make(int cutoff, int charge_window, int mode_max = -1);
    void validate() const;
    int modes() const { return mode_max < 0 ? cutoff : mode_max; }
};

enum class Variant { odd, even };
const char* to_string(Variant v);

// Family 0 is (ψ, e) in the odd module and (ψ^0, e) in the even module; family 1 is (ψ^1, f).
struct BasisState {
    std::array<uint32_t, 2> fermions{};  // bit n-1 set: ψ_n excitation present
    std::array<int, 2> charge{};
    std::array<std::vector<int>, 2> bosons;  // occupation indexed by mode, entry 0 unused
    int vacuum = 0;                          // 0 ↔ η_1, 1 ↔ η_2 (always 0 for odd)

    int fermion_energy(int family) const;
    int boson_energy(int family) const;
    int energy(int family) const { return fermion_energy(family) + boson_energy(family); }
    int total_energy() const { return energy(0) + energy(1); }
    int excitations() const;  // number of fermionic excitations in both families
    std::vector<int> key() const;
};

class FockBasis {
public:
    FockBasis(TruncationParams trunc, Variant variant);

    const TruncationParams& truncation() const { return trunc_; }
    Variant variant() const { return variant_; }
    int families() const { return variant_ == Variant::odd ? 1 : 2; }
    int dim() const { return static_cast<int>(states_.size()); }
    const BasisState& state(int i) const { return states_[i]; }
    // -1 when the state lies outside the truncation.
    int index_of(const BasisState& s) const;

    const Rational& norm_squared(int i) const { return norm_sq_[i]; }
    double norm(int i) const { return norm_[i]; }
    std::string label(int i) const;

    // States with no excitations (the vacuum ⊗ S^m|0⟩ sector).
    std::vector<int> vacuum_sector() const;

private:
    TruncationParams trunc_;
    Variant variant_;
    std::vector<BasisState> states_;
    std::map<std::vector<int>, int> index_;
    std::vector<Rational> norm_sq_;
    std::vector<double> norm_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;
BasisPtr make_basis(const TruncationParams& trunc, Variant variant);

enum class Mode {
    psi,      // ψ_n of the odd module
    psi0,     // ψ^0_n
    psi1,     // ψ^1_n
    e,        // e_n, e_0 is the charge
    f,        // f_n, even module only
    shift_e,  // S on the e charge
    shift_f,  // S on the f charge
};

ExactMatrix mode_operator(const FockBasis& basis, Mode mode, int n = 0);
// Γ = σ_z on the vacuum label times (−1)^{#fermions}; even module only.
ExactMatrix grading_operator(const FockBasis& basis);
// Adjoint for the basis inner product: G^{-1} A^H G.
ExactMatrix adjoint(const FockBasis& basis, const ExactMatrix& a);
bool is_hermitian(const FockBasis& basis, const ExactMatrix& a);

ComplexSparse to_orthonormal(const FockBasis& basis, const ExactMatrix& a);
ComplexSparse block_sum(const ComplexSparse& a, int copies);

// Q = Σ_{k≠0} ψ_k e_{−k} + ψ_0 (e_0 + slope·a) with a = φ/2π given exactly.
ExactMatrix supercharge_odd_exact(const FockBasis& basis, const Rational& phi_over_2pi, int slope = 1);
// Q^e = Σ ψ^0_k e_{−k} + Σ ψ^1_k f_{−k} + ψ^0_0 (e_0 + s/2π) + ψ^1_0 (f_0 + φ/2π).
ExactMatrix supercharge_even_exact(const FockBasis& basis, const Rational& s_over_2pi, const Rational& phi_over_2pi);

// Floating supercharge families with the parameter-independent part cached.
class OddSuperchargeFamily {
public:
    // slope = -1 gives the reversed family Σ ψ_k e_{−k} − (φ/2π) ψ_0.
    explicit OddSuperchargeFamily(BasisPtr basis, int slope = 1, int rank = 1);

    ComplexSparse at(double phi) const;
    const FockBasis& basis() const { return *basis_; }
    int slope() const { return slope_; }
    int rank() const { return rank_; }
    // Unitary g with Q(φ + 2π) = g Q(φ) g^† away from the charge boundary.
    ComplexSparse seam_gluing() const;
    const ComplexSparse& chirality() const { return psi0_; }

private:
    BasisPtr basis_;
    int slope_;
    int rank_;
    ComplexSparse fixed_;
    ComplexSparse psi0_;
};

class EvenSuperchargeFamily {
public:
    explicit EvenSuperchargeFamily(BasisPtr basis, int rank = 1);

    ComplexSparse at(double s, double phi) const;
    const FockBasis& basis() const { return *basis_; }
    int rank() const { return rank_; }
    const ComplexSparse& grading() const { return gamma_; }
    // (−i)·Γ·ψ^0_0·ψ^1_0, the insertion of the even supertrace.
    const ComplexSparse& supertrace_insertion() const { return insertion_; }

private:
    BasisPtr basis_;
    int rank_;
    ComplexSparse fixed_;
    ComplexSparse psi00_;
    ComplexSparse psi10_;
    ComplexSparse gamma_;
    ComplexSparse insertion_;
};

struct RelationEntry {
    std::string name;
    Rational violation;  // max |entry| over the interior columns
    int columns = 0;     // interior columns checked
};

struct RelationReport {
    std::vector<RelationEntry> entries;
    bool all_zero() const;
    Rational max_violation() const;
};

// Every (anti)commutation and adjointness relation among the retained modes, exactly.
RelationReport relation_check(const FockBasis& basis);

// Max-norm deviation of Q² from its closed form on states of energy ≤ mode_max.
double odd_square_identity_deviation(const FockBasis& basis, double phi);
double even_square_identity_deviation(const FockBasis& basis, double s, double phi);

}  // namespace twistk
