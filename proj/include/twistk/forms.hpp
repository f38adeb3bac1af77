#pragma once

// Differential forms on T_s × T_φ × T^n with trigonometric-polynomial coefficients.
//
// A term is e^{i k_s s} e^{i k_φ φ} · dx_I with dx_I a monomial over n+2
// generators (ds, dφ, dθ_1..dθ_n, same bit layout as the character lattices).
// Constant 2π and √π factors are carried in a scale tag rather than in the
// coefficients, so everything stays exact.

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "twistk/torus_ktheory.hpp"

namespace twistk {

struct FormKey {
    int k_s = 0;
    int k_phi = 0;
    uint32_t bits = 0;

    bool has_ds() const { return bits & ds_bit(); }
    bool has_dphi() const { return bits & dphi_bit(); }
    uint32_t theta_bits() const { return bits >> kCircleGenerators; }
    int degree() const { return std::popcount(bits); }

    friend auto operator<=>(const FormKey& a, const FormKey& b) {
        if (auto c = a.degree() <=> b.degree(); c != 0) return c;
        if (auto c = a.bits <=> b.bits; c != 0) return c;
        if (auto c = a.k_s <=> b.k_s; c != 0) return c;
        return a.k_phi <=> b.k_phi;
    }
    friend bool operator==(const FormKey&, const FormKey&) = default;
};

// Overall factor π^{sqrt_pi/2} · (2π)^{two_pi}.
struct ScaleTag {
    int sqrt_pi = 0;
    int two_pi = 0;
    friend bool operator==(const ScaleTag&, const ScaleTag&) = default;
    std::string to_string() const;
};

class FourierForm {
public:
    using Terms = std::map<FormKey, GaussQ>;

    // with_s = false restricts to forms on T_φ × T^n.
    explicit FourierForm(int n = 2, bool with_s = true, ScaleTag scale = {});

    static FourierForm term(int n, int k_s, int k_phi, uint32_t bits, const GaussQ& c, bool with_s = true);
    // Lift a constant class on T^n, optionally wedged on the left by ds and/or dφ.
    static FourierForm from_class(const ExtClassQ& c, uint32_t circle_prefix = 0, bool with_s = true);

    int n() const { return n_; }
    bool with_s() const { return with_s_; }
    const ScaleTag& scale() const { return scale_; }
    void set_scale(ScaleTag s) { scale_ = s; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int generators() const { return n_ + kCircleGenerators; }

    void add_term(const FormKey& key, const GaussQ& c);
    GaussQ coeff(const FormKey& key) const;

    FourierForm& operator+=(const FourierForm& o);
    FourierForm& operator-=(const FourierForm& o);
    FourierForm& operator*=(const GaussQ& s);
    friend FourierForm operator+(FourierForm a, const FourierForm& b) { return a += b; }
    friend FourierForm operator-(FourierForm a, const FourierForm& b) { return a -= b; }
    friend FourierForm operator*(const GaussQ& s, FourierForm a) { return a *= s; }
    FourierForm operator-() const { return GaussQ(-1) * *this; }
    // Exact equality including the scale tag.
    friend bool operator==(const FourierForm& a, const FourierForm& b);

    bool all_even() const;
    bool all_odd() const;
    // Drop the s direction; requires every term to be s-independent and ds-free.
    FourierForm restrict_to_phi() const;
    FourierForm with_s_domain() const;

    // Constant coefficient class on T^n of the terms with exactly the given circle factors.
    ExtClassQ theta_class(uint32_t circle_prefix) const;

    std::string to_string() const;

private:
    void check_compatible(const FourierForm& o) const;

    int n_ = 2;
    bool with_s_ = true;
    ScaleTag scale_;
    Terms terms_;
};

FourierForm wedge(const FourierForm& a, const FourierForm& b);

FourierForm exterior_d(const FourierForm& w);

// dω + H∧ω; H must be closed and of odd degree.
FourierForm twisted_d(const FourierForm& w, const FourierForm& h);

struct PrimitiveResult {
    FourierForm omega;
    std::vector<FourierForm> corrections;  // G^(1), G^(2), ...
    int iterations = 0;
};

// Ω with exterior_d(Φ) == twisted_d(Ω, H) for H = dφ ∧ F, F a constant 2-form on T^n.
PrimitiveResult twisted_primitive(const FourierForm& phi, const FourierForm& h);

// dφ ∧ F for a constant 2-form F on T^n. The 1/2π of the harmonic profile is
// absorbed into the units of F, so H carries no scale tag.
FourierForm harmonic_twist(const ExtClassQ& f, bool with_s = false);

// e^{−Φ} ∧ ω.
FourierForm gauge_transform(const FourierForm& w, const FourierForm& phi);
FourierForm exp_neg(const FourierForm& phi);

struct CurvatureData {
    int n = 2;
    int trivial_rank = 0;
    std::vector<ExtElement> line_classes;  // first Chern classes of the line summands

    int rank() const { return trivial_rank + static_cast<int>(line_classes.size()); }
};

ExtClassQ chern_character(const CurvatureData& c);

// √π ∫_{T_s}: keeps s-mode 0 terms with ds, removes ds, and multiplies by 2π (tag only).
FourierForm desuspend(const FourierForm& w);

// Rank over ℚ of the parity part of the cohomology of (Λ(T_φ × T^n), dφ∧c1∧·).
int twisted_cohomology_rank(const TwistSpec& spec, Parity parity);

// Exponents e of (2πi)^e applied to a degree-d component, in two readings of the normalization.
struct NormalizationExponents {
    Rational as_written;
    Rational alternative;
};
NormalizationExponents normalization_exponents(int degree);

}  // namespace twistk
