#pragma once

// Exact integer exterior algebra and integer lattice normal forms.
//
// Monomials dθ_{i1}∧…∧dθ_{ik} of the exterior algebra on n generators are
// bitmasks (bit i-1 <-> dθ_i). Terms are kept in (degree, bitmask) order so
// that equal elements have identical term maps.

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

#include "twistk/exact.hpp"

namespace twistk {

constexpr int kMaxGenerators = 30;

enum class Parity { even, odd };

inline Parity opposite(Parity p) { return p == Parity::even ? Parity::odd : Parity::even; }
inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

struct MultiIndex {
    uint32_t bits = 0;
    int n = 0;

    // one-based generator indices
    static MultiIndex from_indices(int n, std::initializer_list<int> indices);

    int degree() const { return std::popcount(bits); }
    bool contains(int i) const { return (bits >> (i - 1)) & 1u; }
    std::vector<int> indices() const;
    std::string to_string() const;
};

struct MonomialOrder {
    bool operator()(uint32_t a, uint32_t b) const {
        int da = std::popcount(a), db = std::popcount(b);
        return da != db ? da < db : a < b;
    }
};

// Sign of moving the monomial b past a into sorted position, 0 if they share a generator.
inline int wedge_sign(uint32_t a, uint32_t b) {
    if (a & b) return 0;
    int inversions = 0;
    for (uint32_t rest = b; rest; rest &= rest - 1) {
        int j = std::countr_zero(rest);
        inversions += std::popcount(a >> (j + 1));
    }
    return (inversions & 1) ? -1 : 1;
}

inline bool coeff_is_zero(const Integer& c) { return sgn(c) == 0; }
inline bool coeff_is_zero(const Rational& c) { return sgn(c) == 0; }

// Monomials of Λ_n of the given parity in (degree, bitmask) order.
std::vector<uint32_t> basis_monomials(int n, Parity parity);
std::vector<uint32_t> basis_monomials(int n);

template <class Coeff>
class Ext {
public:
    using Terms = std::map<uint32_t, Coeff, MonomialOrder>;

    explicit Ext(int n = 0) : n_(n) { check_n(n); }

    static Ext scalar(int n, const Coeff& c) { return from_bits(n, 0, c); }
    static Ext from_bits(int n, uint32_t bits, const Coeff& c = Coeff(1)) {
        Ext e(n);
        e.add_term(bits, c);
        return e;
    }
    static Ext monomial(int n, std::initializer_list<int> indices, const Coeff& c = Coeff(1)) {
        return from_bits(n, MultiIndex::from_indices(n, indices).bits, c);
    }

    int n() const { return n_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Coeff coeff(uint32_t bits) const {
        auto it = terms_.find(bits);
        return it == terms_.end() ? Coeff(0) : it->second;
    }

    void add_term(uint32_t bits, const Coeff& c) {
        if (n_ < 32 && (bits >> n_) != 0) throw DimensionError("monomial outside the generator range");
        if (coeff_is_zero(c)) return;
        auto [it, inserted] = terms_.try_emplace(bits, c);
        if (!inserted) {
            it->second += c;
            if (coeff_is_zero(it->second)) terms_.erase(it);
        }
    }

    Ext& operator+=(const Ext& o) {
        check_same(o);
        for (const auto& [b, c] : o.terms_) add_term(b, c);
        return *this;
    }
    Ext& operator-=(const Ext& o) {
        check_same(o);
        for (const auto& [b, c] : o.terms_) add_term(b, Coeff(-c));
        return *this;
    }
    Ext& operator*=(const Coeff& s) {
        if (coeff_is_zero(s)) {
            terms_.clear();
            return *this;
        }
        for (auto& [b, c] : terms_) c *= s;
        return *this;
    }
    friend Ext operator+(Ext a, const Ext& b) { return a += b; }
    friend Ext operator-(Ext a, const Ext& b) { return a -= b; }
    friend Ext operator*(const Coeff& s, Ext a) { return a *= s; }
    Ext operator-() const { return Coeff(-1) * *this; }
    friend bool operator==(const Ext& a, const Ext& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }

    Ext homogeneous_part(int degree) const {
        Ext out(n_);
        for (const auto& [b, c] : terms_)
            if (std::popcount(b) == degree) out.terms_.emplace(b, c);
        return out;
    }
    Ext parity_part(Parity p) const {
        Ext out(n_);
        for (const auto& [b, c] : terms_)
            if ((std::popcount(b) % 2 == 1) == (p == Parity::odd)) out.terms_.emplace(b, c);
        return out;
    }

    std::string to_string() const;

private:
    static void check_n(int n) {
        if (n < 0 || n > kMaxGenerators) throw DimensionError("generator count out of range");
    }
    void check_same(const Ext& o) const {
        if (o.n_ != n_) throw DimensionError("exterior algebra elements over different generator counts");
    }

    int n_ = 0;
    Terms terms_;
};

template <class Coeff>
Ext<Coeff> wedge(const Ext<Coeff>& a, const Ext<Coeff>& b) {
    if (a.n() != b.n()) throw DimensionError("wedge of elements over different generator counts");
    Ext<Coeff> out(a.n());
    for (const auto& [ba, ca] : a.terms())
        for (const auto& [bb, cb] : b.terms()) {
            int s = wedge_sign(ba, bb);
            if (s == 0) continue;
            Coeff c = ca * cb;
            if (s < 0) c = -c;
            out.add_term(ba | bb, c);
        }
    return out;
}

template <class Coeff>
std::string Ext<Coeff>::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [b, c] : terms_) {
        std::string cs = c.get_str();
        if (!out.empty()) out += (cs.front() == '-') ? " - " : " + ";
        else if (cs.front() == '-') out += "-";
        if (cs.front() == '-') cs.erase(0, 1);
        std::string mono = MultiIndex{b, n_}.to_string();
        if (b == 0) out += cs;
        else if (cs == "1") out += mono;
        else out += cs + "*" + mono;
    }
    return out;
}

using ExtElement = Ext<Integer>;
using ExtClassQ = Ext<Rational>;

ExtClassQ to_rational(const ExtElement& x);

// Integer matrix with exact entries.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(int rows, int cols);

    static IntMatrix identity(int n);
    static IntMatrix from_rows(const std::vector<std::vector<long>>& rows);
    static IntMatrix diagonal(const std::vector<Integer>& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Integer& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
    const Integer& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

    IntMatrix operator*(const IntMatrix& o) const;
    IntMatrix transpose() const;
    IntMatrix columns(int begin, int end) const;
    std::vector<Integer> column(int c) const;
    std::vector<Integer> row(int r) const;
    bool is_zero() const;
    Integer determinant() const;
    std::string to_string() const;

    friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Integer> a_;
};

struct SmithForm {
    IntMatrix U;      // unimodular, rows x rows
    IntMatrix D;      // diagonal with d1 | d2 | ...
    IntMatrix V;      // unimodular, cols x cols
    IntMatrix U_inv;  // inverse of U
    int rank = 0;

    std::vector<Integer> diagonal() const;
};

// U·M·V = D.
SmithForm smith_normal_form(const IntMatrix& m);

int integer_rank(const IntMatrix& m);

// Finitely generated abelian group Z^free_rank + sum Z/d_i with d_1 | d_2 | ...
struct AbelianGroup {
    int free_rank = 0;
    std::vector<Integer> invariant_factors;

    static AbelianGroup free(int rank) { return AbelianGroup{rank, {}}; }
    // Normalizes an arbitrary list of cyclic orders (ones dropped) into an invariant factor chain.
    static AbelianGroup from_cyclic(int free_rank, const std::vector<Integer>& orders);

    AbelianGroup direct_sum(const AbelianGroup& o) const;
    bool is_trivial() const { return free_rank == 0 && invariant_factors.empty(); }
    bool is_torsion_free() const { return invariant_factors.empty(); }
    Integer torsion_order() const;
    std::string to_string() const;

    friend bool operator==(const AbelianGroup& a, const AbelianGroup& b) {
        return a.free_rank == b.free_rank && a.invariant_factors == b.invariant_factors;
    }
};

// Z^ambient / span(sublattice columns) with explicit cyclic coordinates.
struct QuotientPresentation {
    AbelianGroup group;
    // One entry per nontrivial cyclic factor: coordinate functional (row of U),
    // modulus (0 for a free factor) and a representative generator (column of U^-1).
    std::vector<std::vector<Integer>> coordinate_rows;
    std::vector<Integer> moduli;
    IntMatrix generators;

    // Cyclic coordinates of x, torsion coordinates reduced into [0, modulus).
    std::vector<Integer> coordinates(const std::vector<Integer>& x) const;
};

QuotientPresentation quotient_presentation(int ambient_rank, const IntMatrix& sublattice);
AbelianGroup quotient_group(int ambient_rank, const IntMatrix& sublattice);

// Saturated basis (as columns, in column Hermite form) of {x : M x = 0}.
IntMatrix kernel_lattice(const IntMatrix& m);

// Row-style Hermite normal form of the lattice spanned by the rows of a matrix.
struct HermiteForm {
    IntMatrix rows;               // nonzero rows only
    std::vector<int> pivot_cols;  // one per row, strictly increasing

    // Canonical coset representative of v modulo the row lattice.
    std::vector<Integer> reduce(std::vector<Integer> v) const;
};

HermiteForm hermite_normal_form(const IntMatrix& rows);

}  // namespace twistk
