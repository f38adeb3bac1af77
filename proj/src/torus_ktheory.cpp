#include "twistk/torus_ktheory.hpp"

#include <algorithm>

namespace twistk {

TwistSpec TwistSpec::make(int n, long k) {
    TwistSpec s{n, k};
    s.validate();
    return s;
}

void TwistSpec::validate() const {
    if (n < 2) throw DomainError("torus dimension n must be at least 2");
    if (n + kCircleGenerators > kMaxGenerators) throw DimensionError("torus dimension too large");
    if (k == 0) throw DomainError("twist level k must be nonzero");
}

ExtElement TwistSpec::chern_class() const { return ExtElement::monomial(n, {1, 2}, Integer(k)); }

TwistSpec validate_twist_form(const ExtElement& c1) {
    uint32_t normal = MultiIndex::from_indices(std::max(c1.n(), 2), {1, 2}).bits;
    for (const auto& [b, c] : c1.terms()) {
        if (std::popcount(b) != 2) throw DomainError("twist must be a homogeneous 2-form");
        if (b != normal) throw DomainError("twist is not of the form k·dθ1∧dθ2");
    }
    if (c1.is_zero()) throw DomainError("twist level k must be nonzero");
    Integer k = c1.coeff(normal);
    if (!k.fits_slong_p()) throw DomainError("twist level out of range");
    return TwistSpec::make(c1.n(), k.get_si());
}

IntMatrix multiplication_matrix(const ExtElement& a, const std::vector<uint32_t>& domain,
                                const std::vector<uint32_t>& codomain) {
    IntMatrix m(static_cast<int>(codomain.size()), static_cast<int>(domain.size()));
    std::map<uint32_t, int> row_of;
    for (size_t i = 0; i < codomain.size(); ++i) row_of[codomain[i]] = static_cast<int>(i);
    for (size_t j = 0; j < domain.size(); ++j) {
        for (const auto& [ab, ac] : a.terms()) {
            int s = wedge_sign(ab, domain[j]);
            if (s == 0) continue;
            auto it = row_of.find(ab | domain[j]);
            if (it == row_of.end()) throw DimensionError("product leaves the codomain basis");
            m(it->second, static_cast<int>(j)) += s * ac;
        }
    }
    return m;
}

ExtElement vector_to_element(int n, const std::vector<uint32_t>& basis, const std::vector<Integer>& coords) {
    if (basis.size() != coords.size()) throw DimensionError("coordinate count does not match basis");
    ExtElement out(n);
    for (size_t i = 0; i < basis.size(); ++i) out.add_term(basis[i], coords[i]);
    return out;
}

std::vector<ExtElement> invariant_subgroup(const TwistSpec& spec, Parity parity) {
    spec.validate();
    auto basis = basis_monomials(spec.n, parity);
    IntMatrix kernel = kernel_lattice(multiplication_matrix(spec.chern_class(), basis, basis));
    std::vector<ExtElement> out;
    for (int c = 0; c < kernel.cols(); ++c) out.push_back(vector_to_element(spec.n, basis, kernel.column(c)));
    return out;
}

namespace {

int parity_rank(int m, Parity p) {
    if (m < 0) return 0;
    if (m == 0) return p == Parity::even ? 1 : 0;
    return 1 << (m - 1);
}

// Kernel of M restricted to the coordinates selected by keep.
IntMatrix restricted_kernel(const IntMatrix& m, const std::vector<uint32_t>& basis, auto keep) {
    std::vector<int> dropped;
    for (size_t i = 0; i < basis.size(); ++i)
        if (!keep(basis[i])) dropped.push_back(static_cast<int>(i));
    IntMatrix stacked(m.rows() + static_cast<int>(dropped.size()), m.cols());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) stacked(r, c) = m(r, c);
    for (size_t i = 0; i < dropped.size(); ++i) stacked(m.rows() + static_cast<int>(i), dropped[i]) = 1;
    return kernel_lattice(stacked);
}

IntMatrix hstack(const IntMatrix& a, const IntMatrix& b) {
    IntMatrix out(a.rows(), a.cols() + b.cols());
    for (int r = 0; r < a.rows(); ++r) {
        for (int c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
        for (int c = 0; c < b.cols(); ++c) out(r, a.cols() + c) = b(r, c);
    }
    return out;
}

IntMatrix columns_from(const std::vector<std::vector<Integer>>& cols, int rows) {
    IntMatrix m(rows, static_cast<int>(cols.size()));
    for (size_t c = 0; c < cols.size(); ++c)
        for (int r = 0; r < rows; ++r) m(r, static_cast<int>(c)) = cols[c][r];
    return m;
}

}  // namespace

std::array<AbelianGroup, 3> closed_form_summands(const TwistSpec& spec, int degree) {
    spec.validate();
    if (degree != 0 && degree != 1) throw DomainError("K-theory degree must be 0 or 1");
    Parity q = degree == 0 ? Parity::odd : Parity::even;
    int n = spec.n;
    int lower = parity_rank(n - 2, q);
    std::vector<Integer> torsion(lower, Integer(std::abs(spec.k)));
    return {AbelianGroup::free(lower), AbelianGroup::free(parity_rank(n - 1, q)),
            AbelianGroup::from_cyclic(parity_rank(n, q) - lower, torsion)};
}

KGroupResult twisted_k_group(const TwistSpec& spec, int degree) {
    KGroupResult r;
    r.degree = degree;
    r.closed_form_summands = closed_form_summands(spec, degree);
    r.closed_form = r.closed_form_summands[0].direct_sum(r.closed_form_summands[1]).direct_sum(r.closed_form_summands[2]);

    int n = spec.n;
    ExtElement c1 = spec.chern_class();
    uint32_t t1 = 1u, t2 = 2u;

    // Classes annihilated by the twist.
    Parity inv = degree == 1 ? Parity::odd : Parity::even;
    auto inv_basis = basis_monomials(n, inv);
    IntMatrix mult = multiplication_matrix(c1, inv_basis, inv_basis);
    IntMatrix kernel = kernel_lattice(mult);
    IntMatrix with_first = restricted_kernel(mult, inv_basis, [&](uint32_t b) { return (b & t1) != 0; });
    IntMatrix second_only =
        restricted_kernel(mult, inv_basis, [&](uint32_t b) { return (b & t1) == 0 && (b & t2) != 0; });
    r.summands[0] = AbelianGroup::free(second_only.cols());
    r.summands[1] = AbelianGroup::free(with_first.cols());
    int dim = static_cast<int>(inv_basis.size());
    bool splits = second_only.cols() + with_first.cols() == kernel.cols() &&
                  quotient_group(dim, hstack(second_only, with_first)) == quotient_group(dim, kernel);

    // Cokernel of the twist on the opposite parity.
    auto quot_basis = basis_monomials(n, opposite(inv));
    QuotientPresentation pres = quotient_presentation(
        static_cast<int>(quot_basis.size()), multiplication_matrix(c1, quot_basis, quot_basis));
    r.summands[2] = pres.group;

    r.group = r.summands[0].direct_sum(r.summands[1]).direct_sum(r.summands[2]);
    for (int c = 0; c < kernel.cols(); ++c) r.generators.push_back(vector_to_element(n, inv_basis, kernel.column(c)));
    for (int c = 0; c < pres.generators.cols(); ++c)
        r.generators.push_back(vector_to_element(n, quot_basis, pres.generators.column(c)));

    r.cross_check_ok = splits && r.group == r.closed_form && r.summands == r.closed_form_summands;
    return r;
}

// ---------------------------------------------------------------------------
// Character quotients

namespace {

std::vector<uint32_t> lifted(const std::vector<uint32_t>& theta, uint32_t prefix) {
    std::vector<uint32_t> out;
    for (uint32_t b : theta) out.push_back(prefix | lift_theta(b));
    return out;
}

std::vector<uint32_t> sorted_basis(std::vector<uint32_t> v) {
    std::sort(v.begin(), v.end(), MonomialOrder{});
    return v;
}

}  // namespace

CharacterQuotient character_quotient(const TwistSpec& spec, Parity parity) {
    spec.validate();
    int n = spec.n;
    int gens = n + kCircleGenerators;
    CharacterQuotient q;
    q.parity = parity;
    q.generators = gens;

    std::vector<uint32_t> sub_domain;  // monomials x with sublattice generators dφ∧c1∧x
    if (parity == Parity::odd) {
        q.lattice = lifted(basis_monomials(n, Parity::even), dphi_bit());
        sub_domain = lifted(basis_monomials(n, Parity::even), 0);
    } else {
        auto a = lifted(basis_monomials(n, Parity::odd), dphi_bit());
        auto b = lifted(basis_monomials(n, Parity::even), dphi_bit() | ds_bit());
        a.insert(a.end(), b.begin(), b.end());
        q.lattice = sorted_basis(a);
        auto x = lifted(basis_monomials(n, Parity::odd), 0);
        auto y = lifted(basis_monomials(n, Parity::even), ds_bit());
        x.insert(x.end(), y.begin(), y.end());
        sub_domain = sorted_basis(x);
    }

    ExtElement twist(gens);
    ExtElement c1 = spec.chern_class();
    for (const auto& [b, c] : c1.terms()) twist.add_term(dphi_bit() | lift_theta(b), c);
    q.sublattice = multiplication_matrix(twist, sub_domain, q.lattice);
    int dim = static_cast<int>(q.lattice.size());
    q.presentation = quotient_presentation(dim, q.sublattice);
    q.group = q.presentation.group;
    q.reduction = hermite_normal_form(q.sublattice.transpose());

    for (uint32_t b : basis_monomials(gens, parity))
        if (parity == Parity::even || (b & ds_bit()) == 0) q.full_lattice.push_back(b);
    q.full_group = quotient_group(static_cast<int>(q.full_lattice.size()),
                                  multiplication_matrix(twist, sub_domain, q.full_lattice));
    return q;
}

std::vector<Integer> lattice_coordinates(const ExtClassQ& c, const std::vector<uint32_t>& lattice) {
    std::map<uint32_t, int> index;
    for (size_t i = 0; i < lattice.size(); ++i) index[lattice[i]] = static_cast<int>(i);
    std::vector<Integer> out(lattice.size(), Integer(0));
    for (const auto& [b, v] : c.terms()) {
        auto it = index.find(b);
        if (it == index.end()) throw DomainError("character has a component outside the decomposable lattice");
        if (v.get_den() != 1) throw DomainError("character has a non-integral lattice coordinate");
        out[it->second] = v.get_num();
    }
    return out;
}

ExtClassQ reduce_character(const ExtClassQ& c, const CharacterQuotient& q) {
    if (c.n() != q.generators) throw DimensionError("character has the wrong generator count");
    auto reduced = q.reduction.reduce(lattice_coordinates(c, q.lattice));
    ExtClassQ out(q.generators);
    for (size_t i = 0; i < reduced.size(); ++i) out.add_term(q.lattice[i], Rational(reduced[i]));
    return out;
}

ExtClassQ reduce_character(const ExtClassQ& c, const TwistSpec& spec, Parity parity) {
    return reduce_character(c, character_quotient(spec, parity));
}

std::vector<Integer> Coset::torsion() const {
    std::vector<Integer> out;
    for (size_t i = 0; i < moduli.size(); ++i)
        if (sgn(moduli[i]) != 0) out.push_back(coordinates[i]);
    return out;
}

Coset classify_supercharge(const ExtClassQ& xi_chern, int flow_sign, const TwistSpec& spec) {
    if (flow_sign != 1 && flow_sign != -1) throw DomainError("flow sign must be +1 or -1");
    if (xi_chern.n() != spec.n) throw DimensionError("Chern character has the wrong generator count");
    CharacterQuotient q = character_quotient(spec, Parity::odd);
    ExtClassQ c(q.generators);
    for (const auto& [b, v] : xi_chern.terms()) c.add_term(dphi_bit() | lift_theta(b), Rational(flow_sign * v));
    Coset out;
    out.representative = reduce_character(c, q);
    out.coordinates = q.presentation.coordinates(lattice_coordinates(c, q.lattice));
    out.moduli = q.presentation.moduli;
    out.group = q.group;
    return out;
}

bool generates_quotient(const CharacterQuotient& q, const std::vector<ExtClassQ>& images) {
    int dim = static_cast<int>(q.lattice.size());
    std::vector<std::vector<Integer>> cols;
    for (const auto& im : images) cols.push_back(lattice_coordinates(im, q.lattice));
    return quotient_group(dim, hstack(columns_from(cols, dim), q.sublattice)).is_trivial();
}

}  // namespace twistk
