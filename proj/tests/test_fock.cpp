#include <doctest.h>

#include <random>

#include "twistk/fock.hpp"

using namespace twistk;

namespace {

// Coefficients of ∏_{j≤L}(1+q^j) · ∏_{j≤L}(1−q^j)^{-1} up to q^L.
std::vector<long> sector_counts(int L) {
    std::vector<long> c(L + 1, 0);
    c[0] = 1;
    for (int j = 1; j <= L; ++j) {
        for (int e = L; e >= j; --e) c[e] += c[e - j];  // (1 + q^j)
        for (int e = j; e <= L; ++e) c[e] += c[e - j];  // 1/(1 − q^j)
    }
    return c;
}

bool all_zero_on(const ExactMatrix& m, const std::vector<bool>& keep) {
    for (int j = 0; j < m.cols(); ++j)
        if (keep[j] && !m.column(j).empty()) return false;
    return true;
}

std::vector<bool> below_charge_top(const FockBasis& b, int family) {
    std::vector<bool> keep(b.dim());
    for (int i = 0; i < b.dim(); ++i) keep[i] = b.state(i).charge[family] < b.truncation().charge_window;
    return keep;
}

}  // namespace

TEST_CASE("truncation validation") {
    CHECK_THROWS_AS(TruncationParams::make(-1, 1), DomainError);
    CHECK_THROWS_AS(TruncationParams::make(3, -1), DomainError);
    CHECK_THROWS_AS(TruncationParams::make(3, 1, 4), DomainError);
    CHECK(TruncationParams::make(3, 1).modes() == 3);
    CHECK(TruncationParams::make(3, 1, 2).modes() == 2);
}

TEST_CASE("basis sizes") {
    CHECK(FockBasis(TruncationParams::make(0, 1), Variant::odd).dim() == 3);
    CHECK(FockBasis(TruncationParams::make(0, 0), Variant::even).dim() == 2);

    for (int L = 0; L <= 8; ++L) {
        FockBasis b(TruncationParams::make(L, 1), Variant::odd);
        auto counts = sector_counts(L);
        std::map<std::pair<int, int>, long> seen;
        for (int i = 0; i < b.dim(); ++i) ++seen[{b.state(i).charge[0], b.state(i).total_energy()}];
        for (int m = -1; m <= 1; ++m)
            for (int e = 0; e <= L; ++e) CHECK(seen[{m, e}] == counts[e]);
    }

    // Even module: two copies of the odd sector count convolved, times two vacua.
    int L = 3;
    FockBasis even(TruncationParams::make(L, 0), Variant::even);
    auto c = sector_counts(L);
    long expected = 0;
    for (int a = 0; a <= L; ++a)
        for (int b = 0; a + b <= L; ++b) expected += 2 * c[a] * c[b];
    CHECK(even.dim() == expected);
}

TEST_CASE("index map round trip and labels") {
    FockBasis b(TruncationParams::make(4, 2), Variant::even);
    for (int i = 0; i < b.dim(); i += 7) CHECK(b.index_of(b.state(i)) == i);
    CHECK(b.vacuum_sector().size() == 2 * 5 * 5);
    CHECK_FALSE(b.label(0).empty());
}

TEST_CASE("mode operator domain errors") {
    FockBasis odd(TruncationParams::make(3, 1), Variant::odd);
    FockBasis even(TruncationParams::make(2, 1), Variant::even);
    CHECK_THROWS_AS(mode_operator(odd, Mode::psi, 4), DomainError);
    CHECK_THROWS_AS(mode_operator(odd, Mode::psi1, 0), DomainError);
    CHECK_THROWS_AS(mode_operator(odd, Mode::f, 1), DomainError);
    CHECK_THROWS_AS(mode_operator(even, Mode::psi, 1), DomainError);
    CHECK_THROWS_AS(grading_operator(odd), DomainError);
}

TEST_CASE("odd module spot relations") {
    FockBasis b(TruncationParams::make(4, 1), Variant::odd);
    BasisState vac;
    vac.bosons = {std::vector<int>(5, 0), std::vector<int>(5, 0)};
    int v = b.index_of(vac);
    REQUIRE(v >= 0);
    CHECK(mode_operator(b, Mode::psi, 0).at(v, v) == GaussQ(1));

    ExactMatrix e1 = mode_operator(b, Mode::e, 1), em1 = mode_operator(b, Mode::e, -1);
    ExactMatrix comm = e1 * em1 - em1 * e1;
    for (int j = 0; j < b.dim(); ++j)
        if (b.state(j).total_energy() <= 3) {
            CHECK(comm.at(j, j) == GaussQ(-1));
            CHECK(comm.column(j).size() == 1);
        }

    ExactMatrix p1 = mode_operator(b, Mode::psi, 1), pm1 = mode_operator(b, Mode::psi, -1);
    ExactMatrix ac = p1 * pm1 + pm1 * p1;
    for (int j = 0; j < b.dim(); ++j)
        if (b.state(j).total_energy() <= 3) CHECK(ac.at(j, j) == GaussQ(2));

    // ψ_0 is (−1)^{#excitations}.
    ExactMatrix p0 = mode_operator(b, Mode::psi, 0);
    for (int j = 0; j < b.dim(); ++j)
        CHECK(p0.at(j, j) == GaussQ(std::popcount(b.state(j).fermions[0]) % 2 ? -1 : 1));

    // S moves charge m to m+1 and leaves the rest alone.
    ExactMatrix s = mode_operator(b, Mode::shift_e);
    for (int j = 0; j < b.dim(); ++j) {
        BasisState t = b.state(j);
        ++t.charge[0];
        int i = b.index_of(t);
        if (i >= 0) CHECK(s.at(i, j) == GaussQ(1));
        else CHECK(s.column(j).empty());
    }
}

TEST_CASE("even module grading") {
    FockBasis b(TruncationParams::make(3, 1), Variant::even);
    ExactMatrix g = grading_operator(b);
    CHECK(g * g == ExactMatrix::identity(b.dim()));
    CHECK(is_hermitian(b, g));

    BasisState eta1;
    eta1.bosons = {std::vector<int>(4, 0), std::vector<int>(4, 0)};
    int v = b.index_of(eta1);
    CHECK(g.at(v, v) == GaussQ(1));
    ExactMatrix p = mode_operator(b, Mode::psi0, 1);
    REQUIRE(p.column(v).size() == 1);
    int excited = p.column(v).begin()->first;
    CHECK(g.at(excited, excited) == GaussQ(-1));
}

TEST_CASE("relation check exact") {
    for (int L : {2, 4}) {
        FockBasis b(TruncationParams::make(L, 2), Variant::odd);
        auto rep = relation_check(b);
        CHECK(rep.all_zero());
        CHECK(rep.entries.size() > 20);
    }
    FockBasis e(TruncationParams::make(2, 1), Variant::even);
    auto rep = relation_check(e);
    for (const auto& entry : rep.entries) {
        INFO(entry.name);
        CHECK(sgn(entry.violation) == 0);
    }
}

TEST_CASE("relation check detects a broken operator") {
    // A deliberately wrong boson normalization must show up as a nonzero violation.
    FockBasis b(TruncationParams::make(3, 1), Variant::odd);
    ExactMatrix e1 = GaussQ(2) * mode_operator(b, Mode::e, 1), em1 = mode_operator(b, Mode::e, -1);
    ExactMatrix comm = e1 * em1 - em1 * e1;
    bool differs = false;
    for (int j = 0; j < b.dim(); ++j)
        if (b.state(j).total_energy() <= 2 && comm.at(j, j) != GaussQ(-1)) differs = true;
    CHECK(differs);
}

TEST_CASE("odd supercharge") {
    FockBasis b(TruncationParams::make(4, 2), Variant::odd);
    ExactMatrix q0 = supercharge_odd_exact(b, Rational(0));
    CHECK(is_hermitian(b, q0));
    CHECK(is_hermitian(b, supercharge_odd_exact(b, make_rational(1, 3), -1)));

    BasisState vac;
    vac.bosons = {std::vector<int>(5, 0), std::vector<int>(5, 0)};
    CHECK(q0.column(b.index_of(vac)).empty());

    // On the vacuum sector Q acts as (m + a).
    Rational a = make_rational(2, 7);
    ExactMatrix q = supercharge_odd_exact(b, a);
    for (int i : b.vacuum_sector()) {
        CHECK(q.column(i).size() == 1);
        CHECK(q.at(i, i) == GaussQ(Rational(b.state(i).charge[0]) + a));
    }

    // S Q(a) S^{-1} = Q(a − 1) below the top charge.
    ExactMatrix s = mode_operator(b, Mode::shift_e);
    auto keep = below_charge_top(b, 0);
    ExactMatrix diff = s * q.restrict_columns(keep) - supercharge_odd_exact(b, a - 1) * s.restrict_columns(keep);
    CHECK(all_zero_on(diff, keep));
}

TEST_CASE("even supercharge") {
    FockBasis b(TruncationParams::make(3, 1), Variant::even);
    Rational s = make_rational(1, 5), phi = make_rational(-2, 3);
    ExactMatrix q = supercharge_even_exact(b, s, phi);
    CHECK(is_hermitian(b, q));
    ExactMatrix g = grading_operator(b);
    CHECK((g * q + q * g).nonzeros() == 0);

    // Shifting the f charge moves the φ argument by one period.
    ExactMatrix sf = mode_operator(b, Mode::shift_f);
    auto keep = below_charge_top(b, 1);
    ExactMatrix diff = sf * q.restrict_columns(keep) - supercharge_even_exact(b, s, phi - 1) * sf.restrict_columns(keep);
    CHECK(all_zero_on(diff, keep));
    ExactMatrix se = mode_operator(b, Mode::shift_e);
    keep = below_charge_top(b, 0);
    diff = se * q.restrict_columns(keep) - supercharge_even_exact(b, s - 1, phi) * se.restrict_columns(keep);
    CHECK(all_zero_on(diff, keep));

    ExactMatrix q00 = supercharge_even_exact(b, Rational(0), Rational(0));
    for (int i : b.vacuum_sector())
        if (b.state(i).charge[0] == 0 && b.state(i).charge[1] == 0) CHECK(q00.column(i).empty());
}

TEST_CASE("square identities in floating point") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-7.0, 7.0);
    FockBasis odd(TruncationParams::make(4, 2), Variant::odd);
    FockBasis even(TruncationParams::make(2, 1), Variant::even);
    for (int i = 0; i < 3; ++i) {
        CHECK(odd_square_identity_deviation(odd, u(rng)) < 1e-12);
        CHECK(even_square_identity_deviation(even, u(rng), u(rng)) < 1e-12);
    }
}

TEST_CASE("orthonormal export is hermitian and families agree") {
    auto b = make_basis(TruncationParams::make(3, 1), Variant::odd);
    OddSuperchargeFamily fam(b);
    double phi = 1.3;
    ComplexSparse q = fam.at(phi);
    CHECK((q - ComplexSparse(q.adjoint())).norm() < 1e-13);
    ComplexSparse exact = to_orthonormal(*b, supercharge_odd_exact(*b, Rational(0)));
    CHECK((fam.at(0.0) - exact).norm() < 1e-13);

    OddSuperchargeFamily doubled(b, 1, 2);
    CHECK(doubled.at(phi).rows() == 2 * b->dim());

    auto eb = make_basis(TruncationParams::make(2, 1), Variant::even);
    EvenSuperchargeFamily efam(eb);
    ComplexSparse qe = efam.at(0.4, -2.0);
    CHECK((qe - ComplexSparse(qe.adjoint())).norm() < 1e-13);
    ComplexSparse anti = efam.grading() * qe + qe * efam.grading();
    CHECK(anti.norm() < 1e-13);
    ComplexSparse ins = efam.supertrace_insertion();
    // (−i)Γψ^0_0ψ^1_0 = (−1)^N, so it is diagonal ±1.
    for (int k = 0; k < ins.outerSize(); ++k)
        for (ComplexSparse::InnerIterator it(ins, k); it; ++it) {
            CHECK(it.row() == it.col());
            CHECK(std::abs(std::abs(it.value()) - 1.0) < 1e-14);
        }
}
