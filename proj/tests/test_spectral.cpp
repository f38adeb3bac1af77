#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "twistk/spectral.hpp"

using namespace twistk;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexSparse from_dense(const Eigen::MatrixXcd& d) { return d.sparseView(); }

ComplexSparse random_hermitian(int n, std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
    Eigen::MatrixXcd h = scale * (a + a.adjoint()) / 2.0;
    return from_dense(h);
}

// Brute-force flow oracle: negatives at the start minus negatives one period later.
int negative_count_oracle(const ComplexSparse& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s{Eigen::MatrixXcd(a)};
    return static_cast<int>((s.eigenvalues().array() < 0).count());
}

}  // namespace

TEST_CASE("eigendecompose small cases") {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
    d.diagonal() << 3.0, 1.0, 2.0;
    auto sys = eigendecompose(from_dense(d));
    CHECK(sys.values[0] == doctest::Approx(1));
    CHECK(sys.values[2] == doctest::Approx(3));
    CHECK(sys.residual < 1e-10);
    CHECK(sys.orthonormality_defect < 1e-10);

    Eigen::MatrixXcd x(2, 2);
    x << 0, 1, 1, 0;
    auto sx = eigendecompose(from_dense(x));
    CHECK(sx.values[0] == doctest::Approx(-1));
    CHECK(sx.values[1] == doctest::Approx(1));

    Eigen::MatrixXcd bad(2, 2);
    bad << 0, 1, 2, 0;
    CHECK_THROWS_AS(eigendecompose(from_dense(bad)), DomainError);
}

TEST_CASE("block spectrum agrees with dense solve") {
    auto b = make_basis(TruncationParams::make(4, 2), Variant::odd);
    OddSuperchargeFamily fam(b);
    ComplexSparse q = fam.at(0.9);
    auto blocks = coupled_blocks({q});
    CHECK(blocks.size() > 5);
    auto bs = block_spectrum(q, blocks);
    auto dense = eigendecompose(q);
    CHECK((bs.all_values() - dense.values).cwiseAbs().maxCoeff() < 1e-10);
    for (const auto& s : bs.systems) CHECK(s.residual < 1e-10);
}

TEST_CASE("vacuum sector eigenvalues are m + phi/2pi") {
    auto b = make_basis(TruncationParams::make(3, 2), Variant::odd);
    double phi = 0.7;
    ComplexSparse q = OddSuperchargeFamily(b).at(phi);
    for (int i : b->vacuum_sector()) {
        // vacuum states decouple, so their eigenvalue is the diagonal entry
        CHECK(coupled_blocks({q}).size() > 0);
        CHECK(q.coeff(i, i).real() == doctest::Approx(b->state(i).charge[0] + phi / (2 * kPi)));
    }
    auto values = block_spectrum(q, coupled_blocks({q})).all_values();
    for (int m = -2; m <= 2; ++m) {
        double target = m + phi / (2 * kPi);
        CHECK((values.array() - target).abs().minCoeff() < 1e-12);
    }
}

TEST_CASE("approximate sign") {
    std::mt19937 rng(3);
    ComplexSparse q = random_hermitian(6, rng, 3.0);
    ComplexSparse f = approximate_sign(q);
    auto sq = eigendecompose(q), sf = eigendecompose(f);
    for (int k = 0; k < 6; ++k) {
        double mu = sq.values[k];
        CHECK(sf.values[k] == doctest::Approx(mu / std::sqrt(1 + mu * mu)).epsilon(1e-12));
        CHECK(std::abs(sf.values[k]) < 1);
    }
    CHECK(Eigen::MatrixXcd(ComplexSparse(f * q - q * f)).cwiseAbs().maxCoeff() < 1e-12);
    ComplexSparse zero(4, 4);
    CHECK(approximate_sign(zero).nonZeros() == 0);

    // 1 − F² has eigenvalues 1/(1+μ²).
    ComplexSparse id(6, 6);
    id.setIdentity();
    auto rest = eigendecompose(ComplexSparse(id - f * f));
    std::vector<double> expect;
    for (int k = 0; k < 6; ++k) expect.push_back(1 / (1 + sq.values[k] * sq.values[k]));
    std::sort(expect.begin(), expect.end());
    for (int k = 0; k < 6; ++k) CHECK(rest.values[k] == doctest::Approx(expect[k]).epsilon(1e-12));
}

TEST_CASE("fredholm report") {
    auto b = make_basis(TruncationParams::make(4, 2), Variant::odd);
    OddSuperchargeFamily fam(b);
    std::vector<double> grid{0.1, 0.5, 1.0};
    auto rep = fredholm_report(grid, [&](double x) { return fam.at(x); });
    CHECK(rep.samples.size() == 3);
    CHECK(rep.finite_multiplicity);
    CHECK(rep.bounded_differences);
    // ψ_0 has norm 1, so the differences are |Δφ|/2π.
    CHECK(rep.neighbor_differences[0] == doctest::Approx(0.4 / (2 * kPi)));
    // counting function is non-decreasing in the threshold
    const auto& counting = rep.samples[0].counting;
    for (size_t i = 1; i < counting.size(); ++i) CHECK(counting[i].second >= counting[i - 1].second);
    CHECK(counting.back().second == b->dim());

    ComplexSparse c = fam.at(1.0);
    auto constant = fredholm_report(grid, [&](double) { return c; });
    for (double d : constant.neighbor_differences) CHECK(d == 0);
}

TEST_CASE("spectral flow of the odd families") {
    auto b = make_basis(TruncationParams::make(4, 2), Variant::odd);
    FlowOptions opts;
    opts.grid = 64;

    OddSuperchargeFamily pos(b, 1), neg(b, -1);
    auto fp = spectral_flow(pos, opts);
    CHECK(fp.net_flow == 1);
    CHECK(fp.net_flow == fp.direction_sum());
    CHECK(fp.seam_residual < 1e-12);
    CHECK(fp.gluing == "S^dagger");
    CHECK(spectral_flow(neg, opts).net_flow == -1);

    // Brute-force oracle on the negative count at both ends of a shifted loop.
    double x0 = 0.3;
    int oracle = negative_count_oracle(pos.at(x0)) - negative_count_oracle(pos.at(x0 + 2 * kPi));
    CHECK(oracle == 1);

    for (int r : {2, 3}) CHECK(spectral_flow(OddSuperchargeFamily(b, 1, r), opts).net_flow == r);

    for (double offset : {0.4, -1.1}) {
        FlowOptions o = opts;
        o.offset = offset;
        CHECK(spectral_flow(pos, o).net_flow == 1);
    }

    // A grid point landing exactly on a zero eigenvalue is shifted away.
    auto at_zero = spectral_flow(pos, opts);
    CHECK(at_zero.grid_shift > 0);

    ComplexSparse c = pos.at(kPi);
    ComplexSparse id(c.rows(), c.cols());
    id.setIdentity();
    CHECK(spectral_flow([&](double) { return c; }, id, "identity", opts).net_flow == 0);
}

TEST_CASE("spectral flow is additive on direct sums") {
    auto b = make_basis(TruncationParams::make(3, 2), Variant::odd);
    OddSuperchargeFamily pos(b, 1), neg(b, -1);
    FlowOptions opts;
    opts.grid = 48;
    auto sum = [&](double x) {
        ComplexSparse a = pos.at(x), c = neg.at(x);
        std::vector<Eigen::Triplet<std::complex<double>>> t;
        for (int k = 0; k < a.outerSize(); ++k)
            for (ComplexSparse::InnerIterator it(a, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
        for (int k = 0; k < c.outerSize(); ++k)
            for (ComplexSparse::InnerIterator it(c, k); it; ++it)
                t.emplace_back(a.rows() + it.row(), a.cols() + it.col(), it.value());
        ComplexSparse m(2 * a.rows(), 2 * a.cols());
        m.setFromTriplets(t.begin(), t.end());
        return m;
    };
    ComplexSparse gp = pos.seam_gluing(), gn = neg.seam_gluing();
    std::vector<Eigen::Triplet<std::complex<double>>> t;
    for (int k = 0; k < gp.outerSize(); ++k)
        for (ComplexSparse::InnerIterator it(gp, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < gn.outerSize(); ++k)
        for (ComplexSparse::InnerIterator it(gn, k); it; ++it)
            t.emplace_back(gp.rows() + it.row(), gp.cols() + it.col(), it.value());
    ComplexSparse g(2 * gp.rows(), 2 * gp.cols());
    g.setFromTriplets(t.begin(), t.end());
    CHECK(spectral_flow(sum, g, "S^dagger + S", opts).net_flow == 0);
}

TEST_CASE("seam mismatch is rejected") {
    auto b = make_basis(TruncationParams::make(3, 2), Variant::odd);
    OddSuperchargeFamily pos(b, 1);
    ComplexSparse id(b->dim(), b->dim());
    id.setIdentity();
    CHECK_THROWS_AS(spectral_flow([&](double x) { return pos.at(x); }, id, "identity"), DomainError);
}

TEST_CASE("suspension") {
    std::mt19937 rng(11);
    ComplexSparse f = approximate_sign(random_hermitian(5, rng, 2.0));
    ComplexSparse id(5, 5);
    id.setIdentity();
    CHECK(Eigen::MatrixXcd(ComplexSparse(suspend_family(f, 0) - id)).cwiseAbs().maxCoeff() < 1e-15);
    ComplexSparse half = suspend_family(f, kPi / 2) - std::complex<double>(0, 1) * f;
    CHECK(Eigen::MatrixXcd(half).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(suspend_family(std::complex<double>(2.0) * id, 0.3), DomainError);

    // On [0, π] the suspended operator is unitary when F is an involution's limit; check normality instead.
    ComplexSparse u = suspend_family(f, 1.1);
    CHECK(Eigen::MatrixXcd(ComplexSparse(u * ComplexSparse(u.adjoint()) - ComplexSparse(u.adjoint()) * u))
              .cwiseAbs()
              .maxCoeff() < 1e-14);

    for (double s : {0.0, kPi / 3, 1.9, kPi}) {
        auto d = suspension_defect(f, s);
        CHECK_FALSE(d.on_constant_half);
        CHECK(d.identity_residual < 1e-12);
    }
    for (double s : {3.5, 5.0, 2 * kPi - 1e-9}) {
        auto d = suspension_defect(f, s);
        CHECK(d.on_constant_half);
        CHECK(d.symbolic == 0.0);
        CHECK(d.numeric < 1e-15);
    }
}
