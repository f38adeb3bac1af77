// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>

#include "twistk/fock.hpp"
#include "twistk/forms.hpp"
#include "twistk/heat.hpp"
#include "twistk/sampling.hpp"
#include "twistk/spectral.hpp"
#include "twistk/torus_ktheory.hpp"

using namespace twistk;

namespace {

constexpr double kPi = std::numbers::pi;

// Tolerances and budgets.
constexpr double kKGroupSeconds = 5.0;
constexpr double kSquareTol = 1e-12;
constexpr double kFlowSeconds = 60.0;
constexpr double kHeatTol = 1e-6;
constexpr double kZeroModeTol = 1e-10;
constexpr double kGapFloor = 0.2;
constexpr double kSuspensionTol = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

void guarded(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void kgroups() {
    auto t0 = Clock::now();
    bool ok = true;
    int cases = 0;
    for (int n = 2; n <= 5; ++n)
        for (long k : {1L, 2L, 3L, 6L})
            for (int degree : {0, 1}) {
                auto r = twisted_k_group(TwistSpec::make(n, k), degree);
                ok = ok && r.cross_check_ok && r.group == r.closed_form;
                ++cases;
            }
    auto spec = TwistSpec::make(2, 2);
    auto k0 = twisted_k_group(spec, 0).group, k1 = twisted_k_group(spec, 1).group;
    bool spot = k0 == AbelianGroup::from_cyclic(3, {}) && k1 == AbelianGroup::from_cyclic(3, {Integer(2)});
    double dt = seconds_since(t0);
    report(1, ok && spot && dt < kKGroupSeconds,
           fmt("%d groups match closed form; (2,2): K0=%s K1=%s; %.2fs", cases, k0.to_string().c_str(),
               k1.to_string().c_str(), dt));
}

void relations() {
    auto odd = relation_check(*make_basis(TruncationParams::make(6, 3), Variant::odd));
    auto even = relation_check(*make_basis(TruncationParams::make(6, 1), Variant::even));
    report(2, odd.all_zero() && even.all_zero(),
           "exact violations odd " + odd.max_violation().get_str() + ", even " + even.max_violation().get_str());
}

void square_identities() {
    Rng rng(2024);
    std::uniform_real_distribution<double> u(0, 2 * kPi);
    auto odd = make_basis(TruncationParams::make(6, 3), Variant::odd);
    auto even = make_basis(TruncationParams::make(6, 1), Variant::even);
    double worst_odd = 0, worst_even = 0;
    for (int i = 0; i < 8; ++i) worst_odd = std::max(worst_odd, odd_square_identity_deviation(*odd, u(rng)));
    for (int i = 0; i < 8; ++i) {
        double s = u(rng), phi = u(rng);
        worst_even = std::max(worst_even, even_square_identity_deviation(*even, s, phi));
    }
    report(3, worst_odd < kSquareTol && worst_even < kSquareTol,
           fmt("max deviation odd %.2e, even %.2e (tol %.0e)", worst_odd, worst_even, kSquareTol));
}

void flows() {
    auto t0 = Clock::now();
    auto basis = make_basis(TruncationParams::make(6, 3), Variant::odd);
    FlowOptions opts;
    opts.grid = 256;
    constexpr int rank = 3;
    int plus = spectral_flow(OddSuperchargeFamily(basis, 1), opts).net_flow;
    int minus = spectral_flow(OddSuperchargeFamily(basis, -1), opts).net_flow;
    int ranked = spectral_flow(OddSuperchargeFamily(basis, 1, rank), opts).net_flow;
    ComplexSparse q = OddSuperchargeFamily(basis).at(kPi);
    ComplexSparse id(q.rows(), q.cols());
    id.setIdentity();
    int constant = spectral_flow([&q](double) { return q; }, id, "identity", opts).net_flow;
    double dt = seconds_since(t0);
    report(4, plus == 1 && minus == -1 && ranked == rank && constant == 0 && dt < kFlowSeconds,
           fmt("flows %+d %+d %+d (rank %d) %+d; %.1fs", plus, minus, ranked, rank, constant, dt));
}

void odd_heat() {
    auto basis = make_basis(TruncationParams::make(8, 4), Variant::odd);
    double worst_oracle = 0, worst_total = 0, prev = INFINITY;
    bool decreasing = true;
    for (double t : {1.0, 4.0, 16.0}) {
        auto d = odd_density(t, 256, basis);
        for (size_t j = 0; j < d.phi_grid.size(); ++j)
            worst_oracle = std::max(worst_oracle, std::abs(d.values[j] - odd_density_oracle(t, d.phi_grid[j])));
        auto st = localization_stats(d, 0.5);
        worst_total = std::max(worst_total, std::abs(st.total - 1.0));
        decreasing = decreasing && st.second_moment < prev;
        prev = st.second_moment;
    }
    report(5, worst_oracle < kHeatTol && worst_total < kHeatTol && decreasing,
           fmt("oracle %.2e, total %.2e, moments decreasing %s", worst_oracle, worst_total, decreasing ? "yes" : "no"));
}

void even_gap_and_localization() {
    auto basis = make_basis(TruncationParams::make(6, 1), Variant::even);
    EvenSuperchargeFamily fam(basis);
    auto blocks = coupled_blocks({fam.at(0.37, 0.71)});
    auto min_sq = [&](double s, double phi) {
        return block_spectrum(fam.at(s, phi), blocks).all_values().cwiseAbs2().minCoeff();
    };
    double zero = std::max({min_sq(0, 0), min_sq(2 * kPi, 0), min_sq(0, 2 * kPi)});
    double gap = min_sq(kPi, kPi);

    auto odd = make_basis(TruncationParams::make(6, 3), Variant::odd);
    constexpr int s_points = 32, phi_points = 64;
    auto d = suspended_density(64, s_points, phi_points, odd);
    auto st = localization_stats(d, 0.5);
    auto c = d.center();
    bool near = std::abs(std::remainder(st.argmax[0] - c[0], 2 * kPi)) <= 2 * kPi / s_points &&
                std::abs(std::remainder(st.argmax[1] - c[1], 2 * kPi)) <= 2 * kPi / phi_points;
    report(6, zero < kZeroModeTol && gap > kGapFloor && near,
           fmt("min Q^2 at lattice %.1e, at (pi,pi) %.3f; suspended argmax (%.3f, %.3f)", zero, gap, st.argmax[0],
               st.argmax[1]));
}

void suspension() {
    auto basis = make_basis(TruncationParams::make(6, 3), Variant::odd);
    OddSuperchargeFamily fam(basis);
    double worst = 0, symbolic = 0;
    for (double phi : {0.3, 1.9, 3.5, 5.2}) {
        ComplexSparse f = approximate_sign(fam.at(phi));
        for (int i = 0; i < 64; ++i) {
            worst = std::max(worst, suspension_defect(f, kPi * i / 63).identity_residual);
            symbolic = std::max(symbolic, suspension_defect(f, kPi + kPi * (i + 0.5) / 64).symbolic);
        }
    }
    report(7, worst < kSuspensionTol && symbolic == 0.0,
           fmt("identity residual %.2e on [0,pi], defect %.1f on (pi,2pi)", worst, symbolic));
}

void primitives() {
    Rng rng(7);
    int exact = 0, worst = 0;
    bool bound_ok = true;
    constexpr int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        int n = 2 + trial % 5;
        auto h = harmonic_twist(to_rational(random_integral_two_form(rng, n)), false);
        auto phi = random_admissible_potential(rng, n, 20);
        auto r = twisted_primitive(phi, h);
        exact += twisted_d(r.omega, h) == exterior_d(phi);
        bound_ok = bound_ok && r.iterations <= (n + 3) / 2 + 1;
        worst = std::max(worst, r.iterations);
    }
    report(8, exact == trials && bound_ok, fmt("%d/%d exact, max iterations %d", exact, trials, worst));
}

void gauge() {
    Rng rng(11);
    int ok = 0;
    constexpr int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        int n = 2 + trial % 4;
        auto h = harmonic_twist(to_rational(random_integral_two_form(rng, n)), false);
        auto w = random_form(rng, n, false, 8);
        auto phi = random_gauge_potential(rng, n, 4);
        ok += twisted_d(gauge_transform(w, phi), h + exterior_d(phi)) == gauge_transform(twisted_d(w, h), phi);
    }
    report(9, ok == trials, fmt("%d/%d chain-map identities exact", ok, trials));
}

void torsion_classes() {
    auto spec = TwistSpec::make(2, 3);
    auto one = ExtClassQ::scalar(2, Rational(1));
    std::set<long> residues;
    bool annihilated = true;
    for (long j = 0; j <= 5; ++j) {
        auto c = classify_supercharge(one + ExtClassQ::monomial(2, {1, 2}, Rational(j)), 1, spec);
        for (size_t i = 0; i < c.coordinates.size(); ++i)
            if (c.moduli[i] != 0) annihilated = annihilated && (3 * c.coordinates[i]) % c.moduli[i] == 0;
        auto t = c.torsion();
        if (!t.empty()) residues.insert(t[0].get_si());
    }
    bool ranks = true;
    for (int n = 2; n <= 4; ++n)
        for (long k : {1L, 2L, 3L}) {
            auto s = TwistSpec::make(n, k);
            ranks = ranks && twisted_cohomology_rank(s, Parity::even) == twisted_k_group(s, 0).group.free_rank &&
                    twisted_cohomology_rank(s, Parity::odd) == twisted_k_group(s, 1).group.free_rank;
        }
    report(10, residues.size() == 3 && annihilated && ranks,
           fmt("%zu distinct torsion cosets, 3c = 0: %s, cohomology ranks match: %s", residues.size(),
               annihilated ? "yes" : "no", ranks ? "yes" : "no"));
}

void factorization() {
    Rng rng(5);
    int ok = 0;
    for (int trial = 0; trial < 10; ++trial) {
        auto xi = random_curvature(rng, 2 + trial % 3);
        ok += factorization_check(xi, trial % 2 ? -1 : 1);
    }
    report(11, ok == 10, fmt("%d/10 even characters desuspend to the odd ones", ok));
}

}  // namespace

int main() {
    guarded(1, kgroups);
    guarded(2, relations);
    guarded(3, square_identities);
    guarded(4, flows);
    guarded(5, odd_heat);
    guarded(6, even_gap_and_localization);
    guarded(7, suspension);
    guarded(8, primitives);
    guarded(9, gauge);
    guarded(10, torsion_classes);
    guarded(11, factorization);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
