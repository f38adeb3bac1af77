#include "twistk/sampling.hpp"

namespace twistk {

GaussQ random_gauss_rational(Rng& rng) {
    std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
    Rational re = make_rational(num(rng), den(rng));
    Rational im = make_rational(num(rng), den(rng));
    return GaussQ(re, im);
}

ExtElement random_integral_two_form(Rng& rng, int n) {
    std::uniform_int_distribution<int> c(-3, 3);
    ExtElement f(n);
    for (uint32_t b : basis_monomials(n))
        if (std::popcount(b) == 2) f.add_term(b, Integer(c(rng)));
    return f;
}

FourierForm random_form(Rng& rng, int n, bool with_s, int terms, int parity) {
    std::uniform_int_distribution<int> mode(-2, 2);
    std::uniform_int_distribution<uint32_t> mono(0, (1u << (n + kCircleGenerators)) - 1);
    FourierForm f(n, with_s);
    for (int attempt = 0; static_cast<int>(f.terms().size()) < terms && attempt < 64 * terms; ++attempt) {
        uint32_t b = mono(rng);
        if (!with_s) b &= ~ds_bit();
        if (parity >= 0 && std::popcount(b) % 2 != parity) continue;
        int ks = with_s ? mode(rng) : 0;
        int kp = mode(rng);
        f.add_term({ks, kp, b}, random_gauss_rational(rng));
    }
    return f;
}

FourierForm random_admissible_potential(Rng& rng, int n, int max_terms) {
    FourierForm raw = random_form(rng, n, false, max_terms, 0);
    FourierForm out(n, false);
    for (const auto& [k, c] : raw.terms())
        if (k.k_phi != 0 || k.has_dphi()) out.add_term(k, c);
    return out;
}

FourierForm random_gauge_potential(Rng& rng, int n, int max_terms) {
    FourierForm raw = random_form(rng, n, false, max_terms, 0);
    FourierForm out(n, false);
    for (const auto& [k, c] : raw.terms())
        if (k.degree() > 0) out.add_term(k, c);
    return out;
}

CurvatureData random_curvature(Rng& rng, int n) {
    std::uniform_int_distribution<int> count(0, 2);
    CurvatureData xi{n, count(rng), {}};
    int lines = count(rng);
    for (int l = 0; l < lines; ++l) xi.line_classes.push_back(random_integral_two_form(rng, n));
    if (xi.rank() == 0) xi.trivial_rank = 1;
    return xi;
}

}  // namespace twistk
