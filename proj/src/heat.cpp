#include "twistk/heat.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace twistk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * kPi;

Eigen::VectorXcd diagonal_of(const ComplexSparse& m) {
    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k)
        for (ComplexSparse::InnerIterator it(m, k); it; ++it) {
            if (it.row() != it.col()) throw DomainError("weight operator must be diagonal");
            d[k] = it.value();
        }
    return d;
}

void check_t(double t) {
    if (!(t > 0) || !std::isfinite(t)) throw DomainError("heat time must be positive");
}

double gaussian_sum(double t, double x) {
    double total = 0;
    int center = static_cast<int>(std::lround(-x));
    for (int m = center - 40; m <= center + 40; ++m) total += std::exp(-t * (m + x) * (m + x));
    return total;
}

// Signed distance to c on the circle, in (−π, π].
double circle_distance(double x, double c) {
    double d = std::remainder(x - c, kTwoPi);
    return d == -kPi ? kPi : d;
}

}  // namespace

const char* to_string(DensityVariant v) {
    switch (v) {
        case DensityVariant::odd: return "odd";
        case DensityVariant::suspended: return "suspended";
        case DensityVariant::even: return "even";
    }
    return "?";
}

double DensityConstants::odd() { return 1 / kTwoPi; }
double DensityConstants::suspended() { return 1 / (2 * kPi * kPi); }
double DensityConstants::even() { return 1 / (8 * kPi * kPi * kPi); }

std::array<double, 2> DensitySample::center() const {
    if (variant == DensityVariant::suspended) return {kPi / 2, 0};
    return {0, 0};
}

std::vector<double> periodic_grid(int n) {
    if (n < 1) throw DomainError("grid needs at least one point");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = kTwoPi * i / n;
    return g;
}

DensitySample odd_density(double t, int phi_points, const BasisPtr& basis, int rank) {
    check_t(t);
    if (basis->variant() != Variant::odd) throw DomainError("odd density needs the odd module");
    OddSuperchargeFamily fam(basis);
    Eigen::VectorXcd weight = diagonal_of(fam.chirality());
    auto blocks = coupled_blocks({fam.at(0.37)});
    DensitySample d{DensityVariant::odd, t, basis->truncation(), rank, {}, periodic_grid(phi_points), {}};
    double prefactor = rank * DensityConstants::odd() * std::sqrt(t / kPi);
    for (double phi : d.phi_grid) {
        auto spec = block_spectrum(fam.at(phi), blocks);
        d.values.push_back(prefactor * spec.weighted_trace(weight, [t](double mu) { return std::exp(-t * mu * mu); }));
    }
    return d;
}

DensitySample suspended_density(double t, int s_points, int phi_points, const BasisPtr& basis, int rank) {
    check_t(t);
    if (basis->variant() != Variant::odd) throw DomainError("suspended density needs the odd module");
    OddSuperchargeFamily fam(basis);
    Eigen::VectorXcd weight = diagonal_of(fam.chirality());
    auto blocks = coupled_blocks({fam.at(0.37)});
    DensitySample d{DensityVariant::suspended, t, basis->truncation(), rank, periodic_grid(s_points),
                    periodic_grid(phi_points), {}};
    d.values.assign(d.s_grid.size() * d.phi_grid.size(), 0.0);
    double prefactor = rank * DensityConstants::suspended() * t;
    for (size_t j = 0; j < d.phi_grid.size(); ++j) {
        auto spec = block_spectrum(fam.at(d.phi_grid[j]), blocks);
        for (size_t i = 0; i < d.s_grid.size(); ++i) {
            double s = d.s_grid[i];
            if (s >= kPi) continue;  // extended by zero on [π, 2π]
            double c = std::cos(s), sn = std::sin(s);
            double tr = spec.weighted_trace(weight, [&](double mu) { return std::exp(-t * (c * c + sn * sn * mu * mu)); });
            d.values[i * d.phi_grid.size() + j] = prefactor * sn * sn * tr;
        }
    }
    return d;
}

DensitySample even_density(double t, int s_points, int phi_points, const BasisPtr& basis, int rank) {
    check_t(t);
    if (basis->variant() != Variant::even) throw DomainError("even density needs the even module");
    EvenSuperchargeFamily fam(basis);
    Eigen::VectorXcd weight = diagonal_of(fam.supertrace_insertion());
    auto blocks = coupled_blocks({fam.at(0.37, 0.71)});
    DensitySample d{DensityVariant::even, t, basis->truncation(), rank, periodic_grid(s_points),
                    periodic_grid(phi_points), {}};
    double prefactor = rank * DensityConstants::even() * t;
    for (double s : d.s_grid)
        for (double phi : d.phi_grid) {
            auto spec = block_spectrum(fam.at(s, phi), blocks);
            d.values.push_back(prefactor * spec.weighted_trace(weight, [t](double mu) { return std::exp(-t * mu * mu); }));
        }
    return d;
}

double odd_density_oracle(double t, double phi, int rank) {
    check_t(t);
    return rank * DensityConstants::odd() * std::sqrt(t / kPi) * gaussian_sum(t, phi / kTwoPi);
}

double even_density_oracle(double t, double s, double phi, int rank) {
    check_t(t);
    // two vacua, one Gaussian per charge direction
    return rank * DensityConstants::even() * t * 2 * gaussian_sum(t, s / kTwoPi) * gaussian_sum(t, phi / kTwoPi);
}

LocalizationStats localization_stats(const DensitySample& d, double window) {
    LocalizationStats st;
    auto c = d.center();
    size_t ns = d.two_dimensional() ? d.s_grid.size() : 1;
    size_t np = d.phi_grid.size();
    double cell = kTwoPi / np * (d.two_dimensional() ? kTwoPi / ns : 1.0);
    double best = -INFINITY;
    for (size_t i = 0; i < ns; ++i)
        for (size_t j = 0; j < np; ++j) {
            double v = d.values[i * np + j];
            double ds = d.two_dimensional() ? circle_distance(d.s_grid[i], c[0]) : 0.0;
            double dp = circle_distance(d.phi_grid[j], c[1]);
            st.total += v * cell;
            st.second_moment += (ds * ds + dp * dp) * v * cell;
            if (std::max(std::abs(ds), std::abs(dp)) <= window) st.in_window += v * cell;
            if (v > best) {
                best = v;
                st.argmax = {d.two_dimensional() ? d.s_grid[i] : 0.0, d.phi_grid[j]};
            }
        }
    return st;
}

std::string CharacterClass::to_string() const {
    std::ostringstream os;
    os << (variant == Variant::odd ? "odd" : "even") << " character " << form.to_string();
    return os.str();
}

CharacterClass assemble_character(const CharacterEvidence& evidence, const CurvatureData& xi, Variant variant) {
    ExtClassQ ch = chern_character(xi);
    int rank = xi.rank();
    if (std::abs(evidence.flow) != rank)
        throw DomainError("spectral flow " + std::to_string(evidence.flow) + " does not match rank " +
                          std::to_string(rank));
    if (!std::isnan(evidence.density_total) && std::abs(evidence.density_total - rank) > evidence.tol)
        throw DomainError("integrated density does not match the rank");

    CharacterClass out;
    out.variant = variant;
    out.sign = evidence.flow < 0 ? -1 : 1;
    out.coefficient = ch;
    bool odd = variant == Variant::odd;
    uint32_t prefix = odd ? dphi_bit() : (ds_bit() | dphi_bit());
    out.form = GaussQ(out.sign) * FourierForm::from_class(ch, prefix, !odd);
    // √π (dφ/2π) for odd, (ds/2π)(dφ/2π) for even
    out.form.set_scale(odd ? ScaleTag{1, -1} : ScaleTag{0, -2});
    return out;
}

bool factorization_check(const CurvatureData& xi, int flow_sign) {
    int flow = flow_sign * xi.rank();
    CharacterEvidence ev{flow, NAN, 0};
    auto even = assemble_character(ev, xi, Variant::even);
    auto odd = assemble_character(ev, xi, Variant::odd);
    return desuspend(even.form) == odd.form;
}

}  // namespace twistk
