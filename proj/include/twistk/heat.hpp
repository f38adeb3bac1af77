#pragma once

// Heat-kernel supertrace densities of the supercharge families, their
// localization, and the symbolic characters they assemble into.

#include <array>
#include <string>
#include <vector>

#include "twistk/forms.hpp"
#include "twistk/spectral.hpp"

namespace twistk {

enum class DensityVariant { odd, suspended, even };
const char* to_string(DensityVariant v);

// Normalizations fixing the total mass of each density to the rank.
struct DensityConstants {
    static double odd();        // 1/2π, multiplied by √(t/π)
    static double suspended();  // 1/(2π²), multiplied by t
    static double even();       // 1/(8π³), multiplied by t
};

struct DensitySample {
    DensityVariant variant = DensityVariant::odd;
    double t = 1;
    TruncationParams trunc;
    int rank = 1;
    std::vector<double> s_grid;    // empty for the odd density
    std::vector<double> phi_grid;
    std::vector<double> values;    // row-major over (s, φ)

    bool two_dimensional() const { return !s_grid.empty(); }
    double at(size_t i_s, size_t i_phi) const { return values[i_s * phi_grid.size() + i_phi]; }
    // Point where the density concentrates as t grows: (s, φ), s omitted when 1D.
    std::array<double, 2> center() const;
};

// Uniform periodic grid of n points on [0, 2π).
std::vector<double> periodic_grid(int n);

DensitySample odd_density(double t, int phi_points, const BasisPtr& basis, int rank = 1);
DensitySample suspended_density(double t, int s_points, int phi_points, const BasisPtr& basis, int rank = 1);
DensitySample even_density(double t, int s_points, int phi_points, const BasisPtr& basis, int rank = 1);

// Closed forms for the untruncated traces.
double odd_density_oracle(double t, double phi, int rank = 1);
double even_density_oracle(double t, double s, double phi, int rank = 1);

struct LocalizationStats {
    double total = 0;
    double in_window = 0;      // mass within max-norm distance `window` of the center
    double second_moment = 0;  // Σ d² · density · cell, periodic distance to the center
    std::array<double, 2> argmax{};
};
LocalizationStats localization_stats(const DensitySample& d, double window);

struct CharacterEvidence {
    int flow = 0;
    double density_total = NAN;  // optional: integrated density
    double tol = 1e-6;
};

struct CharacterClass {
    Variant variant = Variant::odd;
    int sign = 1;
    ExtClassQ coefficient;  // ch(F_ξ) on T^n
    FourierForm form;       // circle factors and scale tag included
    std::string to_string() const;
};

// Odd: √π (dφ/2π) ∧ ch(F_ξ) · sign(flow); even: (ds/2π) ∧ (dφ/2π) ∧ ch(F_ξ) · sign(flow).
// DomainError when the numeric rank disagrees with the degree-0 part of ch(F_ξ).
CharacterClass assemble_character(const CharacterEvidence& evidence, const CurvatureData& xi, Variant variant);

// Desuspension of the even character equals the odd character, exactly.
bool factorization_check(const CurvatureData& xi, int flow_sign = 1);

}  // namespace twistk
