#pragma once

// Seeded random inputs for property checks.

#include <random>

#include "twistk/forms.hpp"

namespace twistk {

using Rng = std::mt19937_64;

GaussQ random_gauss_rational(Rng& rng);
// Integral constant 2-form on T^n with coefficients in [−3, 3].
ExtElement random_integral_two_form(Rng& rng, int n);
// Up to `terms` terms with φ-modes in [−2, 2]; parity −1 means any degree.
FourierForm random_form(Rng& rng, int n, bool with_s, int terms, int parity = -1);
// Even form on T_φ × T^n without the φ-mode-0, dφ-free part: valid input for twisted_primitive.
FourierForm random_admissible_potential(Rng& rng, int n, int max_terms);
// Even form without a degree-0 part: valid input for gauge_transform.
FourierForm random_gauge_potential(Rng& rng, int n, int max_terms);
CurvatureData random_curvature(Rng& rng, int n);

}  // namespace twistk
