#pragma once

// Eigenanalysis of hermitian sparse operators, approximate sign, spectral flow
// of loops and the suspension map.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twistk/fock.hpp"

namespace twistk {

struct EigenSystem {
    Eigen::VectorXd values;    // ascending
    Eigen::MatrixXcd vectors;  // orthonormal columns
    double residual = 0;       // max_k ‖A v_k − μ_k v_k‖
    double orthonormality_defect = 0;
};

// Max entry of |A − A^†|.
double hermiticity_defect(const ComplexSparse& a);

// Full dense decomposition; DomainError when A is not hermitian.
EigenSystem eigendecompose(const ComplexSparse& a, double tol = 1e-10);

// Connected components of the union of sparsity patterns, each sorted.
std::vector<std::vector<int>> coupled_blocks(const std::vector<ComplexSparse>& pattern);

// Block-by-block decomposition over a fixed block structure.
struct BlockSpectrum {
    std::vector<std::vector<int>> blocks;
    std::vector<EigenSystem> systems;

    int dim() const;
    Eigen::VectorXd all_values() const;  // ascending
    // Tr(W f(A)) for a diagonal weight W given by its diagonal entries.
    double weighted_trace(const Eigen::VectorXcd& weight, const std::function<double(double)>& f) const;
};
BlockSpectrum block_spectrum(const ComplexSparse& a, const std::vector<std::vector<int>>& blocks, double tol = 1e-10);

// Q/√(1+Q²), computed block by block on the components of Q.
ComplexSparse approximate_sign(const ComplexSparse& q);

struct FredholmSample {
    double parameter = 0;
    std::vector<std::pair<double, int>> multiplicities;  // distinct eigenvalue → multiplicity
    std::vector<std::pair<double, int>> counting;        // threshold T → #{|μ| ≤ T}
    int max_multiplicity = 0;
};

struct FredholmReport {
    std::vector<FredholmSample> samples;
    std::vector<double> neighbor_differences;  // ‖Q(x_{j+1}) − Q(x_j)‖ in operator norm
    bool finite_multiplicity = true;
    bool bounded_differences = true;
    bool dense_domain = true;  // finite truncation
};

FredholmReport fredholm_report(const std::vector<double>& parameters,
                               const std::function<ComplexSparse(double)>& family, double bound = 1e6);

struct Crossing {
    double parameter = 0;
    int direction = 0;
};

struct FlowOptions {
    int grid = 256;
    double offset = 0;        // the loop is traversed over [offset, offset + 2π]
    double seam_tol = 1e-9;
    double zero_tol = 1e-9;   // eigenvalues this close to 0 at a grid point trigger a shift
    int max_refine = 8;
};

struct FlowResult {
    int net_flow = 0;
    std::vector<Crossing> crossings;
    std::string gluing;
    double seam_residual = 0;
    double grid_shift = 0;  // extra shift applied to dodge zero eigenvalues
    int refinements = 0;

    int direction_sum() const;
};

// Spectral flow of φ ↦ family(φ) over one period, after checking
// family(φ+2π)·g = g·family(φ). Throws DomainError for a seam mismatch or a
// crossing that refinement cannot attribute.
FlowResult spectral_flow(const std::function<ComplexSparse(double)>& family, const ComplexSparse& gluing,
                         const std::string& gluing_name, const FlowOptions& opts = {});

FlowResult spectral_flow(const OddSuperchargeFamily& family, const FlowOptions& opts = {});

// cos s + i sin s·F on [0, π] and e^{is} on [π, 2π]; requires ‖F‖ ≤ 1 + tol.
ComplexSparse suspend_family(const ComplexSparse& f, double s, double tol = 1e-12);

// F̃ = cos s·γ0 + sin s·γ1 F on H ⊗ ℂ² (γ1 F replaced by γ1 on [π, 2π]).
ComplexSparse suspend_block(const ComplexSparse& f, double s);

struct SuspensionDefect {
    double identity_residual = 0;  // ‖(1 − F̃²) − sin²s (1 − F²)‖_max on [0, π]
    double numeric = 0;            // ‖1 − F̃²‖_max evaluated in floating point
    double symbolic = 0;           // exact value of 1 − F̃² where it is F-independent
    bool on_constant_half = false;
};
SuspensionDefect suspension_defect(const ComplexSparse& f, double s);

}  // namespace twistk
