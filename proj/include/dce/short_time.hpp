#pragma once

// Short-time pipeline: first-order Bogoliubov coefficients, particle number
// and diagonal entropy for a harmonically driven mirror.

#include <vector>

#include <Eigen/Dense>

#include "dce/cavity_model.hpp"

namespace dce {

/// |β_kj| for l(t) = sin(pω₁t): √(kj)τ on resonance (p = k + j), otherwise
/// 2√(kj)εp/|p² − (k+j)²| · |sin(2(k+j)τ/ε)|.
[[nodiscard]] double beta_resonant_magnitude(int k, int j, int p, double tau, double epsilon);

/// N(τ) = p(p² − 1)τ²/6. Warns when τ > 0.3.
[[nodiscard]] double particle_number(int p, double tau);

/// v(p) = Σ_{k=1}^{p−1} (p−k)k ln((p−k)k).
[[nodiscard]] double v_sum(int p);

/// ½N[1 − ln ½N + ln(p(p²−1)/6) − 6v(p)/(p(p²−1))]. Returns 0 when N = 0 and
/// throws RegimeError when N ≥ 2.
[[nodiscard]] double diagonal_entropy_closed_form(int p, double tau);

struct PairTerm {
    int k;
    int j;
    double weight;  ///< |β_kj|²
};

struct EntropyReport {
    double tau = 0.0;
    int p = 0;
    double particle_number = 0.0;
    double diagonal_entropy = 0.0;
    std::vector<PairTerm> per_pair_terms;
};

/// S_d = −(1 − ½N) ln(1 − ½N) − Σ_kj ½|β_kj|² ln ½|β_kj|² with N = Σ|β_kj|²
/// over all ordered pairs. Row/column i holds mode i+1. Throws RegimeError
/// when ½N ≥ 1 and ConfigurationError for negative or non-square input.
[[nodiscard]] EntropyReport diagonal_entropy_general(const Eigen::MatrixXd& beta_magnitudes,
                                                     double tau = 0.0, int p = 0);

/// Table of |β_kj| for modes 1..k_max from the closed form. Off-resonant
/// entries are zero unless `include_off_resonant` is set.
[[nodiscard]] Eigen::MatrixXd resonant_beta_magnitudes(int p, double tau, int k_max,
                                                       bool include_off_resonant = false,
                                                       double epsilon = 0.0);

/// α̃_kj = ∫₀ᵀ A_kj dt and β_kj = ∫₀ᵀ B_kj dt for modes 1..modes.
struct PerturbativeBogoliubov {
    double tau = 0.0;
    int p = 0;
    int k_max = 0;
    Eigen::MatrixXcd alpha_tilde;
    Eigen::MatrixXcd beta;
};

/// Composite Gauss–Legendre quadrature of the coefficient matrices over the
/// whole trajectory. Panels are short compared with the fastest retained
/// phase so the rule is exact to round-off for smooth integrands.
[[nodiscard]] PerturbativeBogoliubov perturbative_bogoliubov(const CouplingTables& tables,
                                                             const InstantaneousSpectrum& spectrum,
                                                             int modes);

}  // namespace dce
