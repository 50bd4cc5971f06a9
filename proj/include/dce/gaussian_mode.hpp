#pragma once

// Single-mode Gaussian reductions: quadrature variances, Fock populations,
// diagonal and Rényi-2 entropies.
//
// Variances follow σ_q = ½Σ_k(α_km + β_km)² and σ_p = ½Σ_k(α_km − β_km)², so
// that parametric amplification squeezes q̂ and stretches p̂.

#include <vector>

#include "dce/resonance.hpp"

namespace dce {

struct ModeCovariance {
    int m = 1;
    double tau = 0.0;
    double sigma_q = 0.5;
    double sigma_p = 0.5;
    double sigma_qp = 0.0;

    /// σ_qσ_p − σ_qp².
    [[nodiscard]] double determinant() const noexcept { return sigma_q * sigma_p - sigma_qp * sigma_qp; }
    /// (σ_q + σ_p)/2 − ½.
    [[nodiscard]] double particle_number() const noexcept { return 0.5 * (sigma_q + sigma_p) - 0.5; }
    /// Throws NumericalError unless σ_q, σ_p > 0 and det ≥ ¼ − slack.
    void validate(double slack = 1e-12) const;
};

/// Direct summation over the retained rows plus the absorbed share. Warns
/// when the top 10% of rows carries more than 1% of either variance.
[[nodiscard]] ModeCovariance variances_from_bogoliubov(const BogoliubovState& state, int m);

/// Rate-equation variances carried by the trajectory for column m.
[[nodiscard]] std::vector<ModeCovariance> variances_by_ode(const SvaTrajectory& trajectory, int m);

struct ModePopulations {
    int m = 1;
    double tau = 0.0;
    std::vector<double> probs;
    double tail_bound = 0.0;
    double tail_ratio = 0.0;  ///< asymptotic ratio ρ^(n+1)/ρ^(n) bounding the tail

    [[nodiscard]] int n_cut() const noexcept { return static_cast<int>(probs.size()) - 1; }
};

/// ρ^(n) for n ≤ n_cut from the real three-term recurrence
/// (n+1)t_{n+1} = (2n+1)(b/w)t_n − n(u/w)t_{n−1}, ρ^(n) = 2t_n/√w, with
/// u = (2σ_q−1)(2σ_p−1), w = (2σ_q+1)(2σ_p+1), b = 4σ_qσ_p − 1.
[[nodiscard]] ModePopulations populations(const ModeCovariance& cov, int n_cut);

struct PopulationOptions {
    double negligible = 1e-14;  ///< ρ^(n) threshold ...
    int quiet_run = 5;          ///< ... held for this many consecutive n
    double tail_target = 1e-10;
    int max_n_cut = 1 << 20;
};

/// Grows n_cut until `quiet_run` consecutive populations fall below
/// `negligible` and the geometric tail bound is below `tail_target`.
/// Throws NumericalError when max_n_cut is reached first.
[[nodiscard]] ModePopulations populations_adaptive(const ModeCovariance& cov, const PopulationOptions& options = {});

struct ModeEntropy {
    double value = 0.0;
    double tail_bound = 0.0;  ///< bound on the entropy carried by n > n_cut
};

/// −Σρ ln ρ. Throws NumericalError when the tail bound exceeds 1e-6.
[[nodiscard]] ModeEntropy mode_diagonal_entropy(const ModePopulations& pop);

/// ½ ln det Σ (raw; the vacuum gives −ln 2).
[[nodiscard]] double renyi2_entropy(const ModeCovariance& cov);

struct AsymptoticCoefficients {
    std::vector<double> C;  ///< C^(n) for n ≤ n_cut
    double script_S = 0.0;  ///< −Σ C ln C over the same range (cutoff dependent)
    int n_cut = 0;
};

/// C^(n) with T = 1/(2σ_q) from c₀ = 1, c₁ = 1/(1+T),
/// (n+1)c_{n+1} = (2n+1)c_n/(1+T) − n((1−T)/(1+T))c_{n−1}, C = c_n/√(1+T).
[[nodiscard]] AsymptoticCoefficients asymptotic_coefficients(const ModeCovariance& cov, int n_cut);

/// S_R + [det Σ]^{−1/2}𝒮 at cutoff n_cut.
[[nodiscard]] double asymptotic_diagonal_entropy(const ModeCovariance& cov, int n_cut);

/// ½ ∓ τ^(2μ+1)J_μ²[1 ∓ K_μ²τ] for m = 2μ+1 (first: q, second: p).
struct VariancePair {
    double sigma_q;
    double sigma_p;
};
[[nodiscard]] VariancePair short_time_variances(int m, double tau);

}  // namespace dce
