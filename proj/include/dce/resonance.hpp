#pragma once

// Slowly-varying-amplitude dynamics of the Bogoliubov coefficients under
// parametric resonance (mirror at twice the fundamental frequency).
//
// Only odd modes couple to the odd in-modes, so storage index i stands for
// mode k = 2i + 1 in both rows (out index) and columns (in index m).

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dce {

/// Odd mode number for storage index i.
constexpr int odd_mode(int i) noexcept { return 2 * i + 1; }

struct BogoliubovState {
    double tau = 0.0;
    int k_max = 0;              ///< number of retained odd modes K
    std::vector<int> columns;   ///< odd in-mode numbers m, one per column
    Eigen::MatrixXd alpha;      ///< K × columns
    Eigen::MatrixXd beta;       ///< K × columns

    // Per-column integrals carried along the flow. `absorbed_*` are the
    // amounts removed by the absorbing layer from ½Σ(α+β)², ½Σ(α−β)² and
    // Σ(α²−β²); adding them back gives the untruncated sums. `rate_sigma_*`
    // integrate dσ_q/dτ = −(α₁ₘ+β₁ₘ)² and dσ_p/dτ = (α₁ₘ−β₁ₘ)² from ½.
    Eigen::VectorXd absorbed_q;
    Eigen::VectorXd absorbed_p;
    Eigen::VectorXd absorbed_uv;
    Eigen::VectorXd rate_sigma_q;
    Eigen::VectorXd rate_sigma_p;

    /// α = identity, β = 0 on the requested columns (all K when empty).
    static BogoliubovState initial(int k_max, std::vector<int> columns = {});

    /// Column position of in-mode m; throws ConfigurationError if absent.
    [[nodiscard]] Eigen::Index column_of(int m) const;
    /// Σ_k(α_km² − β_km²) including the absorbed share.
    [[nodiscard]] double unitarity_sum(int m) const;
};

/// Diagonal damping −γ_k on the top `fraction` of retained modes,
/// γ_k = strength·k·x² with x rising linearly from 0 to 1 across the layer.
/// strength = 0 gives the hard cutoff where modes beyond k_max are dropped.
struct AbsorberOptions {
    double fraction = 0.5;
    double strength = 4.0;
};

[[nodiscard]] Eigen::VectorXd absorber_profile(int k_max, const AbsorberOptions& absorber);

struct SvaDerivative {
    Eigen::MatrixXd alpha;
    Eigen::MatrixXd beta;
};

/// dα₁ⱼ/dτ = −√3 α₃ⱼ − β₁ⱼ, dβ₁ⱼ/dτ = −α₁ⱼ − √3 β₃ⱼ and, for k > 2,
/// dα_kj/dτ = √(k(k−2)) α_(k−2)j − √(k(k+2)) α_(k+2)j (same for β), with
/// α_(k+2)j = 0 past the cutoff and the optional damping −γ_k applied.
[[nodiscard]] SvaDerivative sva_rhs(const BogoliubovState& state, const Eigen::VectorXd& damping = {});

struct SvaOptions {
    int k_max = 64;
    double tolerance = 1e-9;
    AbsorberOptions absorber;
    std::vector<int> columns;  ///< odd in-modes to integrate; empty = all
};

struct SvaTrajectory {
    SvaOptions options;
    std::vector<BogoliubovState> samples;
    long steps = 0;
};

/// Adaptive Dormand–Prince integration with dense output, sampled at the
/// sorted, non-negative `taus`. Throws ConfigurationError for bad options
/// and IntegrationError (with the τ reached) on step-size collapse.
[[nodiscard]] SvaTrajectory integrate_sva(const SvaOptions& options, std::span<const double> taus);

/// Convenience overload sampling only τ_end.
[[nodiscard]] BogoliubovState integrate_sva(int k_max, double tau_end, double tolerance);

struct AsymptoticReference {
    int mu = 0;
    double J = 1.0;  ///< (2μ)!/(2^μ (μ!)²)
    double K = 1.0;  ///< (−1)^μ √(2μ+1)/(μ+1)
};
[[nodiscard]] AsymptoticReference asymptotic_reference(int mu);

struct FirstRowPair {
    double alpha = 0.0;
    double beta = 0.0;
};

/// α₁ₘ = (μ+1)K_μJ_μτ^μ, β₁ₘ = −K_μJ_μτ^(μ+1) for m = 2μ+1, τ ≤ 0.1.
[[nodiscard]] FirstRowPair asymptotic_small_tau(int mu, double tau);

/// α₁ₘ → (2/π)(−1)^μ/√(2μ+1) and β₁ₘ → −α₁ₘ.
[[nodiscard]] FirstRowPair asymptotic_large_tau(int mu);

/// CSV with header "tau,column,row,alpha,beta", one line per entry.
void write_sva_csv(std::ostream& out, const SvaTrajectory& trajectory);

}  // namespace dce
