#pragma once

// Cavity geometry, the harmonic mirror trajectory and the coupling
// coefficients shared by every pipeline.
//
// Conventions: natural units c = 1, mode indices are 1-based in every
// public signature (storage is 0-based), and by default L0 = π so that the
// fundamental frequency ω₁ = π/L0 = 1 and times are in units of 1/ω₁.

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace dce {

/// Mirror motion L(t) = L0 [1 + ε sin(p ω₁ t)] for 0 ≤ t ≤ T.
class MirrorTrajectory {
public:
    /// Validates ε ∈ [0, 0.1] (warns above 0.01; ε = 0 is the static mirror), p ≥ 1, T ≥ 0, L0 > 0.
    MirrorTrajectory(double epsilon, int harmonic, double duration,
                     double length0 = std::numbers::pi);

    /// Trajectory lasting exactly `cycles` full periods of the fundamental
    /// mode, T = 2π·cycles/ω₁. Every mode phase and the mirror return to
    /// their initial values at T.
    static MirrorTrajectory over_fundamental_periods(double epsilon, int harmonic, int cycles,
                                                     double length0 = std::numbers::pi);

    /// Trajectory whose dimensionless time εω₁T/2 equals `tau`.
    static MirrorTrajectory for_tau(double epsilon, int harmonic, double tau,
                                    double length0 = std::numbers::pi);

    [[nodiscard]] double epsilon() const noexcept { return epsilon_; }
    [[nodiscard]] int harmonic() const noexcept { return harmonic_; }
    [[nodiscard]] double duration() const noexcept { return duration_; }
    [[nodiscard]] double length0() const noexcept { return length0_; }

    /// ω₁ = π / L0.
    [[nodiscard]] double fundamental_frequency() const noexcept;
    /// τ = ε ω₁ T / 2.
    [[nodiscard]] double tau() const noexcept;

    /// l(t) = sin(p ω₁ t) and its first two derivatives.
    [[nodiscard]] double shape(double t) const noexcept;
    [[nodiscard]] double shape_rate(double t) const noexcept;

    [[nodiscard]] double length(double t) const noexcept;
    [[nodiscard]] double velocity(double t) const noexcept;
    /// λ(t) = L̇/L.
    [[nodiscard]] double lambda(double t) const noexcept;
    /// dλ/dt in closed form: −ε(pω₁)²(sin + ε)/(1 + ε sin)².
    [[nodiscard]] double lambda_rate(double t) const noexcept;

    /// True when p ω₁ T is a multiple of 2π (the mirror is back at L0).
    [[nodiscard]] bool completes_cycles(double tolerance = 1e-9) const noexcept;

private:
    double epsilon_;
    int harmonic_;
    double duration_;
    double length0_;
};

/// g_jk = (−1)^(j−k) 2kj / (j² − k²), zero on the diagonal. Any j, k ≥ 1.
[[nodiscard]] double coupling_g(int j, int k) noexcept;

/// Truncated g and h = Σ_l g_jl g_kl tables for modes 1..k_max.
class CouplingTables {
public:
    /// Requires k_max ≥ 1 and l_sum_max ≥ 4·k_max; throws ConfigurationError.
    CouplingTables(int k_max, int l_sum_max);
    /// Uses the default h cutoff l_sum_max = 10·k_max.
    explicit CouplingTables(int k_max);

    [[nodiscard]] int k_max() const noexcept { return k_max_; }
    [[nodiscard]] int l_sum_max() const noexcept { return l_sum_max_; }

    /// 1-based accessors; throw ConfigurationError outside 1..k_max.
    [[nodiscard]] double g(int j, int k) const;
    [[nodiscard]] double h(int j, int k) const;

    /// 0-based storage: g_matrix()(j-1, k-1) = g_jk.
    [[nodiscard]] const Eigen::MatrixXd& g_matrix() const noexcept { return g_; }
    [[nodiscard]] const Eigen::MatrixXd& h_matrix() const noexcept { return h_; }

    /// h restricted to l ≤ k_max, i.e. g·gᵀ. This is the closure under
    /// which the truncated mode equations stay Hamiltonian.
    [[nodiscard]] Eigen::MatrixXd h_within_cutoff() const;

private:
    int k_max_;
    int l_sum_max_;
    Eigen::MatrixXd g_;
    Eigen::MatrixXd h_;
};

/// Instantaneous frequencies ω_k(t) = kπ/L(t) and accumulated phases
/// Ω_k(t) = ∫₀ᵗ ω_k for a harmonic trajectory.
class InstantaneousSpectrum {
public:
    explicit InstantaneousSpectrum(MirrorTrajectory trajectory);

    [[nodiscard]] const MirrorTrajectory& trajectory() const noexcept { return trajectory_; }

    [[nodiscard]] double omega(int k, double t) const;
    /// Closed-form Ω_k(t); exact at ε = 0.
    [[nodiscard]] double phase(int k, double t) const;
    /// Ω_k(t) by adaptive Gauss–Kronrod quadrature (independent route).
    [[nodiscard]] double phase_by_quadrature(int k, double t, double tolerance = 1e-12) const;

    [[nodiscard]] double lambda(double t) const noexcept { return trajectory_.lambda(t); }
    [[nodiscard]] double lambda_rate(double t) const noexcept { return trajectory_.lambda_rate(t); }

    [[nodiscard]] double omega_in(int k) const;
    /// Out frequency for a mirror stopped at L(T).
    [[nodiscard]] double omega_out(int k) const;

private:
    /// ∫₀ᵗ dt' / (1 + ε sin(pω₁t')), the k-independent part of Ω_k / (kω₁).
    [[nodiscard]] double reduced_phase(double t) const noexcept;

    MirrorTrajectory trajectory_;
    double sqrt_one_minus_eps2_;
    double phase_offset_;
};

/// μ_kj(t) = −(√(j/k) g_jk + ½δ_jk) λ(t). 1-based k, j ≤ k_max.
[[nodiscard]] double mu_coefficient(const CouplingTables& tables, const InstantaneousSpectrum& spectrum,
                                    int k, int j, double t);

struct HamiltonianCoefficients {
    std::complex<double> scattering;  ///< A_kj
    std::complex<double> pairing;     ///< B_kj
};

/// A_kj, B_kj = ½[μ_kj ∓ μ_jk] e^{−i[Ω_k ∓ Ω_j]}.
[[nodiscard]] HamiltonianCoefficients hamiltonian_coefficients(const CouplingTables& tables,
                                                               const InstantaneousSpectrum& spectrum,
                                                               int k, int j, double t);

/// All A_kj and B_kj for k, j ≤ modes at once (0-based storage,
/// scattering(k-1, j-1) = A_kj). Phases are evaluated once per mode.
struct CoefficientMatrices {
    Eigen::MatrixXcd scattering;
    Eigen::MatrixXcd pairing;
};
[[nodiscard]] CoefficientMatrices coefficient_matrices(const CouplingTables& tables,
                                                       const InstantaneousSpectrum& spectrum,
                                                       int modes, double t);

}  // namespace dce
