#pragma once

// Direct integration of the instantaneous-basis mode amplitudes Q_j^(k)(t)
// and extraction of the Bogoliubov coefficients once the mirror stops.

#include <vector>

#include <Eigen/Dense>

#include "dce/cavity_model.hpp"

namespace dce {

/// Which λ² coupling matrix enters the mode equations.
enum class HClosure {
    /// h = g·gᵀ over the retained modes. The truncated system is then the
    /// exact restriction of the field Hamiltonian and stays symplectic.
    consistent,
    /// h summed to the table's l_sum_max. Breaks the symplectic structure
    /// at O(λ²) but tracks the untruncated coupling more closely.
    summed,
};

struct FieldOracleOptions {
    /// Target for the accumulated error. Each step is held to
    /// tolerance/(10·n) with n the number of fundamental periods, floored
    /// at 1e-14.
    double tolerance = 1e-10;
    HClosure closure = HClosure::consistent;
    /// In-modes k to integrate (1-based); empty = all retained modes.
    std::vector<int> columns;
    /// Debug mode: drop the coupling and freeze ω_j at ω_j^in.
    bool frozen = false;
};

/// Column c holds the solution started in mode columns[c]; row j is the
/// instantaneous mode j. P = Q̇ + λ g Q is the canonical momentum, which is
/// continuous when the mirror starts or stops abruptly.
struct ModeFunctionState {
    double t = 0.0;
    int k_max = 0;
    std::vector<int> columns;
    Eigen::MatrixXcd Q;
    Eigen::MatrixXcd Qdot;
    Eigen::MatrixXcd P;
    long steps = 0;
};

/// Integrates Q̈_m + ω_m²Q_m = 2λΣ_j g_jm Q̇_j + λ̇Σ_j g_jm Q_j + λ²Σ_j h_mj Q_j
/// over [0, T] with a controlled Runge–Kutta–Fehlberg 7(8) pair, step cap
/// 2π/(20 ω_kmax). Initial data Q_j^(k) = δ_jk and P_j^(k) = −iω_k δ_jk.
/// Throws IntegrationError with the time reached when the step collapses.
[[nodiscard]] ModeFunctionState integrate_modes(const MirrorTrajectory& trajectory, const CouplingTables& tables,
                                                const FieldOracleOptions& options = {});

/// α(c, j) = α_kj for k = columns[c]; likewise β.
struct FieldBogoliubov {
    std::vector<int> columns;
    Eigen::MatrixXcd alpha;
    Eigen::MatrixXcd beta;

    /// Σ_j(|α_kj|² − |β_kj|²) for every integrated in-mode k.
    [[nodiscard]] Eigen::VectorXd unitarity() const;
    /// Σ_kj |β_kj|² over the integrated in-modes.
    [[nodiscard]] double particle_number() const;
};

/// α_kj = √(ω_j/ω_k) e^{iω_jT}(ω_jQ_j + iP_j)/(2ω_j),
/// β_kj = √(ω_j/ω_k) e^{−iω_jT}(ω_jQ_j − iP_j)/(2ω_j) with ω_j = ω_j^out.
/// Requires the trajectory to end after whole mirror periods (mirror back
/// at L0); throws ConfigurationError otherwise.
[[nodiscard]] FieldBogoliubov extract_bogoliubov(const ModeFunctionState& state, const MirrorTrajectory& trajectory);

}  // namespace dce
