#pragma once

// Exact evolution of the effective Hamiltonian in a truncated multimode
// Fock basis. Serves as the reference for the short-time pipeline.

#include <iosfwd>
#include <map>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "dce/cavity_model.hpp"

namespace dce {

using Occupation = std::vector<int>;

/// Occupation vectors (n₁, …, n_M) with Σn ≤ n_max, ordered by total quanta
/// and then lexicographically (descending in mode 1). The vacuum is index 0.
class FockBasis {
public:
    /// `even_only` keeps the pair-creation parity sector Σn even.
    FockBasis(int mode_count, int max_total_quanta, bool even_only = true);

    [[nodiscard]] int mode_count() const noexcept { return mode_count_; }
    [[nodiscard]] int max_total_quanta() const noexcept { return max_total_quanta_; }
    [[nodiscard]] bool even_only() const noexcept { return even_only_; }
    [[nodiscard]] Eigen::Index dimension() const noexcept { return static_cast<Eigen::Index>(states_.size()); }
    [[nodiscard]] const std::vector<Occupation>& states() const noexcept { return states_; }
    [[nodiscard]] const Occupation& state(Eigen::Index i) const { return states_.at(static_cast<std::size_t>(i)); }
    /// Index of `n`, or −1 when it lies outside the basis.
    [[nodiscard]] Eigen::Index index_of(const Occupation& n) const;

private:
    int mode_count_;
    int max_total_quanta_;
    bool even_only_;
    std::vector<Occupation> states_;
    std::map<Occupation, Eigen::Index> index_map_;
};

/// Matrix of (i/2)Σ_kj [A_kj b_j†b_k + B*_kj b_j†b_k† − h.c.] restricted to the
/// basis. Modes 1..M of the basis map to cavity modes 1..M.
class EffectiveHamiltonian {
public:
    EffectiveHamiltonian(const CouplingTables& tables, const InstantaneousSpectrum& spectrum,
                         std::shared_ptr<const FockBasis> basis);

    /// Dense matrix at time t.
    [[nodiscard]] Eigen::MatrixXcd at(double t) const;
    /// H(t)ψ without forming the matrix.
    [[nodiscard]] Eigen::VectorXcd apply(double t, const Eigen::VectorXcd& psi) const;
    /// exp(−iH(t)dt)ψ by Taylor series summed until the terms drop below
    /// round-off. Requires ‖H‖·dt ≲ 1 for fast convergence.
    [[nodiscard]] Eigen::VectorXcd propagate(double t, double dt, const Eigen::VectorXcd& psi) const;
    [[nodiscard]] const FockBasis& basis() const noexcept { return *basis_; }

private:
    struct Entry {
        Eigen::Index row;
        Eigen::Index col;
        double amplitude;
    };
    // Weights w_kj of the operators O_kj in X = Σ w_kj O_kj; H = X + X†.
    [[nodiscard]] std::vector<std::complex<double>> weights(double t) const;
    [[nodiscard]] Eigen::VectorXcd apply_weights(const std::vector<std::complex<double>>& w,
                                                 const Eigen::VectorXcd& psi) const;

    const CouplingTables& tables_;
    const InstantaneousSpectrum& spectrum_;
    std::shared_ptr<const FockBasis> basis_;
    // Slots [0, M²) hold P b_j†b_k P and [M², 2M²) hold P b_j†b_k† P,
    // each at index k·M + j, as sparse entry lists.
    std::vector<std::vector<Entry>> operators_;
};

[[nodiscard]] Eigen::MatrixXcd build_effective_hamiltonian(const CouplingTables& tables,
                                                           const InstantaneousSpectrum& spectrum,
                                                           const FockBasis& basis, double t);

struct FockDensityOperator {
    std::shared_ptr<const FockBasis> basis;
    Eigen::MatrixXcd matrix;

    [[nodiscard]] Eigen::VectorXd diagonal() const { return matrix.diagonal().real(); }
};

struct FockEvolutionOptions {
    /// Target for the step-doubling error estimate ‖ψ_2N − ψ_N‖/3 of the
    /// finer midpoint solution. The returned Richardson extrapolation is
    /// one order more accurate than this estimate.
    double tolerance = 1e-9;
    /// Initial step count; 0 picks it from the Hamiltonian norm and the
    /// fastest phase so that ‖H‖·dt ≤ 0.1.
    long initial_steps = 0;
    /// Upper bound on step doubling.
    long max_steps = 1L << 22;
};

struct FockEvolution {
    FockDensityOperator rho;
    Eigen::VectorXcd state;
    long steps = 0;
    double error_estimate = 0.0;
};

/// Propagates the vacuum over [0, T] with one exponential of the midpoint
/// Hamiltonian per step (see EffectiveHamiltonian::propagate) and
/// step-doubling Richardson control. Throws IntegrationError when the
/// error target is not met within max_steps.
[[nodiscard]] FockEvolution evolve_vacuum(const CouplingTables& tables, const InstantaneousSpectrum& spectrum,
                                          std::shared_ptr<const FockBasis> basis,
                                          const FockEvolutionOptions& options = {});

/// Shannon entropy of the diagonal of ρ in the Fock basis.
[[nodiscard]] double diagonal_entropy(const FockDensityOperator& rho);

struct CoherenceReport {
    double coherence = 0.0;       ///< C = S_d − S_vn
    double von_neumann = 0.0;     ///< S_vn
    double particle_number = 0.0; ///< Σ_k Tr ρ b_k†b_k
};

/// Throws NumericalError when ρ has eigenvalues below −1e-10.
[[nodiscard]] CoherenceReport coherence_and_particles(const FockDensityOperator& rho);

/// Second-order perturbative populations aligned with `basis`: vacuum
/// 1 − ½N, |1_k 1_j⟩ ¼|β_kj + β_jk|², |2_k⟩ ½|β_kk|², everything else 0.
/// `beta` must cover at least the basis modes.
[[nodiscard]] Eigen::VectorXd perturbative_diagonal(const FockBasis& basis, const Eigen::MatrixXcd& beta);

/// CSV rows "index,occupation,probability" with the occupation written as
/// space-separated counts.
void write_diagonal_csv(std::ostream& out, const FockDensityOperator& rho);

}  // namespace dce
