#include "dce/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "dce/entropy.hpp"
#include "dce/errors.hpp"
#include "dce/format.hpp"

namespace dce {

// ---------------------------------------------------------------------------
// Basis

namespace {

void enumerate_occupations(Occupation& current, int mode, int remaining, std::vector<Occupation>& out) {
    if (mode == static_cast<int>(current.size())) {
        out.push_back(current);
        return;
    }
    for (int n = 0; n <= remaining; ++n) {
        current[static_cast<std::size_t>(mode)] = n;
        enumerate_occupations(current, mode + 1, remaining - n, out);
    }
    current[static_cast<std::size_t>(mode)] = 0;
}

int total_quanta(const Occupation& n) { return std::accumulate(n.begin(), n.end(), 0); }

}  // namespace

FockBasis::FockBasis(int mode_count, int max_total_quanta, bool even_only)
    : mode_count_(mode_count), max_total_quanta_(max_total_quanta), even_only_(even_only) {
    if (mode_count < 1) throw ConfigurationError("Fock basis needs at least one mode");
    if (max_total_quanta < 0) throw ConfigurationError("Fock basis quanta cap must be >= 0");

    Occupation scratch(static_cast<std::size_t>(mode_count), 0);
    std::vector<Occupation> all;
    enumerate_occupations(scratch, 0, max_total_quanta, all);
    for (auto& n : all)
        if (!even_only || total_quanta(n) % 2 == 0) states_.push_back(std::move(n));

    std::sort(states_.begin(), states_.end(), [](const Occupation& a, const Occupation& b) {
        const int na = total_quanta(a), nb = total_quanta(b);
        if (na != nb) return na < nb;
        return a > b;
    });
    for (std::size_t i = 0; i < states_.size(); ++i)
        index_map_.emplace(states_[i], static_cast<Eigen::Index>(i));
}

Eigen::Index FockBasis::index_of(const Occupation& n) const {
    const auto it = index_map_.find(n);
    return it == index_map_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// Hamiltonian

EffectiveHamiltonian::EffectiveHamiltonian(const CouplingTables& tables, const InstantaneousSpectrum& spectrum,
                                           std::shared_ptr<const FockBasis> basis)
    : tables_(tables), spectrum_(spectrum), basis_(std::move(basis)) {
    if (!basis_) throw ConfigurationError("effective Hamiltonian needs a basis");
    const int m = basis_->mode_count();
    if (m > tables.k_max())
        throw ConfigurationError("Fock basis has " + std::to_string(m) + " modes but k_max is " +
                                 std::to_string(tables.k_max()));

    const auto pairs = static_cast<std::size_t>(m * m);
    operators_.assign(2 * pairs, {});
    for (Eigen::Index col = 0; col < basis_->dimension(); ++col) {
        const Occupation& source = basis_->state(col);
        for (int k = 0; k < m; ++k) {
            for (int j = 0; j < m; ++j) {
                const auto slot = static_cast<std::size_t>(k * m + j);
                const auto uk = static_cast<std::size_t>(k), uj = static_cast<std::size_t>(j);
                if (source[uk] > 0) {
                    Occupation target = source;
                    double amp = std::sqrt(static_cast<double>(target[uk]));
                    --target[uk];
                    ++target[uj];
                    amp *= std::sqrt(static_cast<double>(target[uj]));
                    if (const auto row = basis_->index_of(target); row >= 0)
                        operators_[slot].push_back({row, col, amp});
                }
                Occupation target = source;
                ++target[uk];
                double amp = std::sqrt(static_cast<double>(target[uk]));
                ++target[uj];
                amp *= std::sqrt(static_cast<double>(target[uj]));
                if (const auto row = basis_->index_of(target); row >= 0)
                    operators_[pairs + slot].push_back({row, col, amp});
            }
        }
    }
}

std::vector<std::complex<double>> EffectiveHamiltonian::weights(double t) const {
    const int m = basis_->mode_count();
    const auto c = coefficient_matrices(tables_, spectrum_, m, t);
    const std::complex<double> half_i(0.0, 0.5);
    const auto pairs = static_cast<std::size_t>(m * m);
    std::vector<std::complex<double>> w(2 * pairs);
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) {
            const auto slot = static_cast<std::size_t>(k * m + j);
            w[slot] = half_i * c.scattering(k, j);
            w[pairs + slot] = half_i * std::conj(c.pairing(k, j));
        }
    }
    return w;
}

Eigen::VectorXcd EffectiveHamiltonian::apply_weights(const std::vector<std::complex<double>>& w,
                                                     const Eigen::VectorXcd& psi) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
    for (std::size_t s = 0; s < operators_.size(); ++s) {
        if (w[s] == 0.0) continue;
        const std::complex<double> wc = std::conj(w[s]);
        for (const Entry& e : operators_[s]) {
            out(e.row) += w[s] * e.amplitude * psi(e.col);
            out(e.col) += wc * e.amplitude * psi(e.row);
        }
    }
    return out;
}

Eigen::MatrixXcd EffectiveHamiltonian::at(double t) const {
    const auto w = weights(t);
    const Eigen::Index dim = basis_->dimension();
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t s = 0; s < operators_.size(); ++s)
        for (const Entry& e : operators_[s]) x(e.row, e.col) += w[s] * e.amplitude;
    return x + x.adjoint();
}

Eigen::VectorXcd EffectiveHamiltonian::apply(double t, const Eigen::VectorXcd& psi) const {
    return apply_weights(weights(t), psi);
}

Eigen::VectorXcd EffectiveHamiltonian::propagate(double t, double dt, const Eigen::VectorXcd& psi) const {
    const auto w = weights(t);
    const std::complex<double> minus_i_dt(0.0, -dt);
    Eigen::VectorXcd term = psi;
    Eigen::VectorXcd out = psi;
    const double floor = 1e-17 * psi.norm();
    for (int n = 1; n <= 60; ++n) {
        term = (minus_i_dt / static_cast<double>(n)) * apply_weights(w, term);
        out += term;
        if (term.norm() <= floor) return out;
    }
    throw NumericalError("Taylor propagator did not converge; step too large for the Hamiltonian norm");
}

Eigen::MatrixXcd build_effective_hamiltonian(const CouplingTables& tables, const InstantaneousSpectrum& spectrum,
                                             const FockBasis& basis, double t) {
    const EffectiveHamiltonian h(tables, spectrum, std::make_shared<const FockBasis>(basis));
    return h.at(t);
}

// ---------------------------------------------------------------------------
// Evolution

namespace {

Eigen::VectorXcd propagate(const EffectiveHamiltonian& h, const Eigen::VectorXcd& psi0, double duration,
                           long steps) {
    const double dt = duration / static_cast<double>(steps);
    Eigen::VectorXcd psi = psi0;
    for (long n = 0; n < steps; ++n) psi = h.propagate((static_cast<double>(n) + 0.5) * dt, dt, psi);
    return psi;
}

}  // namespace

FockEvolution evolve_vacuum(const CouplingTables& tables, const InstantaneousSpectrum& spectrum,
                            std::shared_ptr<const FockBasis> basis, const FockEvolutionOptions& options) {
    if (!basis) throw ConfigurationError("evolve_vacuum needs a basis");
    if (!(options.tolerance > 0.0)) throw ConfigurationError("Fock evolution tolerance must be positive");
    const EffectiveHamiltonian h(tables, spectrum, basis);
    const auto& trajectory = spectrum.trajectory();
    const double duration = trajectory.duration();
    const Eigen::Index dim = basis->dimension();

    Eigen::VectorXcd vacuum = Eigen::VectorXcd::Zero(dim);
    vacuum(0) = 1.0;

    FockEvolution result;
    result.state = vacuum;
    if (duration > 0.0) {
        long& steps = result.steps;
        steps = options.initial_steps;
        if (steps <= 0) {
            // Frobenius norm bounds the operator norm; sample one mirror period.
            double h_norm = 0.0;
            const double period = 2.0 * std::numbers::pi /
                                  (trajectory.harmonic() * trajectory.fundamental_frequency());
            for (int s = 0; s < 16; ++s) h_norm = std::max(h_norm, h.at(period * s / 16.0).norm());
            const double fastest =
                (2.0 * basis->mode_count() + trajectory.harmonic()) * trajectory.fundamental_frequency();
            const double dt = std::min(0.1 / std::max(h_norm, 1e-300), 2.0 * std::numbers::pi / (fastest * 20.0));
            steps = std::max(1L, static_cast<long>(std::ceil(duration / dt)));
        }
        Eigen::VectorXcd coarse = propagate(h, vacuum, duration, steps);
        for (;;) {
            if (2 * steps > options.max_steps)
                throw IntegrationError("Fock propagation did not reach tolerance " +
                                           format_number(options.tolerance) + " within " +
                                           std::to_string(options.max_steps) + " steps",
                                       duration);
            Eigen::VectorXcd fine = propagate(h, vacuum, duration, 2 * steps);
            steps *= 2;
            const double err = (fine - coarse).norm() / 3.0;
            if (err <= options.tolerance) {
                Eigen::VectorXcd extrapolated = (4.0 * fine - coarse) / 3.0;
                extrapolated.normalize();
                result.state = extrapolated;
                result.error_estimate = err;
                break;
            }
            coarse = std::move(fine);
        }
    }
    result.rho = {basis, result.state * result.state.adjoint()};
    return result;
}

double diagonal_entropy(const FockDensityOperator& rho) {
    const Eigen::VectorXd d = rho.diagonal();
    return shannon_entropy(std::span<const double>(d.data(), static_cast<std::size_t>(d.size())));
}

CoherenceReport coherence_and_particles(const FockDensityOperator& rho) {
    if (!rho.basis) throw ConfigurationError("density operator has no basis");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.matrix, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("density-operator eigen-solve failed");
    const Eigen::VectorXd& ev = solver.eigenvalues();
    if (ev.minCoeff() < -1e-10)
        throw NumericalError("density operator has eigenvalue " + format_number(ev.minCoeff()) + " < -1e-10");

    CoherenceReport report;
    for (Eigen::Index i = 0; i < ev.size(); ++i) report.von_neumann += entropy_term(ev(i));
    report.coherence = diagonal_entropy(rho) - report.von_neumann;
    const Eigen::VectorXd d = rho.diagonal();
    for (Eigen::Index i = 0; i < d.size(); ++i) report.particle_number += d(i) * total_quanta(rho.basis->state(i));
    return report;
}

Eigen::VectorXd perturbative_diagonal(const FockBasis& basis, const Eigen::MatrixXcd& beta) {
    const int m = basis.mode_count();
    if (beta.rows() < m || beta.cols() < m)
        throw ConfigurationError("beta table does not cover the Fock basis modes");
    const Eigen::MatrixXcd b = beta.topLeftCorner(m, m);

    Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.dimension());
    out(0) = 1.0 - 0.5 * b.squaredNorm();
    for (int k = 0; k < m; ++k) {
        for (int j = k; j < m; ++j) {
            Occupation n(static_cast<std::size_t>(m), 0);
            ++n[static_cast<std::size_t>(k)];
            ++n[static_cast<std::size_t>(j)];
            const Eigen::Index idx = basis.index_of(n);
            if (idx < 0) continue;
            out(idx) = (k == j) ? 0.5 * std::norm(b(k, k)) : 0.25 * std::norm(b(k, j) + b(j, k));
        }
    }
    return out;
}

void write_diagonal_csv(std::ostream& out, const FockDensityOperator& rho) {
    out << "index,occupation,probability\n";
    const Eigen::VectorXd d = rho.diagonal();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        out << i << ',';
        const Occupation& n = rho.basis->state(i);
        for (std::size_t k = 0; k < n.size(); ++k) out << (k ? " " : "") << n[k];
        out << ',' << format_number(d(i)) << '\n';
    }
}

}  // namespace dce
