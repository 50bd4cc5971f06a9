#include <cmath>
#include <memory>
#include <sstream>

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "dce/errors.hpp"
#include "dce/fock_oracle.hpp"
#include "dce/short_time.hpp"

using namespace dce;

namespace {

std::shared_ptr<const FockBasis> make_basis(int m, int n, bool even = true) {
    return std::make_shared<const FockBasis>(m, n, even);
}

struct Setup {
    MirrorTrajectory trajectory;
    InstantaneousSpectrum spectrum;
    CouplingTables tables;

    Setup(double eps, int p, int periods, int k_max = 8)
        : trajectory(MirrorTrajectory::over_fundamental_periods(eps, p, periods)),
          spectrum(trajectory),
          tables(k_max) {}
};

}  // namespace

TEST_SUITE("fock_oracle") {

TEST_CASE("basis size, ordering and lookup") {
    const FockBasis even(4, 4);
    CHECK(even.dimension() == 1 + 10 + 35);
    CHECK(even.state(0) == Occupation{0, 0, 0, 0});
    CHECK(even.state(1) == Occupation{2, 0, 0, 0});
    CHECK(even.index_of({1, 1, 0, 0}) == 2);
    CHECK(even.index_of({1, 0, 0, 0}) == -1);
    CHECK(even.index_of({4, 2, 0, 0}) == -1);
    CHECK(FockBasis(4, 4, false).dimension() == 70);
    CHECK(FockBasis(3, 0).dimension() == 1);
    for (Eigen::Index i = 0; i < even.dimension(); ++i) CHECK(even.index_of(even.state(i)) == i);
}

TEST_CASE("effective Hamiltonian is Hermitian and matches its action") {
    const Setup s(1e-3, 2, 2);
    const auto basis = make_basis(4, 4);
    const EffectiveHamiltonian h(s.tables, s.spectrum, basis);
    for (double t : {0.0, 0.7, 5.1}) {
        const Eigen::MatrixXcd m = h.at(t);
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-18);
        CHECK((m - build_effective_hamiltonian(s.tables, s.spectrum, *basis, t)).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::VectorXcd psi = Eigen::VectorXcd::Random(basis->dimension());
        CHECK((h.apply(t, psi) - m * psi).cwiseAbs().maxCoeff() < 1e-17);
    }
    // Pair creation connects the vacuum to |2,0,0,0⟩ with amplitude (i/2)·B*_11·√2.
    const auto b11 = hamiltonian_coefficients(s.tables, s.spectrum, 1, 1, 0.3).pairing;
    const std::complex<double> expected = std::complex<double>(0, 0.5) * std::conj(b11) * std::sqrt(2.0);
    CHECK(std::abs(h.at(0.3)(1, 0) - expected) < 1e-16);
}

TEST_CASE("Taylor action matches the dense matrix exponential") {
    const Setup s(5e-3, 2, 2);
    const auto basis = make_basis(4, 4);
    const EffectiveHamiltonian h(s.tables, s.spectrum, basis);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Random(basis->dimension());
    psi.normalize();
    for (double dt : {0.01, 0.3, 2.0}) {
        const Eigen::MatrixXcd u = (std::complex<double>(0, -dt) * h.at(1.1)).exp();
        const Eigen::VectorXcd a = h.propagate(1.1, dt, psi);
        CHECK((a - u * psi).norm() < 1e-13);
        CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("static mirror leaves the vacuum untouched") {
    const MirrorTrajectory trajectory(0.0, 2, 20.0);
    const InstantaneousSpectrum spectrum(trajectory);
    const CouplingTables tables(4);
    const auto ev = evolve_vacuum(tables, spectrum, make_basis(3, 4));
    CHECK(std::abs(ev.state(0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(diagonal_entropy(ev.rho) == 0.0);
    const auto c = coherence_and_particles(ev.rho);
    CHECK(c.particle_number == 0.0);
    CHECK(std::abs(c.coherence) < 1e-12);
}

TEST_CASE("pure-state coherence equals diagonal entropy and N follows tau squared") {
    const Setup s(1e-3, 2, 6);
    const auto ev = evolve_vacuum(s.tables, s.spectrum, make_basis(4, 4));
    CHECK(ev.state.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev.rho.diagonal().sum() == doctest::Approx(1.0).epsilon(1e-12));
    const auto c = coherence_and_particles(ev.rho);
    const double sd = diagonal_entropy(ev.rho);
    CHECK(std::abs(c.coherence - sd) <= 1e-8);
    CHECK(std::abs(c.von_neumann) < 1e-10);
    const double tau = s.trajectory.tau();
    CHECK(c.particle_number == doctest::Approx(particle_number(2, tau)).epsilon(5e-3));
    CHECK(sd == doctest::Approx(diagonal_entropy_closed_form(2, tau)).epsilon(5 * particle_number(2, tau) + 0.1 * tau));
}

TEST_CASE("occupation truncation is converged at n_max = 4") {
    const Setup s(1e-3, 2, 16);
    const auto low = coherence_and_particles(evolve_vacuum(s.tables, s.spectrum, make_basis(4, 4)).rho);
    const auto high = coherence_and_particles(evolve_vacuum(s.tables, s.spectrum, make_basis(4, 6)).rho);
    CHECK(std::abs(high.particle_number - low.particle_number) <= 1e-5 * high.particle_number);
    CHECK(std::abs(high.coherence - low.coherence) <= 1e-5 * high.coherence);
}

TEST_CASE("perturbative diagonal is accurate to at least third order in epsilon") {
    // Fixed duration T: halving ε must cut the max-norm residual by ≥ 2^2.7.
    std::vector<double> residuals;
    for (double eps : {4e-3, 2e-3, 1e-3}) {
        const Setup s(eps, 2, 4);
        const auto basis = make_basis(4, 4);
        const auto ev = evolve_vacuum(s.tables, s.spectrum, basis);
        const auto pb = perturbative_bogoliubov(s.tables, s.spectrum, 4);
        residuals.push_back((ev.rho.diagonal() - perturbative_diagonal(*basis, pb.beta)).cwiseAbs().maxCoeff());
    }
    for (std::size_t i = 1; i < residuals.size(); ++i)
        CHECK(std::log2(residuals[i - 1] / residuals[i]) >= 2.7);
}

TEST_CASE("diagonal CSV lists every basis state") {
    const Setup s(1e-3, 2, 1);
    const auto ev = evolve_vacuum(s.tables, s.spectrum, make_basis(2, 2));
    std::ostringstream out;
    write_diagonal_csv(out, ev.rho);
    const std::string text = out.str();
    CHECK(text.rfind("index,occupation,probability\n0,0 0,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4);
}

TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(FockBasis(0, 4), ConfigurationError);
    CHECK_THROWS_AS(FockBasis(2, -1), ConfigurationError);
    const Setup s(1e-3, 2, 1, 2);
    CHECK_THROWS_AS(EffectiveHamiltonian(s.tables, s.spectrum, make_basis(3, 2)), ConfigurationError);
    FockDensityOperator bad{make_basis(1, 2), Eigen::MatrixXcd::Zero(2, 2)};
    bad.matrix(0, 0) = 1.5;
    bad.matrix(1, 1) = -0.5;
    CHECK_THROWS_AS((void)coherence_and_particles(bad), NumericalError);
}

}
