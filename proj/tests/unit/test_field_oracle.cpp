#include <cmath>
#include <memory>

#include <doctest.h>

#include "dce/errors.hpp"
#include "dce/field_oracle.hpp"
#include "dce/fock_oracle.hpp"
#include "dce/gaussian_mode.hpp"
#include "dce/short_time.hpp"

using namespace dce;

TEST_SUITE("field_oracle") {

TEST_CASE("static mirror gives the identity transformation") {
    const auto trajectory = MirrorTrajectory::over_fundamental_periods(0.0, 2, 2);
    const CouplingTables tables(6);
    const auto b = extract_bogoliubov(integrate_modes(trajectory, tables), trajectory);
    CHECK((b.alpha - Eigen::MatrixXcd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(b.beta.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("frozen mode makes the coupling vanish even with a moving mirror") {
    const auto trajectory = MirrorTrajectory::over_fundamental_periods(1e-3, 2, 2);
    FieldOracleOptions o;
    o.frozen = true;
    const auto b = extract_bogoliubov(integrate_modes(trajectory, CouplingTables(4), o), trajectory);
    CHECK(b.particle_number() < 1e-18);
}

TEST_CASE("unitarity within ten times the tolerance and N against the closed form") {
    const double eps = 1e-3;
    const CouplingTables tables(16);
    for (int periods : {3, 16}) {
        const auto trajectory = MirrorTrajectory::over_fundamental_periods(eps, 2, periods);
        FieldOracleOptions o;
        o.tolerance = 1e-10;
        const auto state = integrate_modes(trajectory, tables, o);
        const auto b = extract_bogoliubov(state, trajectory);
        CHECK((b.unitarity().array() - 1.0).abs().maxCoeff() <= 10 * o.tolerance);
        const double n = particle_number(2, trajectory.tau());
        CHECK(std::abs(b.particle_number() - n) <= 5 * eps * n);
        CHECK(std::abs(b.beta(0, 0)) == doctest::Approx(trajectory.tau()).epsilon(5 * eps));
    }
}

TEST_CASE("agrees with the Fock oracle on the same four modes") {
    const auto trajectory = MirrorTrajectory::over_fundamental_periods(1e-3, 2, 6);
    const CouplingTables tables(4);
    const InstantaneousSpectrum spectrum(trajectory);
    const auto fock = coherence_and_particles(
        evolve_vacuum(tables, spectrum, std::make_shared<const FockBasis>(4, 4)).rho);
    const auto field = extract_bogoliubov(integrate_modes(trajectory, tables), trajectory);
    CHECK(field.particle_number() == doctest::Approx(fock.particle_number).epsilon(1e-6));
}

TEST_CASE("mode-1 particle number agrees with the SVA pipeline") {
    const auto trajectory = MirrorTrajectory::over_fundamental_periods(1e-3, 2, 16);
    FieldOracleOptions o;
    o.columns = {1, 3};
    const auto field = extract_bogoliubov(integrate_modes(trajectory, CouplingTables(16), o), trajectory);
    // N_1 counts quanta in out-mode 1 from every in-mode: Σ_k |β_k1|².
    double n1 = 0.0;
    for (Eigen::Index k = 0; k < field.beta.rows(); ++k) n1 += std::norm(field.beta(k, 0));
    const std::vector<double> taus{trajectory.tau()};
    SvaOptions so;
    so.columns = {1};
    const auto cov = variances_from_bogoliubov(integrate_sva(so, taus).samples.front(), 1);
    CHECK(n1 == doctest::Approx(cov.particle_number()).epsilon(5e-3));
}

TEST_CASE("invalid requests") {
    const CouplingTables tables(4);
    const MirrorTrajectory open(1e-3, 2, 1.0);
    FieldOracleOptions o;
    CHECK_THROWS_AS((void)extract_bogoliubov(integrate_modes(open, tables, o), open), ConfigurationError);
    o.tolerance = 1e-6;
    CHECK_THROWS_AS((void)integrate_modes(open, tables, o), ConfigurationError);
    o.tolerance = 1e-10;
    o.columns = {5};
    CHECK_THROWS_AS((void)integrate_modes(open, tables, o), ConfigurationError);
}

}
