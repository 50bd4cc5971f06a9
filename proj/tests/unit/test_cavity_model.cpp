#include <cmath>
#include <numbers>

#include <doctest.h>

#include "dce/cavity_model.hpp"
#include "dce/errors.hpp"

using namespace dce;
using std::numbers::pi;

TEST_SUITE("cavity_model") {

TEST_CASE("trajectory validates its parameters") {
    CHECK_THROWS_AS(MirrorTrajectory(0.2, 2, 1.0), ConfigurationError);
    CHECK_THROWS_AS(MirrorTrajectory(-1e-3, 2, 1.0), ConfigurationError);
    CHECK_THROWS_AS(MirrorTrajectory(1e-3, 0, 1.0), ConfigurationError);
    CHECK_THROWS_AS(MirrorTrajectory(1e-3, 2, -1.0), ConfigurationError);
    CHECK_THROWS_AS(MirrorTrajectory(1e-3, 2, 1.0, 0.0), ConfigurationError);
    CHECK_THROWS_AS(MirrorTrajectory::for_tau(0.0, 2, 0.1), ConfigurationError);
    CHECK_NOTHROW(MirrorTrajectory(0.0, 2, 1.0));
}

TEST_CASE("default units put the fundamental frequency at one") {
    const MirrorTrajectory m(1e-3, 2, 10.0);
    CHECK(m.fundamental_frequency() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.tau() == doctest::Approx(0.5e-3 * 10.0).epsilon(1e-15));
    const auto f = MirrorTrajectory::for_tau(1e-3, 2, 0.02);
    CHECK(f.tau() == doctest::Approx(0.02).epsilon(1e-14));
    CHECK(f.duration() == doctest::Approx(40.0).epsilon(1e-14));
}

TEST_CASE("length, velocity and lambda follow the harmonic law") {
    const double eps = 5e-3;
    const int p = 3;
    const MirrorTrajectory m(eps, p, 20.0);
    CHECK(m.length(0.0) == doctest::Approx(pi));
    CHECK(m.lambda(0.0) == doctest::Approx(eps * p).epsilon(1e-14));
    for (double t : {0.3, 1.7, 4.2}) {
        CHECK(m.length(t) == doctest::Approx(pi * (1 + eps * std::sin(p * t))).epsilon(1e-15));
        CHECK(m.lambda(t) == doctest::Approx(m.velocity(t) / m.length(t)).epsilon(1e-14));
        const double h = 1e-5;
        const double fd = (m.lambda(t + h) - m.lambda(t - h)) / (2 * h);
        CHECK(m.lambda_rate(t) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("completes_cycles detects whole mirror periods") {
    CHECK(MirrorTrajectory::over_fundamental_periods(1e-3, 2, 3).completes_cycles());
    CHECK(MirrorTrajectory(1e-3, 2, pi).completes_cycles());
    CHECK_FALSE(MirrorTrajectory(1e-3, 2, 1.0).completes_cycles());
}

TEST_CASE("g is antisymmetric with the documented values") {
    CHECK(coupling_g(1, 2) == doctest::Approx(4.0 / 3.0));
    CHECK(coupling_g(2, 1) == doctest::Approx(-4.0 / 3.0));
    CHECK(coupling_g(3, 3) == 0.0);
    CHECK(coupling_g(1, 3) == doctest::Approx(6.0 / -8.0));
    for (int j = 1; j <= 40; ++j)
        for (int k = 1; k <= 40; ++k) CHECK(coupling_g(j, k) == -coupling_g(k, j));
}

TEST_CASE("h tables are symmetric and converge with the summation cutoff") {
    const CouplingTables t(8);
    CHECK(t.l_sum_max() == 80);
    CHECK_THROWS_AS(CouplingTables(8, 31), ConfigurationError);
    CHECK_THROWS_AS(CouplingTables(0), ConfigurationError);
    CHECK_THROWS_AS((void)t.g(0, 1), ConfigurationError);
    CHECK_THROWS_AS((void)t.h(1, 9), ConfigurationError);
    CHECK((t.h_matrix() - t.h_matrix().transpose()).cwiseAbs().maxCoeff() == 0.0);

    // Oracle: the partial sums in plain order with long double.
    for (int j : {1, 4, 8}) {
        for (int k : {1, 3, 8}) {
            long double s = 0;
            for (int l = 1; l <= 80; ++l) s += static_cast<long double>(coupling_g(j, l)) * coupling_g(k, l);
            CHECK(t.h(j, k) == doctest::Approx(static_cast<double>(s)).epsilon(1e-13));
        }
    }

    const double d1 = (CouplingTables(8, 160).h_matrix() - t.h_matrix()).cwiseAbs().maxCoeff();
    const double d2 = (CouplingTables(8, 320).h_matrix() - CouplingTables(8, 160).h_matrix()).cwiseAbs().maxCoeff();
    CHECK(d2 < d1);
    CHECK(d2 < 0.6 * d1);

    const Eigen::MatrixXd gg = t.g_matrix() * t.g_matrix().transpose();
    CHECK((t.h_within_cutoff() - gg).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("closed-form phase agrees with Gauss-Kronrod quadrature") {
    for (int p : {1, 2, 5}) {
        const InstantaneousSpectrum s(MirrorTrajectory(1e-2, p, 60.0));
        for (int k : {1, 3, 7})
            for (double t : {0.0, 0.4, 3.3, 17.9, 59.0})
                CHECK(std::abs(s.phase(k, t) - s.phase_by_quadrature(k, t)) <= 1e-10 * std::max(1.0, k * t));
    }
}

TEST_CASE("static mirror: free phases and no coupling") {
    const InstantaneousSpectrum s(MirrorTrajectory(0.0, 2, 10.0));
    const CouplingTables t(4);
    CHECK(s.phase(3, 2.5) == doctest::Approx(7.5).epsilon(1e-15));
    CHECK(s.omega(2, 1.0) == doctest::Approx(2.0));
    const auto c = coefficient_matrices(t, s, 4, 1.3);
    CHECK(c.scattering.cwiseAbs().maxCoeff() == 0.0);
    CHECK(c.pairing.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coefficient matrices match the pointwise coefficients") {
    const double eps = 1e-3;
    const InstantaneousSpectrum s(MirrorTrajectory(eps, 2, 30.0));
    const CouplingTables t(6);
    const double time = 7.7;
    const auto c = coefficient_matrices(t, s, 6, time);
    for (int k = 1; k <= 6; ++k) {
        CHECK(std::abs(c.scattering(k - 1, k - 1)) == 0.0);
        for (int j = 1; j <= 6; ++j) {
            const auto h = hamiltonian_coefficients(t, s, k, j, time);
            CHECK(std::abs(c.scattering(k - 1, j - 1) - h.scattering) < 1e-16);
            CHECK(std::abs(c.pairing(k - 1, j - 1) - h.pairing) < 1e-16);
        }
    }
    // B_kk = μ_kk e^{−2iΩ_k} with μ_kk = −½λ.
    CHECK(mu_coefficient(t, s, 2, 2, 0.0) == doctest::Approx(-0.5 * 2 * eps));
    const auto b11 = hamiltonian_coefficients(t, s, 1, 1, 0.0).pairing;
    CHECK(b11.real() == doctest::Approx(-eps).epsilon(1e-14));
    CHECK(std::abs(b11.imag()) < 1e-18);
}

TEST_CASE("out frequencies return to the in values after whole periods") {
    const InstantaneousSpectrum s(MirrorTrajectory::over_fundamental_periods(1e-3, 2, 5));
    for (int k = 1; k <= 5; ++k) CHECK(s.omega_out(k) == doctest::Approx(s.omega_in(k)).epsilon(1e-12));
}

}
