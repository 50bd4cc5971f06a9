#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "dce/errors.hpp"
#include "dce/short_time.hpp"

using namespace dce;

namespace {

// Shannon entropy of the explicit population list: vacuum 1 − ½N and one
// entry ½|β_kj|² per ordered pair.
double entropy_of_pairs(const std::vector<double>& beta_squared) {
    double n = 0.0;
    for (double b : beta_squared) n += b;
    double s = -(1 - 0.5 * n) * std::log(1 - 0.5 * n);
    for (double b : beta_squared)
        if (b > 0) s -= 0.5 * b * std::log(0.5 * b);
    return s;
}

}  // namespace

TEST_SUITE("short_time") {

TEST_CASE("particle number and v sums") {
    CHECK(particle_number(2, 0.1) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(particle_number(3, 0.05) == doctest::Approx(4 * 0.0025).epsilon(1e-14));
    CHECK(particle_number(1, 0.2) == 0.0);
    CHECK(v_sum(1) == 0.0);
    CHECK(v_sum(2) == 0.0);
    CHECK(v_sum(3) == doctest::Approx(4 * std::log(2.0)).epsilon(1e-14));
    CHECK(v_sum(4) == doctest::Approx(2 * 3 * std::log(3.0) + 4 * std::log(4.0)).epsilon(1e-14));
}

TEST_CASE("closed-form entropy at p = 2, tau = 0.1") {
    const double n = 0.01;
    const double oracle = 0.5 * n * (1 - std::log(0.5 * n));
    CHECK(diagonal_entropy_closed_form(2, 0.1) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(diagonal_entropy_closed_form(2, 0.1) == doctest::Approx(0.031492).epsilon(2e-5));
    CHECK(diagonal_entropy_closed_form(1, 0.1) == 0.0);
    CHECK(diagonal_entropy_closed_form(4, 0.0) == 0.0);
    CHECK_THROWS_AS((void)diagonal_entropy_closed_form(8, 0.3), RegimeError);
}

TEST_CASE("resonant magnitudes follow sqrt(kj) tau") {
    CHECK(beta_resonant_magnitude(1, 3, 4, 0.02, 1e-3) == doctest::Approx(std::sqrt(3.0) * 0.02));
    CHECK(beta_resonant_magnitude(2, 2, 4, 0.02, 1e-3) == doctest::Approx(2 * 0.02));
    CHECK_THROWS_AS((void)beta_resonant_magnitude(1, 1, 3, 0.02, 0.0), ConfigurationError);
    const double off = beta_resonant_magnitude(1, 2, 5, 0.02, 1e-3);
    CHECK(off == doctest::Approx(2 * std::sqrt(2.0) * 1e-3 * 5 / 16.0 * std::abs(std::sin(6 * 0.02 / 1e-3))));
    const auto table = resonant_beta_magnitudes(5, 0.03, 6);
    CHECK(table(0, 3) == doctest::Approx(2 * 0.03));
    CHECK(table(1, 2) == doctest::Approx(std::sqrt(6.0) * 0.03));
    CHECK(table(0, 1) == 0.0);
    CHECK(table.bottomRows(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("general entropy matches the explicit population oracle") {
    Eigen::MatrixXd b(3, 3);
    b << 0.01, 0.02, 0.0, 0.02, 0.0, 0.005, 0.0, 0.005, 0.03;
    std::vector<double> squares;
    for (Eigen::Index i = 0; i < b.size(); ++i) squares.push_back(b(i) * b(i));
    const auto r = diagonal_entropy_general(b, 0.1, 3);
    CHECK(r.diagonal_entropy == doctest::Approx(entropy_of_pairs(squares)).epsilon(1e-14));
    CHECK(r.particle_number == doctest::Approx(b.squaredNorm()).epsilon(1e-14));
    CHECK(r.per_pair_terms.size() == 6);
    CHECK(diagonal_entropy_general(Eigen::MatrixXd::Zero(4, 4)).diagonal_entropy == 0.0);
    CHECK_THROWS_AS((void)diagonal_entropy_general(-b), ConfigurationError);
    CHECK_THROWS_AS((void)diagonal_entropy_general(Eigen::MatrixXd::Zero(2, 3)), ConfigurationError);
    CHECK_THROWS_AS((void)diagonal_entropy_general(Eigen::MatrixXd::Constant(2, 2, 1.0)), RegimeError);
}

TEST_CASE("general entropy agrees with the closed form within 5N") {
    for (int p = 2; p <= 6; ++p) {
        for (int i = 1; i <= 20; ++i) {
            const double tau = 0.005 * i;
            const double closed = diagonal_entropy_closed_form(p, tau);
            const auto r = diagonal_entropy_general(resonant_beta_magnitudes(p, tau, p), tau, p);
            CHECK(r.particle_number == doctest::Approx(particle_number(p, tau)).epsilon(1e-13));
            CHECK(std::abs(r.diagonal_entropy - closed) <= 5 * r.particle_number * closed);
        }
    }
}

TEST_CASE("perturbative coefficients reproduce |beta_11| = tau at p = 2") {
    const double eps = 1e-3;
    const auto trajectory = MirrorTrajectory::over_fundamental_periods(eps, 2, 6);
    const InstantaneousSpectrum spectrum(trajectory);
    const CouplingTables tables(8);
    const auto pb = perturbative_bogoliubov(tables, spectrum, 4);
    CHECK(pb.tau == doctest::Approx(trajectory.tau()));
    CHECK(std::abs(pb.beta(0, 0)) == doctest::Approx(trajectory.tau()).epsilon(5 * eps));
    // Non-resonant pairs stay at O(ε).
    CHECK(std::abs(pb.beta(0, 1)) < 10 * eps);
    CHECK(std::abs(pb.beta(1, 2)) < 10 * eps);
}

}
