#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "dce/errors.hpp"
#include "dce/gaussian_mode.hpp"
#include "dce/resonance.hpp"

using namespace dce;
using std::numbers::pi;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Least-squares slope of log|y| against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::abs(y[i]));
        n += 1;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> geometric_grid(double a, double b, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(a * std::pow(b / a, i / (n - 1.0)));
    return out;
}

}  // namespace

TEST_SUITE("resonance") {

TEST_CASE("initial state and storage of odd modes only") {
    const auto s = BogoliubovState::initial(8, {1, 5});
    CHECK(s.alpha.rows() == 8);
    CHECK(s.alpha.cols() == 2);
    CHECK(s.alpha(0, 0) == 1.0);
    CHECK(s.alpha(2, 1) == 1.0);
    CHECK(s.alpha.sum() == 2.0);
    CHECK(s.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.column_of(5) == 1);
    CHECK(s.unitarity_sum(1) == 1.0);
    CHECK(odd_mode(0) == 1);
    CHECK(odd_mode(7) == 15);
    CHECK_THROWS_AS((void)s.column_of(3), ConfigurationError);
    CHECK_THROWS_AS(BogoliubovState::initial(8, {2}), ConfigurationError);
    CHECK_THROWS_AS(BogoliubovState::initial(8, {17}), ConfigurationError);
    CHECK_THROWS_AS(BogoliubovState::initial(1), ConfigurationError);
    CHECK(BogoliubovState::initial(4).columns == std::vector<int>{1, 3, 5, 7});
}

TEST_CASE("right-hand side at the vacuum") {
    const auto s = BogoliubovState::initial(4);
    const auto d = sva_rhs(s);
    CHECK(d.alpha(0, 0) == 0.0);
    CHECK(d.beta(0, 0) == -1.0);
    // Column 3: dα₁₃ = −√3 α₃₃, dα₅₃ = √(5·3) α₃₃, dβ₁₃ = −α₁₃ = 0.
    CHECK(d.alpha(0, 1) == doctest::Approx(-std::sqrt(3.0)));
    CHECK(d.alpha(2, 1) == doctest::Approx(std::sqrt(15.0)));
    CHECK(d.beta(0, 1) == 0.0);
    // Row 3 of column 5: −√(3·5) α₅₅.
    CHECK(d.alpha(1, 2) == doctest::Approx(-std::sqrt(15.0)));
    // The top mode has no partner above it.
    CHECK(d.alpha(2, 3) == doctest::Approx(-std::sqrt(35.0)));
    CHECK(d.alpha(3, 3) == 0.0);
}

TEST_CASE("absorber profile") {
    const auto g = absorber_profile(10, {0.5, 4.0});
    CHECK(g.head(5).cwiseAbs().maxCoeff() == 0.0);
    CHECK(g(9) == doctest::Approx(4.0 * 19));
    CHECK(g(5) == doctest::Approx(4.0 * 11 * 0.04));
    for (int i = 6; i < 10; ++i) CHECK(g(i) > g(i - 1));
    CHECK(absorber_profile(10, {0.5, 0.0}).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS((void)absorber_profile(10, {0.0, 1.0}), ConfigurationError);
}

TEST_CASE("asymptotic reference constants") {
    for (int mu = 0; mu <= 6; ++mu) {
        const auto r = asymptotic_reference(mu);
        const double j = factorial(2 * mu) / (std::pow(2.0, mu) * factorial(mu) * factorial(mu));
        CHECK(r.J == doctest::Approx(j).epsilon(1e-13));
        CHECK(r.K == doctest::Approx((mu % 2 ? -1 : 1) * std::sqrt(2.0 * mu + 1) / (mu + 1)).epsilon(1e-15));
    }
    CHECK(asymptotic_large_tau(0).alpha == doctest::Approx(2 / pi));
    CHECK(asymptotic_large_tau(1).alpha == doctest::Approx(-2 / (pi * std::sqrt(3.0))));
    CHECK(asymptotic_large_tau(2).beta == -asymptotic_large_tau(2).alpha);
    CHECK_THROWS_AS((void)asymptotic_small_tau(0, 0.2), RegimeError);
}

TEST_CASE("first-row coefficients follow the small-tau power laws") {
    const auto taus = geometric_grid(0.005, 0.05, 12);
    SvaOptions o;
    o.k_max = 32;
    o.tolerance = 1e-12;
    o.columns = {1, 3};
    const auto tr = integrate_sva(o, taus);
    for (int mu : {0, 1}) {
        std::vector<double> ra;
        std::vector<double> rb;
        for (const auto& s : tr.samples) {
            const auto c = s.column_of(2 * mu + 1);
            const auto ref = asymptotic_small_tau(mu, s.tau);
            ra.push_back(s.alpha(0, c) - ref.alpha);
            rb.push_back(s.beta(0, c) - ref.beta);
        }
        CHECK(loglog_slope(taus, ra) == doctest::Approx(mu + 2).epsilon(0.3 / (mu + 2)));
        CHECK(loglog_slope(taus, rb) == doctest::Approx(mu + 3).epsilon(0.3 / (mu + 3)));
    }
}

TEST_CASE("unitarity is conserved, including the absorbed share") {
    const std::vector<double> taus{0.5, 2.0, 6.0, 12.0};
    for (double strength : {0.0, 4.0}) {
        SvaOptions o;
        o.k_max = 48;
        o.absorber.strength = strength;
        o.columns = {1, 3, 5};
        const auto tr = integrate_sva(o, taus);
        for (const auto& s : tr.samples)
            for (int m : o.columns) CHECK(std::abs(s.unitarity_sum(m) - 1.0) < 1e-7);
    }
}

TEST_CASE("long-time limits are independent of the retained mode count") {
    const std::vector<double> taus{10.0};
    double reference = 0.0;
    for (int k : {64, 128}) {
        SvaOptions o;
        o.k_max = k;
        o.columns = {1};
        const auto s = integrate_sva(o, taus).samples.front();
        CHECK(s.alpha(0, 0) == doctest::Approx(2 / pi).epsilon(1e-4));
        CHECK(s.beta(0, 0) == doctest::Approx(-2 / pi).epsilon(1e-4));
        const double sq = variances_from_bogoliubov(s, 1).sigma_q;
        CHECK(sq == doctest::Approx(2 / (pi * pi)).epsilon(1e-4));
        if (reference != 0.0) CHECK(sq == doctest::Approx(reference).epsilon(1e-5));
        reference = sq;
    }
}

TEST_CASE("hard cutoff reflects the wavefront and spoils the limit") {
    SvaOptions o;
    o.k_max = 16;
    o.columns = {1};
    o.absorber.strength = 0.0;
    const std::vector<double> taus{10.0};
    const auto hard = integrate_sva(o, taus).samples.front();
    CHECK(std::abs(hard.alpha(0, 0) - 2 / pi) > 1e-2);
}

TEST_CASE("option validation and the convenience overload") {
    const std::vector<double> unsorted{1.0, 0.5};
    SvaOptions o;
    CHECK_THROWS_AS((void)integrate_sva(o, unsorted), ConfigurationError);
    o.tolerance = 1e-3;
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS((void)integrate_sva(o, one), ConfigurationError);
    const auto s = integrate_sva(16, 0.0, 1e-9);
    CHECK(s.alpha.isIdentity());
    CHECK(s.tau == 0.0);
}

TEST_CASE("trajectory CSV") {
    SvaOptions o;
    o.k_max = 2;
    o.columns = {1};
    const std::vector<double> taus{0.0, 0.1};
    std::ostringstream out;
    write_sva_csv(out, integrate_sva(o, taus));
    const std::string text = out.str();
    CHECK(text.rfind("tau,column,row,alpha,beta\n0,1,1,1,0\n0,1,3,0,0\n0.1,1,1,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

}
