#include "dce/cavity_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dce/errors.hpp"
#include "dce/format.hpp"

namespace dce {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) noexcept {
    return a - 2.0 * kPi * std::round(a / (2.0 * kPi));
}

}  // namespace

// ---------------------------------------------------------------------------
// MirrorTrajectory

MirrorTrajectory::MirrorTrajectory(double epsilon, int harmonic, double duration, double length0)
    : epsilon_(epsilon), harmonic_(harmonic), duration_(duration), length0_(length0) {
    if (!(epsilon >= 0.0) || epsilon > 0.1)
        throw ConfigurationError("mirror amplitude epsilon must lie in [0, 0.1], got " +
                                 format_number(epsilon));
    if (harmonic < 1)
        throw ConfigurationError("harmonic index p must be >= 1");
    if (!(duration >= 0.0) || !std::isfinite(duration))
        throw ConfigurationError("trajectory duration must be finite and >= 0");
    if (!(length0 > 0.0))
        throw ConfigurationError("initial cavity length must be positive");
    if (epsilon > 0.01)
        warn("epsilon = " + format_number(epsilon) + " is outside the small-amplitude regime (> 0.01)");
}

MirrorTrajectory MirrorTrajectory::over_fundamental_periods(double epsilon, int harmonic, int cycles,
                                                            double length0) {
    if (cycles < 0) throw ConfigurationError("cycle count must be >= 0");
    const double omega1 = kPi / length0;
    return {epsilon, harmonic, 2.0 * kPi * cycles / omega1, length0};
}

MirrorTrajectory MirrorTrajectory::for_tau(double epsilon, int harmonic, double tau, double length0) {
    if (!(epsilon > 0.0)) throw ConfigurationError("tau-parametrized trajectories need epsilon > 0");
    const double omega1 = kPi / length0;
    return {epsilon, harmonic, 2.0 * tau / (epsilon * omega1), length0};
}

double MirrorTrajectory::fundamental_frequency() const noexcept { return kPi / length0_; }

double MirrorTrajectory::tau() const noexcept {
    return 0.5 * epsilon_ * fundamental_frequency() * duration_;
}

double MirrorTrajectory::shape(double t) const noexcept {
    return std::sin(harmonic_ * fundamental_frequency() * t);
}

double MirrorTrajectory::shape_rate(double t) const noexcept {
    const double w = harmonic_ * fundamental_frequency();
    return w * std::cos(w * t);
}

double MirrorTrajectory::length(double t) const noexcept {
    return length0_ * (1.0 + epsilon_ * shape(t));
}

double MirrorTrajectory::velocity(double t) const noexcept {
    return length0_ * epsilon_ * shape_rate(t);
}

double MirrorTrajectory::lambda(double t) const noexcept {
    return epsilon_ * shape_rate(t) / (1.0 + epsilon_ * shape(t));
}

double MirrorTrajectory::lambda_rate(double t) const noexcept {
    const double w = harmonic_ * fundamental_frequency();
    const double s = std::sin(w * t);
    const double d = 1.0 + epsilon_ * s;
    return -epsilon_ * w * w * (s + epsilon_) / (d * d);
}

bool MirrorTrajectory::completes_cycles(double tolerance) const noexcept {
    const double cycles = harmonic_ * fundamental_frequency() * duration_ / (2.0 * kPi);
    return std::abs(cycles - std::round(cycles)) <= tolerance * std::max(1.0, cycles);
}

// ---------------------------------------------------------------------------
// Coupling tables

double coupling_g(int j, int k) noexcept {
    if (j == k) return 0.0;
    const double sign = ((j - k) % 2 == 0) ? 1.0 : -1.0;
    const double jd = j, kd = k;
    return sign * 2.0 * kd * jd / (jd * jd - kd * kd);
}

CouplingTables::CouplingTables(int k_max) : CouplingTables(k_max, 10 * k_max) {}

CouplingTables::CouplingTables(int k_max, int l_sum_max) : k_max_(k_max), l_sum_max_(l_sum_max) {
    if (k_max < 1) throw ConfigurationError("k_max must be >= 1");
    if (l_sum_max < 4 * k_max)
        throw ConfigurationError("l_sum_max must be >= 4*k_max (got " + std::to_string(l_sum_max) +
                                 " for k_max=" + std::to_string(k_max) + ")");

    // Full rectangular table g(j, l) for j ≤ k_max, l ≤ l_sum_max.
    Eigen::MatrixXd wide(k_max, l_sum_max);
    for (int j = 1; j <= k_max; ++j)
        for (int l = 1; l <= l_sum_max; ++l) wide(j - 1, l - 1) = coupling_g(j, l);

    g_ = wide.leftCols(k_max);
    // Sum the smallest terms first: the tail decays like 1/l².
    h_.resize(k_max, k_max);
    for (int j = 0; j < k_max; ++j) {
        for (int k = 0; k <= j; ++k) {
            double sum = 0.0;
            for (int l = l_sum_max - 1; l >= 0; --l) sum += wide(j, l) * wide(k, l);
            h_(j, k) = sum;
            h_(k, j) = sum;
        }
    }
}

double CouplingTables::g(int j, int k) const {
    if (j < 1 || k < 1 || j > k_max_ || k > k_max_)
        throw ConfigurationError("coupling index outside 1..k_max");
    return g_(j - 1, k - 1);
}

double CouplingTables::h(int j, int k) const {
    if (j < 1 || k < 1 || j > k_max_ || k > k_max_)
        throw ConfigurationError("coupling index outside 1..k_max");
    return h_(j - 1, k - 1);
}

Eigen::MatrixXd CouplingTables::h_within_cutoff() const { return g_ * g_.transpose(); }

// ---------------------------------------------------------------------------
// InstantaneousSpectrum

InstantaneousSpectrum::InstantaneousSpectrum(MirrorTrajectory trajectory)
    : trajectory_(trajectory),
      sqrt_one_minus_eps2_(std::sqrt(1.0 - trajectory.epsilon() * trajectory.epsilon())),
      phase_offset_(std::atan2(trajectory.epsilon(), sqrt_one_minus_eps2_)) {}

double InstantaneousSpectrum::omega(int k, double t) const {
    if (k < 1) throw ConfigurationError("mode index must be >= 1");
    return k * kPi / trajectory_.length(t);
}

double InstantaneousSpectrum::omega_in(int k) const {
    if (k < 1) throw ConfigurationError("mode index must be >= 1");
    return k * kPi / trajectory_.length0();
}

double InstantaneousSpectrum::omega_out(int k) const {
    if (k < 1) throw ConfigurationError("mode index must be >= 1");
    return k * kPi / trajectory_.length(trajectory_.duration());
}

// ∫₀ˣ dx'/(1 + ε sin x') = (2/s)[φ(x/2) − φ(0)] with s = √(1−ε²) and
// φ(u) the continuous branch of atan2(sin u + ε cos u, s cos u). φ(u) − u
// stays O(ε), so wrapping that difference recovers the continuous branch.
double InstantaneousSpectrum::reduced_phase(double t) const noexcept {
    const double eps = trajectory_.epsilon();
    const double w = trajectory_.harmonic() * trajectory_.fundamental_frequency();
    const double u = 0.5 * w * t;
    const double s = sqrt_one_minus_eps2_;
    const double phi = std::atan2(std::sin(u) + eps * std::cos(u), s * std::cos(u));
    const double angle = u + wrap_angle(phi - u) - phase_offset_;
    return 2.0 * angle / (s * w);
}

double InstantaneousSpectrum::phase(int k, double t) const {
    if (k < 1) throw ConfigurationError("mode index must be >= 1");
    return k * trajectory_.fundamental_frequency() * reduced_phase(t);
}

double InstantaneousSpectrum::phase_by_quadrature(int k, double t, double tolerance) const {
    if (k < 1) throw ConfigurationError("mode index must be >= 1");
    if (t <= 0.0) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    const auto integrand = [this, k](double s) { return omega(k, s); };
    // Half mirror periods keep each panel smooth and single-humped.
    const double w = trajectory_.harmonic() * trajectory_.fundamental_frequency();
    const double panel = kPi / w;
    double total = 0.0;
    for (double a = 0.0; a < t; a += panel) {
        const double b = std::min(a + panel, t);
        total += gauss_kronrod<double, 31>::integrate(integrand, a, b, 15, tolerance * 1e-2);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Hamiltonian coefficients

namespace {

void check_mode_pair(const CouplingTables& tables, int k, int j) {
    if (k < 1 || j < 1 || k > tables.k_max() || j > tables.k_max())
        throw ConfigurationError("mode indices must lie in 1..k_max");
}

// μ_kj/λ, i.e. −(√(j/k) g_jk + ½δ_jk).
double mu_over_lambda(const CouplingTables& tables, int k, int j) {
    const double diag = (j == k) ? 0.5 : 0.0;
    return -(std::sqrt(static_cast<double>(j) / k) * tables.g_matrix()(j - 1, k - 1) + diag);
}

}  // namespace

double mu_coefficient(const CouplingTables& tables, const InstantaneousSpectrum& spectrum, int k, int j,
                      double t) {
    check_mode_pair(tables, k, j);
    return mu_over_lambda(tables, k, j) * spectrum.lambda(t);
}

HamiltonianCoefficients hamiltonian_coefficients(const CouplingTables& tables,
                                                 const InstantaneousSpectrum& spectrum, int k, int j,
                                                 double t) {
    check_mode_pair(tables, k, j);
    const double lam = spectrum.lambda(t);
    const double mu_kj = mu_over_lambda(tables, k, j) * lam;
    const double mu_jk = mu_over_lambda(tables, j, k) * lam;
    const double phase_k = spectrum.phase(k, t);
    const double phase_j = spectrum.phase(j, t);
    return {
        0.5 * (mu_kj - mu_jk) * std::polar(1.0, -(phase_k - phase_j)),
        0.5 * (mu_kj + mu_jk) * std::polar(1.0, -(phase_k + phase_j)),
    };
}

CoefficientMatrices coefficient_matrices(const CouplingTables& tables, const InstantaneousSpectrum& spectrum,
                                         int modes, double t) {
    if (modes < 1 || modes > tables.k_max())
        throw ConfigurationError("coefficient block must cover 1..m with m <= k_max");
    const double lam = spectrum.lambda(t);
    Eigen::VectorXcd rotor(modes);
    for (int k = 1; k <= modes; ++k) rotor(k - 1) = std::polar(1.0, -spectrum.phase(k, t));

    CoefficientMatrices out{Eigen::MatrixXcd(modes, modes), Eigen::MatrixXcd(modes, modes)};
    for (int k = 1; k <= modes; ++k) {
        for (int j = 1; j <= modes; ++j) {
            const double mu_kj = mu_over_lambda(tables, k, j) * lam;
            const double mu_jk = mu_over_lambda(tables, j, k) * lam;
            out.scattering(k - 1, j - 1) = 0.5 * (mu_kj - mu_jk) * rotor(k - 1) * std::conj(rotor(j - 1));
            out.pairing(k - 1, j - 1) = 0.5 * (mu_kj + mu_jk) * rotor(k - 1) * rotor(j - 1);
        }
    }
    return out;
}

}  // namespace dce
