#include "dce/short_time.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "dce/entropy.hpp"
#include "dce/errors.hpp"
#include "dce/format.hpp"

namespace dce {

double beta_resonant_magnitude(int k, int j, int p, double tau, double epsilon) {
    if (k < 1 || j < 1 || p < 1) throw ConfigurationError("mode and harmonic indices must be >= 1");
    if (!(tau >= 0.0)) throw ConfigurationError("tau must be >= 0");
    const double kj = std::sqrt(static_cast<double>(k) * j);
    if (p == k + j) return kj * tau;
    if (!(epsilon > 0.0)) throw ConfigurationError("off-resonant |beta| needs epsilon > 0");
    const double s = k + j;
    const double envelope = 2.0 * kj * epsilon * p / std::abs(static_cast<double>(p) * p - s * s);
    return envelope * std::abs(std::sin(2.0 * s * tau / epsilon));
}

double particle_number(int p, double tau) {
    if (p < 1) throw ConfigurationError("harmonic index p must be >= 1");
    if (!(tau >= 0.0)) throw ConfigurationError("tau must be >= 0");
    if (tau > 0.3) warn("tau = " + format_number(tau) + " exceeds the short-time range (0.3)");
    const double pd = p;
    return pd * (pd * pd - 1.0) * tau * tau / 6.0;
}

double v_sum(int p) {
    if (p < 1) throw ConfigurationError("harmonic index p must be >= 1");
    double v = 0.0;
    for (int k = 1; k < p; ++k) {
        const double w = static_cast<double>(p - k) * k;
        v += w * std::log(w);
    }
    return v;
}

double diagonal_entropy_closed_form(int p, double tau) {
    const double n = particle_number(p, tau);
    if (n == 0.0) return 0.0;
    if (n >= 2.0)
        throw RegimeError("perturbative entropy needs N < 2 (p=" + std::to_string(p) +
                          ", tau=" + format_number(tau) + ", N=" + format_number(n) + ")");
    const double pd = p;
    const double c = pd * (pd * pd - 1.0);
    const double half_n = 0.5 * n;
    return half_n * (1.0 - std::log(half_n) + std::log(c / 6.0) - 6.0 * v_sum(p) / c);
}

EntropyReport diagonal_entropy_general(const Eigen::MatrixXd& beta_magnitudes, double tau, int p) {
    if (beta_magnitudes.rows() != beta_magnitudes.cols())
        throw ConfigurationError("beta magnitude table must be square");
    EntropyReport report;
    report.tau = tau;
    report.p = p;
    double n = 0.0;
    double pair_entropy = 0.0;
    for (Eigen::Index k = 0; k < beta_magnitudes.rows(); ++k) {
        for (Eigen::Index j = 0; j < beta_magnitudes.cols(); ++j) {
            const double b = beta_magnitudes(k, j);
            if (!(b >= 0.0)) throw ConfigurationError("|beta| entries must be non-negative");
            if (b == 0.0) continue;
            const double w = b * b;
            n += w;
            pair_entropy += entropy_term(0.5 * w);
            report.per_pair_terms.push_back({static_cast<int>(k + 1), static_cast<int>(j + 1), w});
        }
    }
    if (0.5 * n >= 1.0)
        throw RegimeError("perturbative entropy needs N/2 < 1 (N=" + format_number(n) + ")");
    report.particle_number = n;
    report.diagonal_entropy = entropy_term(1.0 - 0.5 * n) + pair_entropy;
    return report;
}

Eigen::MatrixXd resonant_beta_magnitudes(int p, double tau, int k_max, bool include_off_resonant,
                                         double epsilon) {
    if (k_max < 1) throw ConfigurationError("k_max must be >= 1");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k_max, k_max);
    for (int k = 1; k <= k_max; ++k) {
        for (int j = 1; j <= k_max; ++j) {
            if (k + j == p || include_off_resonant)
                out(k - 1, j - 1) = beta_resonant_magnitude(k, j, p, tau, epsilon);
        }
    }
    return out;
}

PerturbativeBogoliubov perturbative_bogoliubov(const CouplingTables& tables,
                                               const InstantaneousSpectrum& spectrum, int modes) {
    if (modes < 1 || modes > tables.k_max())
        throw ConfigurationError("perturbative block must satisfy 1 <= modes <= k_max");
    const auto& trajectory = spectrum.trajectory();
    const double duration = trajectory.duration();

    PerturbativeBogoliubov out;
    out.tau = trajectory.tau();
    out.p = trajectory.harmonic();
    out.k_max = modes;
    out.alpha_tilde = Eigen::MatrixXcd::Zero(modes, modes);
    out.beta = Eigen::MatrixXcd::Zero(modes, modes);
    if (duration == 0.0) return out;

    using rule = boost::math::quadrature::gauss<double, 16>;
    const auto& nodes = rule::abscissa();
    const auto& weights = rule::weights();

    const double fastest = (2.0 * modes + trajectory.harmonic()) * trajectory.fundamental_frequency() *
                           (1.0 + trajectory.epsilon());
    const auto panels = static_cast<long>(std::ceil(duration * fastest / std::numbers::pi));
    const double h = duration / static_cast<double>(panels);

    for (long n = 0; n < panels; ++n) {
        const double mid = (static_cast<double>(n) + 0.5) * h;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double half_w = 0.5 * h * weights[i];
            for (double sign : {-1.0, 1.0}) {
                if (nodes[i] == 0.0 && sign > 0.0) continue;
                const auto c = coefficient_matrices(tables, spectrum, modes, mid + sign * 0.5 * h * nodes[i]);
                out.alpha_tilde += half_w * c.scattering;
                out.beta += half_w * c.pairing;
            }
        }
    }
    return out;
}

}  // namespace dce
