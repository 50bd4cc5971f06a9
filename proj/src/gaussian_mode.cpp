#include "dce/gaussian_mode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dce/entropy.hpp"
#include "dce/errors.hpp"
#include "dce/format.hpp"

namespace dce {

void ModeCovariance::validate(double slack) const {
    if (!(sigma_q > 0.0) || !(sigma_p > 0.0) || !std::isfinite(sigma_q) || !std::isfinite(sigma_p))
        throw NumericalError("mode " + std::to_string(m) + " variances must be positive and finite");
    if (determinant() < 0.25 - slack)
        throw NumericalError("mode " + std::to_string(m) + " covariance violates the uncertainty bound (det = " +
                             format_number(determinant()) + ")");
}

ModeCovariance variances_from_bogoliubov(const BogoliubovState& state, int m) {
    const Eigen::Index c = state.column_of(m);
    const Eigen::VectorXd u = state.alpha.col(c) + state.beta.col(c);
    const Eigen::VectorXd v = state.alpha.col(c) - state.beta.col(c);

    ModeCovariance cov;
    cov.m = m;
    cov.tau = state.tau;
    cov.sigma_q = 0.5 * u.squaredNorm() + state.absorbed_q(c);
    cov.sigma_p = 0.5 * v.squaredNorm() + state.absorbed_p(c);

    const Eigen::Index top = std::max<Eigen::Index>(1, u.size() / 10);
    const double tail_q = 0.5 * u.tail(top).squaredNorm();
    const double tail_p = 0.5 * v.tail(top).squaredNorm();
    if (tail_q > 0.01 * cov.sigma_q || tail_p > 0.01 * cov.sigma_p)
        warn("mode " + std::to_string(m) + " at tau=" + format_number(state.tau) +
             ": top retained modes carry more than 1% of the variance; raise k_max");
    return cov;
}

std::vector<ModeCovariance> variances_by_ode(const SvaTrajectory& trajectory, int m) {
    std::vector<ModeCovariance> out;
    out.reserve(trajectory.samples.size());
    for (const auto& s : trajectory.samples) {
        const Eigen::Index c = s.column_of(m);
        out.push_back({m, s.tau, s.rate_sigma_q(c), s.rate_sigma_p(c), 0.0});
    }
    return out;
}

ModePopulations populations(const ModeCovariance& cov, int n_cut) {
    if (n_cut < 0) throw ConfigurationError("population cutoff must be >= 0");
    cov.validate();
    const double sq = cov.sigma_q, sp = cov.sigma_p;
    const double u = (2.0 * sq - 1.0) * (2.0 * sp - 1.0);
    const double w = (2.0 * sq + 1.0) * (2.0 * sp + 1.0);
    const double b = 4.0 * sq * sp - 1.0;
    const double bw = b / w, uw = u / w;
    const double norm = 2.0 / std::sqrt(w);

    ModePopulations pop;
    pop.m = cov.m;
    pop.tau = cov.tau;
    pop.probs.resize(static_cast<std::size_t>(n_cut) + 1);
    double prev = 0.0, cur = 1.0;
    pop.probs[0] = norm;
    for (int n = 0; n < n_cut; ++n) {
        const double next = ((2.0 * n + 1.0) * bw * cur - n * uw * prev) / (n + 1.0);
        prev = cur;
        cur = next;
        pop.probs[static_cast<std::size_t>(n) + 1] = norm * cur;
    }

    // Roots of λ² − 2(b/w)λ + u/w are (b ± 2|σ_q − σ_p|)/w.
    pop.tail_ratio = (std::abs(b) + 2.0 * std::abs(sq - sp)) / w;
    double envelope = std::abs(pop.probs.back());
    if (n_cut > 0) envelope = std::max(envelope, std::abs(pop.probs[pop.probs.size() - 2]));
    pop.tail_bound = pop.tail_ratio < 1.0 ? envelope * pop.tail_ratio / (1.0 - pop.tail_ratio)
                                          : std::numeric_limits<double>::infinity();
    return pop;
}

ModePopulations populations_adaptive(const ModeCovariance& cov, const PopulationOptions& options) {
    for (int n_cut = 64;; n_cut *= 2) {
        if (n_cut > options.max_n_cut)
            throw NumericalError("populations for mode " + std::to_string(cov.m) + " did not converge by n_cut=" +
                                 std::to_string(options.max_n_cut));
        ModePopulations pop = populations(cov, n_cut);
        if (!(pop.tail_ratio < 1.0)) continue;
        const double geometric = pop.tail_ratio / (1.0 - pop.tail_ratio);
        int quiet = 0;
        for (int n = 1; n <= n_cut; ++n) {
            const auto un = static_cast<std::size_t>(n);
            quiet = std::abs(pop.probs[un]) < options.negligible ? quiet + 1 : 0;
            if (quiet < options.quiet_run) continue;
            const double envelope = std::max(std::abs(pop.probs[un]), std::abs(pop.probs[un - 1]));
            if (envelope * geometric < options.tail_target) {
                pop.probs.resize(un + 1);
                pop.tail_bound = envelope * geometric;
                return pop;
            }
        }
    }
}

ModeEntropy mode_diagonal_entropy(const ModePopulations& pop) {
    ModeEntropy out;
    for (double p : pop.probs) out.value += entropy_term(p);

    const double r = pop.tail_ratio;
    double envelope = pop.probs.empty() ? 0.0 : std::abs(pop.probs.back());
    if (pop.probs.size() > 1) envelope = std::max(envelope, std::abs(pop.probs[pop.probs.size() - 2]));
    if (envelope == 0.0 || r == 0.0) {
        out.tail_bound = 0.0;
    } else if (r >= 1.0) {
        out.tail_bound = std::numeric_limits<double>::infinity();
    } else {
        // Σ_{k≥1} E r^k (−ln E − k ln r) for a geometric envelope E r^k.
        const double s1 = r / (1.0 - r);
        const double s2 = r / ((1.0 - r) * (1.0 - r));
        out.tail_bound = envelope * (s1 * std::max(0.0, -std::log(envelope)) - s2 * std::log(r));
    }
    if (out.tail_bound > 1e-6)
        throw NumericalError("mode " + std::to_string(pop.m) + " entropy tail bound " +
                             format_number(out.tail_bound) + " exceeds 1e-6; increase n_cut");
    return out;
}

double renyi2_entropy(const ModeCovariance& cov) {
    const double det = cov.determinant();
    if (det < 0.25 - 1e-12)
        throw NumericalError("Renyi-2 entropy needs det >= 1/4 (det = " + format_number(det) + ")");
    return 0.5 * std::log(det);
}

AsymptoticCoefficients asymptotic_coefficients(const ModeCovariance& cov, int n_cut) {
    if (n_cut < 0) throw ConfigurationError("coefficient cutoff must be >= 0");
    if (!(cov.sigma_q > 0.0)) throw NumericalError("asymptotic coefficients need sigma_q > 0");
    const double t = 1.0 / (2.0 * cov.sigma_q);
    const double a = 1.0 / (1.0 + t);
    const double c = (1.0 - t) / (1.0 + t);
    const double scale = 1.0 / std::sqrt(1.0 + t);

    AsymptoticCoefficients out;
    out.n_cut = n_cut;
    out.C.resize(static_cast<std::size_t>(n_cut) + 1);
    double prev = 0.0, cur = 1.0;
    out.C[0] = scale;
    for (int n = 0; n < n_cut; ++n) {
        const double next = ((2.0 * n + 1.0) * a * cur - n * c * prev) / (n + 1.0);
        prev = cur;
        cur = next;
        out.C[static_cast<std::size_t>(n) + 1] = scale * cur;
    }
    for (double x : out.C) out.script_S += entropy_term(x);
    return out;
}

double asymptotic_diagonal_entropy(const ModeCovariance& cov, int n_cut) {
    return renyi2_entropy(cov) + asymptotic_coefficients(cov, n_cut).script_S / std::sqrt(cov.determinant());
}

VariancePair short_time_variances(int m, double tau) {
    if (m < 1 || m % 2 == 0) throw ConfigurationError("short-time variance laws need an odd mode");
    if (!(tau >= 0.0)) throw ConfigurationError("tau must be >= 0");
    if (tau > 0.1) throw RegimeError("short-time variance laws need tau <= 0.1");
    const auto r = asymptotic_reference((m - 1) / 2);
    const double s = std::pow(tau, m) * r.J * r.J;
    const double k2 = r.K * r.K;
    return {0.5 - s * (1.0 - k2 * tau), 0.5 + s * (1.0 + k2 * tau)};
}

}  // namespace dce
