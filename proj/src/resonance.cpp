#include "dce/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "dce/errors.hpp"
#include "dce/format.hpp"

namespace dce {

// ---------------------------------------------------------------------------
// State

BogoliubovState BogoliubovState::initial(int k_max, std::vector<int> columns) {
    if (k_max < 2) throw ConfigurationError("SVA truncation needs at least 2 odd modes");
    if (columns.empty())
        for (int i = 0; i < k_max; ++i) columns.push_back(odd_mode(i));
    for (int m : columns)
        if (m < 1 || m % 2 == 0 || m > odd_mode(k_max - 1))
            throw ConfigurationError("SVA column " + std::to_string(m) + " is not a retained odd mode");

    BogoliubovState s;
    s.k_max = k_max;
    const auto c = static_cast<Eigen::Index>(columns.size());
    s.alpha = Eigen::MatrixXd::Zero(k_max, c);
    s.beta = Eigen::MatrixXd::Zero(k_max, c);
    for (Eigen::Index j = 0; j < c; ++j) s.alpha((columns[static_cast<std::size_t>(j)] - 1) / 2, j) = 1.0;
    s.columns = std::move(columns);
    s.absorbed_q = Eigen::VectorXd::Zero(c);
    s.absorbed_p = Eigen::VectorXd::Zero(c);
    s.absorbed_uv = Eigen::VectorXd::Zero(c);
    s.rate_sigma_q = Eigen::VectorXd::Constant(c, 0.5);
    s.rate_sigma_p = Eigen::VectorXd::Constant(c, 0.5);
    return s;
}

Eigen::Index BogoliubovState::column_of(int m) const {
    const auto it = std::find(columns.begin(), columns.end(), m);
    if (it == columns.end()) throw ConfigurationError("mode " + std::to_string(m) + " was not integrated");
    return it - columns.begin();
}

double BogoliubovState::unitarity_sum(int m) const {
    const Eigen::Index c = column_of(m);
    return (alpha.col(c).array().square() - beta.col(c).array().square()).sum() + absorbed_uv(c);
}

// ---------------------------------------------------------------------------
// Right-hand side

Eigen::VectorXd absorber_profile(int k_max, const AbsorberOptions& absorber) {
    if (!(absorber.fraction > 0.0 && absorber.fraction <= 1.0))
        throw ConfigurationError("absorber fraction must lie in (0, 1]");
    if (!(absorber.strength >= 0.0)) throw ConfigurationError("absorber strength must be >= 0");
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(k_max);
    if (absorber.strength == 0.0) return gamma;
    const int start = static_cast<int>(std::lround((1.0 - absorber.fraction) * k_max));
    const double width = k_max - start;
    for (int i = start; i < k_max; ++i) {
        const double x = (i - start + 1) / width;
        gamma(i) = absorber.strength * odd_mode(i) * x * x;
    }
    return gamma;
}

namespace {

// Couplings c_i = √(k(k+2)) between storage rows i and i+1 (k = 2i+1).
Eigen::VectorXd ladder(int k_max) {
    Eigen::VectorXd c(k_max);
    for (int i = 0; i < k_max; ++i) {
        const double k = odd_mode(i);
        c(i) = std::sqrt(k * (k + 2.0));
    }
    return c;
}

// y' = L y for one column, where L_{i,i−1} = c_{i−1}, L_{i,i+1} = −c_i.
template <typename In, typename Out>
void apply_ladder(const Eigen::VectorXd& c, const In& y, Out&& dy) {
    const Eigen::Index n = y.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        double d = 0.0;
        if (i > 0) d += c(i - 1) * y(i - 1);
        if (i + 1 < n) d -= c(i) * y(i + 1);
        dy(i) = d;
    }
}

}  // namespace

SvaDerivative sva_rhs(const BogoliubovState& state, const Eigen::VectorXd& damping) {
    const int k = state.k_max;
    if (k < 2) throw ConfigurationError("SVA truncation needs at least 2 odd modes");
    if (damping.size() != 0 && damping.size() != k) throw ConfigurationError("damping profile size mismatch");
    const Eigen::VectorXd c = ladder(k);
    SvaDerivative d{Eigen::MatrixXd(k, state.alpha.cols()), Eigen::MatrixXd(k, state.beta.cols())};
    for (Eigen::Index j = 0; j < state.alpha.cols(); ++j) {
        apply_ladder(c, state.alpha.col(j), d.alpha.col(j));
        apply_ladder(c, state.beta.col(j), d.beta.col(j));
        d.alpha(0, j) -= state.beta(0, j);
        d.beta(0, j) -= state.alpha(0, j);
        if (damping.size() != 0) {
            d.alpha.col(j) -= damping.cwiseProduct(state.alpha.col(j));
            d.beta.col(j) -= damping.cwiseProduct(state.beta.col(j));
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Integration

namespace {

namespace odeint = boost::numeric::odeint;
using Flat = std::vector<double>;

// Per column the flat state holds u = α+β and v = α−β (K each) followed by
// the five accumulators. In these variables the system splits into
// u' = (L − E₁₁ − Γ)u and v' = (L + E₁₁ − Γ)v.
constexpr int kAccumulators = 5;

struct SvaSystem {
    int k;
    Eigen::VectorXd c;
    Eigen::VectorXd gamma;

    [[nodiscard]] Eigen::Index block() const { return 2 * k + kAccumulators; }

    void operator()(const Flat& x, Flat& dx, double /*tau*/) const {
        const auto columns = static_cast<Eigen::Index>(x.size()) / block();
        for (Eigen::Index col = 0; col < columns; ++col) {
            const double* base = x.data() + col * block();
            double* dbase = dx.data() + col * block();
            Eigen::Map<const Eigen::VectorXd> u(base, k), v(base + k, k);
            Eigen::Map<Eigen::VectorXd> du(dbase, k), dv(dbase + k, k);
            apply_ladder(c, u, du);
            apply_ladder(c, v, dv);
            du(0) -= u(0);
            dv(0) += v(0);
            du -= gamma.cwiseProduct(u);
            dv -= gamma.cwiseProduct(v);
            double* acc = dbase + 2 * k;
            acc[0] = gamma.dot(u.cwiseProduct(u));
            acc[1] = gamma.dot(v.cwiseProduct(v));
            acc[2] = 2.0 * gamma.dot(u.cwiseProduct(v));
            acc[3] = -u(0) * u(0);
            acc[4] = v(0) * v(0);
        }
    }
};

BogoliubovState unpack(const Flat& x, double tau, int k, const std::vector<int>& columns) {
    BogoliubovState s = BogoliubovState::initial(k, columns);
    s.tau = tau;
    const Eigen::Index block = 2 * k + kAccumulators;
    for (Eigen::Index col = 0; col < static_cast<Eigen::Index>(columns.size()); ++col) {
        const double* base = x.data() + col * block;
        Eigen::Map<const Eigen::VectorXd> u(base, k), v(base + k, k);
        s.alpha.col(col) = 0.5 * (u + v);
        s.beta.col(col) = 0.5 * (u - v);
        s.absorbed_q(col) = base[2 * k];
        s.absorbed_p(col) = base[2 * k + 1];
        s.absorbed_uv(col) = base[2 * k + 2];
        s.rate_sigma_q(col) = base[2 * k + 3];
        s.rate_sigma_p(col) = base[2 * k + 4];
    }
    return s;
}

}  // namespace

SvaTrajectory integrate_sva(const SvaOptions& options, std::span<const double> taus) {
    if (!(options.tolerance >= 1e-12 && options.tolerance <= 1e-6))
        throw ConfigurationError("SVA tolerance must lie in [1e-12, 1e-6]");
    if (taus.empty()) throw ConfigurationError("SVA needs at least one sample time");
    if (!(taus.front() >= 0.0) || !std::is_sorted(taus.begin(), taus.end()))
        throw ConfigurationError("SVA sample times must be sorted and non-negative");

    const BogoliubovState start = BogoliubovState::initial(options.k_max, options.columns);
    const int k = options.k_max;
    const SvaSystem system{k, ladder(k), absorber_profile(k, options.absorber)};

    Flat x(static_cast<std::size_t>(system.block()) * start.columns.size(), 0.0);
    for (std::size_t col = 0; col < start.columns.size(); ++col) {
        double* base = x.data() + col * static_cast<std::size_t>(system.block());
        const int row = (start.columns[col] - 1) / 2;
        base[row] = 1.0;
        base[k + row] = 1.0;
        base[2 * k + 3] = 0.5;
        base[2 * k + 4] = 0.5;
    }

    SvaTrajectory out;
    out.options = options;
    out.options.columns = start.columns;
    out.samples.reserve(taus.size());

    auto stepper = odeint::make_dense_output(options.tolerance, options.tolerance,
                                             odeint::runge_kutta_dopri5<Flat>());
    stepper.initialize(x, 0.0, 1e-3);
    Flat sample(x.size());
    std::size_t next = 0;
    for (; next < taus.size() && taus[next] == 0.0; ++next) out.samples.push_back(unpack(x, 0.0, k, start.columns));
    try {
        while (next < taus.size()) {
            const double t1 = stepper.do_step(std::cref(system)).second;
            ++out.steps;
            if (stepper.current_time_step() < 1e-12 * std::max(1.0, t1))
                throw IntegrationError("SVA step size collapsed at tau=" + format_number(t1), t1);
            while (next < taus.size() && taus[next] <= t1) {
                stepper.calc_state(taus[next], sample);
                out.samples.push_back(unpack(sample, taus[next], k, start.columns));
                ++next;
            }
        }
    } catch (const odeint::odeint_error& e) {
        throw IntegrationError(std::string("SVA integration stalled: ") + e.what(), stepper.current_time());
    }
    return out;
}

BogoliubovState integrate_sva(int k_max, double tau_end, double tolerance) {
    SvaOptions options;
    options.k_max = k_max;
    options.tolerance = tolerance;
    const double taus[] = {tau_end};
    return integrate_sva(options, taus).samples.back();
}

// ---------------------------------------------------------------------------
// Asymptotics

AsymptoticReference asymptotic_reference(int mu) {
    if (mu < 0) throw ConfigurationError("asymptotic index mu must be >= 0");
    AsymptoticReference r;
    r.mu = mu;
    r.J = std::exp(std::lgamma(2.0 * mu + 1.0) - mu * std::numbers::ln2 - 2.0 * std::lgamma(mu + 1.0));
    r.K = (mu % 2 ? -1.0 : 1.0) * std::sqrt(2.0 * mu + 1.0) / (mu + 1.0);
    return r;
}

FirstRowPair asymptotic_small_tau(int mu, double tau) {
    if (!(tau >= 0.0)) throw ConfigurationError("tau must be >= 0");
    if (tau > 0.1) throw RegimeError("small-tau asymptotics need tau <= 0.1");
    const auto r = asymptotic_reference(mu);
    return {(mu + 1.0) * r.K * r.J * std::pow(tau, mu), -r.K * r.J * std::pow(tau, mu + 1.0)};
}

FirstRowPair asymptotic_large_tau(int mu) {
    if (mu < 0) throw ConfigurationError("asymptotic index mu must be >= 0");
    const double a = (mu % 2 ? -1.0 : 1.0) * 2.0 / (std::numbers::pi * std::sqrt(2.0 * mu + 1.0));
    return {a, -a};
}

void write_sva_csv(std::ostream& out, const SvaTrajectory& trajectory) {
    out << "tau,column,row,alpha,beta\n";
    for (const auto& s : trajectory.samples) {
        for (Eigen::Index c = 0; c < s.alpha.cols(); ++c) {
            for (Eigen::Index i = 0; i < s.alpha.rows(); ++i) {
                out << format_number(s.tau) << ',' << s.columns[static_cast<std::size_t>(c)] << ','
                    << odd_mode(static_cast<int>(i)) << ',' << format_number(s.alpha(i, c)) << ','
                    << format_number(s.beta(i, c)) << '\n';
            }
        }
    }
}

}  // namespace dce
