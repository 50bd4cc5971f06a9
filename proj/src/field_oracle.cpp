#include "dce/field_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "dce/errors.hpp"
#include "dce/format.hpp"

namespace dce {

namespace {

namespace odeint = boost::numeric::odeint;
using Flat = std::vector<double>;

// Flat layout: Q (K × 2C, real parts then imaginary parts per column),
// followed by Q̇ with the same shape. Real and imaginary parts evolve
// independently because the equations have real coefficients.
struct ModeSystem {
    const MirrorTrajectory& trajectory;
    Eigen::MatrixXd gt;  // gᵀ
    Eigen::MatrixXd h;
    Eigen::VectorXd mode_numbers;
    int k;
    Eigen::Index cols;
    bool frozen;

    void operator()(const Flat& x, Flat& dx, double t) const {
        Eigen::Map<const Eigen::MatrixXd> q(x.data(), k, cols);
        Eigen::Map<const Eigen::MatrixXd> qd(x.data() + k * cols, k, cols);
        Eigen::Map<Eigen::MatrixXd> dq(dx.data(), k, cols);
        Eigen::Map<Eigen::MatrixXd> dqd(dx.data() + k * cols, k, cols);
        dq = qd;
        if (frozen) {
            const double w1 = trajectory.fundamental_frequency();
            dqd.noalias() = (mode_numbers.array().square() * (-w1 * w1)).matrix().asDiagonal() * q;
            return;
        }
        const double w1 = std::numbers::pi / trajectory.length(t);
        const double lam = trajectory.lambda(t);
        const double lam_rate = trajectory.lambda_rate(t);
        dqd.noalias() = 2.0 * lam * gt * qd;
        dqd.noalias() += lam_rate * gt * q;
        dqd.noalias() += lam * lam * h * q;
        dqd.noalias() += (mode_numbers.array().square() * (-w1 * w1)).matrix().asDiagonal() * q;
    }
};

}  // namespace

ModeFunctionState integrate_modes(const MirrorTrajectory& trajectory, const CouplingTables& tables,
                                  const FieldOracleOptions& options) {
    if (!(options.tolerance > 0.0 && options.tolerance <= 1e-8))
        throw ConfigurationError("field oracle tolerance must lie in (0, 1e-8]");
    const int k = tables.k_max();
    std::vector<int> columns = options.columns;
    if (columns.empty())
        for (int m = 1; m <= k; ++m) columns.push_back(m);
    for (int m : columns)
        if (m < 1 || m > k) throw ConfigurationError("field oracle column " + std::to_string(m) + " outside 1..k_max");

    const auto c = static_cast<Eigen::Index>(columns.size());
    Eigen::VectorXd modes(k);
    for (int j = 0; j < k; ++j) modes(j) = j + 1.0;
    const Eigen::MatrixXd& g = tables.g_matrix();
    const ModeSystem system{trajectory,
                            g.transpose(),
                            options.closure == HClosure::consistent ? tables.h_within_cutoff() : tables.h_matrix(),
                            modes,
                            k,
                            2 * c,
                            options.frozen};

    const double lam0 = options.frozen ? 0.0 : trajectory.lambda(0.0);
    Flat x(static_cast<std::size_t>(4 * k * c), 0.0);
    Eigen::Map<Eigen::MatrixXd> q(x.data(), k, 2 * c);
    Eigen::Map<Eigen::MatrixXd> qd(x.data() + 2 * k * c, k, 2 * c);
    for (Eigen::Index col = 0; col < c; ++col) {
        const int m = columns[static_cast<std::size_t>(col)];
        q(m - 1, col) = 1.0;
        qd.col(col) = -lam0 * g.col(m - 1);
        qd(m - 1, c + col) = -m * trajectory.fundamental_frequency();
    }

    const double duration = trajectory.duration();
    const double max_dt = 2.0 * std::numbers::pi / (k * trajectory.fundamental_frequency() * 20.0);
    const double periods = trajectory.fundamental_frequency() * duration / (2.0 * std::numbers::pi);
    const double step_tol = std::max(1e-14, options.tolerance / (10.0 * std::max(1.0, periods)));
    if (step_tol == 1e-14 && options.tolerance / (10.0 * std::max(1.0, periods)) < 1e-14)
        warn("field oracle per-step tolerance clamped at 1e-14; accumulated error may exceed the target");
    auto stepper = odeint::make_controlled(step_tol, step_tol, max_dt,
                                           odeint::runge_kutta_fehlberg78<Flat>());
    double t = 0.0;
    double dt = 0.1 * max_dt;
    long steps = 0;
    while (t < duration) {
        double trial = std::min(dt, duration - t);
        const bool last = trial == duration - t;
        const double before = t;
        const auto result = stepper.try_step(std::cref(system), x, t, trial);
        if (result == odeint::success) {
            ++steps;
            if (last) t = duration;  // guard against rounding just short of T
            dt = trial;
        } else {
            dt = trial;
            if (dt < 1e-12 * std::max(1.0, before))
                throw IntegrationError("field oracle step size collapsed at t=" + format_number(before) +
                                           "; reduce k_max or loosen the tolerance",
                                       before);
        }
    }

    ModeFunctionState out;
    out.t = duration;
    out.k_max = k;
    out.columns = std::move(columns);
    out.steps = steps;
    const std::complex<double> i(0.0, 1.0);
    out.Q = q.leftCols(c).cast<std::complex<double>>() + i * q.rightCols(c).cast<std::complex<double>>();
    out.Qdot = qd.leftCols(c).cast<std::complex<double>>() + i * qd.rightCols(c).cast<std::complex<double>>();
    const double lam_end = options.frozen ? 0.0 : trajectory.lambda(duration);
    out.P = out.Qdot + lam_end * g.cast<std::complex<double>>() * out.Q;
    return out;
}

Eigen::VectorXd FieldBogoliubov::unitarity() const {
    return (alpha.cwiseAbs2().rowwise().sum() - beta.cwiseAbs2().rowwise().sum()).eval();
}

double FieldBogoliubov::particle_number() const { return beta.cwiseAbs2().sum(); }

FieldBogoliubov extract_bogoliubov(const ModeFunctionState& state, const MirrorTrajectory& trajectory) {
    if (!trajectory.completes_cycles(1e-9))
        throw ConfigurationError("Bogoliubov extraction needs the mirror to end a whole period (back at L0)");
    if (std::abs(state.t - trajectory.duration()) > 1e-9 * std::max(1.0, trajectory.duration()))
        throw ConfigurationError("mode state was not integrated to the trajectory end");

    const InstantaneousSpectrum spectrum(trajectory);
    const auto c = static_cast<Eigen::Index>(state.columns.size());
    FieldBogoliubov out;
    out.columns = state.columns;
    out.alpha.resize(c, state.k_max);
    out.beta.resize(c, state.k_max);
    const std::complex<double> i(0.0, 1.0);
    for (Eigen::Index col = 0; col < c; ++col) {
        const double wk = spectrum.omega_in(state.columns[static_cast<std::size_t>(col)]);
        for (int j = 1; j <= state.k_max; ++j) {
            const double wj = spectrum.omega_out(j);
            const double scale = std::sqrt(wj / wk) / (2.0 * wj);
            const std::complex<double> q = state.Q(j - 1, col), p = state.P(j - 1, col);
            out.alpha(col, j - 1) = scale * std::polar(1.0, wj * state.t) * (wj * q + i * p);
            out.beta(col, j - 1) = scale * std::polar(1.0, -wj * state.t) * (wj * q - i * p);
        }
    }
    return out;
}

}  // namespace dce
