#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "dce/errors.hpp"
#include "dce/fock_oracle.hpp"
#include "dce/format.hpp"
#include "dce/gaussian_mode.hpp"
#include "dce/scenario.hpp"
#include "dce/short_time.hpp"

#ifndef DCE_VERSION
#define DCE_VERSION "0.0.0"
#endif

namespace dce {

using nlohmann::json;

std::string library_version() { return DCE_VERSION; }

int periods_for_tau(double epsilon, double tau) {
    if (!(epsilon > 0.0)) throw ConfigurationError("periods_for_tau: epsilon must be positive");
    return static_cast<int>(std::lround(tau / (epsilon * std::numbers::pi)));
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    // Lowest grid index wins so that failures are reproducible.
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string RunReport::csv() const {
    std::ostringstream out;
    out << "pipeline";
    for (const auto& c : columns) out << ',' << c;
    out << '\n';
    for (const auto& row : rows) {
        out << pipeline;
        for (double x : row) out << ',' << format_number(x);
        out << '\n';
    }
    return out.str();
}

json RunReport::to_json() const {
    json extras = json::array();
    for (const auto& [name, content] : extra_files) extras.push_back(name);
    return json{
        {"pipeline", pipeline},
        {"version", version},
        {"passed", passed},
        {"wall_time_seconds", wall_time_seconds},
        {"records", rows.size()},
        {"columns", columns},
        {"config", config},
        {"diagnostics", diagnostics},
        {"extra_files", extras},
    };
}

void write_report(const RunReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto write = [&](const std::filesystem::path& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw ConfigurationError("cannot write " + (dir / name).string());
        out << content;
    };
    write(report.pipeline + ".csv", report.csv());
    write("report.json", report.to_json().dump(2) + "\n");
    for (const auto& [name, content] : report.extra_files) write(name, content);
}

namespace {

using Clock = std::chrono::steady_clock;

RunReport start_report(const ScenarioConfig& config) {
    RunReport r;
    r.pipeline = to_string(config.pipeline);
    r.config = to_json(config);
    r.version = library_version();
    return r;
}

void finish_report(RunReport& r, Clock::time_point start) {
    r.wall_time_seconds = std::chrono::duration<double>(Clock::now() - start).count();
}

void require_pipeline(const ScenarioConfig& config, std::initializer_list<Pipeline> allowed, const char* runner) {
    if (std::find(allowed.begin(), allowed.end(), config.pipeline) == allowed.end())
        throw ConfigurationError(std::string(runner) + ": pipeline '" + to_string(config.pipeline) +
                                 "' is not accepted here");
}

double relative_deviation(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

CouplingTables field_tables(const ScenarioConfig& config) {
    const int k = config.cutoffs.k_max_field;
    return config.cutoffs.l_sum_max > 0 ? CouplingTables(k, config.cutoffs.l_sum_max) : CouplingTables(k);
}

PopulationOptions population_options(const ScenarioConfig& config) {
    PopulationOptions o;
    o.negligible = config.tolerances.population_negligible;
    o.tail_target = config.tolerances.population_tail;
    return o;
}

ModePopulations mode_populations(const ScenarioConfig& config, const ModeCovariance& cov) {
    if (config.cutoffs.n_cut > 0) return populations(cov, config.cutoffs.n_cut);
    return populations_adaptive(cov, population_options(config));
}

SvaOptions sva_options(const ScenarioConfig& config, std::vector<int> columns) {
    SvaOptions o;
    o.k_max = config.cutoffs.k_max_sva;
    o.tolerance = config.tolerances.sva;
    o.absorber = config.absorber;
    o.columns = std::move(columns);
    return o;
}

struct FockResult {
    double particle_number = 0.0;
    double diagonal_entropy = 0.0;
    double von_neumann = 0.0;
    double coherence = 0.0;
    long steps = 0;
    double error_estimate = 0.0;
    std::string diagonal_csv;
};

FockResult run_fock(const ScenarioConfig& config, const CouplingTables& tables, const MirrorTrajectory& trajectory) {
    const InstantaneousSpectrum spectrum(trajectory);
    auto basis = std::make_shared<const FockBasis>(config.cutoffs.fock_modes, config.cutoffs.fock_n_max);
    FockEvolutionOptions options;
    options.tolerance = config.tolerances.fock;
    const FockEvolution evolution = evolve_vacuum(tables, spectrum, basis, options);
    const CoherenceReport coherence = coherence_and_particles(evolution.rho);
    FockResult r;
    r.particle_number = coherence.particle_number;
    r.diagonal_entropy = diagonal_entropy(evolution.rho);
    r.von_neumann = coherence.von_neumann;
    r.coherence = coherence.coherence;
    r.steps = evolution.steps;
    r.error_estimate = evolution.error_estimate;
    std::ostringstream csv;
    write_diagonal_csv(csv, evolution.rho);
    r.diagonal_csv = csv.str();
    return r;
}

struct FieldResult {
    double particle_number = 0.0;
    double diagonal_entropy = 0.0;
    double unitarity_deviation = 0.0;
    long steps = 0;
    FieldBogoliubov bogoliubov;
};

FieldResult run_field(const ScenarioConfig& config, const CouplingTables& tables, const MirrorTrajectory& trajectory) {
    FieldOracleOptions options;
    options.tolerance = config.tolerances.field;
    options.closure = config.field_closure;
    const ModeFunctionState state = integrate_modes(trajectory, tables, options);
    FieldResult r;
    r.bogoliubov = extract_bogoliubov(state, trajectory);
    r.steps = state.steps;
    r.particle_number = r.bogoliubov.particle_number();
    r.unitarity_deviation = (r.bogoliubov.unitarity().array() - 1.0).abs().maxCoeff();
    r.diagonal_entropy = diagonal_entropy_general(r.bogoliubov.beta.cwiseAbs()).diagonal_entropy;
    return r;
}

struct SnappedTau {
    double requested;
    int periods;
    double effective;
};

SnappedTau snap(const ScenarioConfig& config, double tau) {
    const int n = periods_for_tau(config.epsilon, tau);
    return {tau, n, config.epsilon * std::numbers::pi * n};
}

}  // namespace

RunReport run_entropy_sweep(const ScenarioConfig& config) {
    require_pipeline(config, {Pipeline::short_time}, "run_entropy_sweep");
    validate(config);
    const auto start = Clock::now();
    RunReport report = start_report(config);
    report.columns = {"p", "tau", "N", "S_d"};

    const std::size_t np = config.harmonics.size();
    const std::size_t nt = config.tau_grid.size();
    std::vector<std::vector<double>> rows(np * nt);
    std::vector<double> general_deviation(np * nt, 0.0);
    parallel_for(rows.size(), config.threads, [&](std::size_t i) {
        const int p = config.harmonics[i / nt];
        const double tau = config.tau_grid[i % nt];
        double s = 0.0;
        try {
            s = diagonal_entropy_closed_form(p, tau);
        } catch (const RegimeError& e) {
            throw RegimeError("sweep-entropy: p = " + std::to_string(p) + ", tau = " + format_number(tau) + ": " +
                              e.what());
        }
        const double n = particle_number(p, tau);
        const auto general = diagonal_entropy_general(resonant_beta_magnitudes(p, tau, std::max(p, 1)), tau, p);
        general_deviation[i] = relative_deviation(general.diagonal_entropy, s);
        rows[i] = {static_cast<double>(p), tau, n, s};
    });
    report.rows = std::move(rows);

    // S_d must increase with p at every τ (Fig. 1 ordering).
    bool ordered = true;
    json violations = json::array();
    for (std::size_t t = 0; t < nt; ++t) {
        for (std::size_t a = 1; a < np; ++a) {
            const double lower = report.rows[(a - 1) * nt + t][3];
            const double upper = report.rows[a * nt + t][3];
            if (!(upper > lower)) {
                ordered = false;
                violations.push_back({{"tau", config.tau_grid[t]},
                                      {"p_low", config.harmonics[a - 1]},
                                      {"p_high", config.harmonics[a]}});
            }
        }
    }
    report.diagnostics = {
        {"p_ordering_holds", ordered},
        {"p_ordering_violations", violations},
        {"closed_vs_general_max_relative", *std::max_element(general_deviation.begin(), general_deviation.end())},
    };
    finish_report(report, start);
    return report;
}

RunReport run_crosscheck(const ScenarioConfig& config) {
    require_pipeline(config, {Pipeline::crosscheck}, "run_crosscheck");
    validate(config);
    const auto start = Clock::now();
    RunReport report = start_report(config);
    report.columns = {"tau_requested", "tau", "periods", "N_closed", "S_d_closed", "N_fock", "S_d_fock", "C_fock",
                      "N_field", "S_d_field", "N_gaussian", "S_d_gaussian", "max_dev_N", "max_dev_S_d",
                      "coherence_gap"};
    const int p = config.harmonics.front();
    const CouplingTables tables = field_tables(config);
    const auto& tol = config.crosscheck;

    struct Row {
        std::vector<double> values;
        double field_unitarity = 0.0;
        double fock_error = 0.0;
        double n_tolerance = 0.0;
        double s_tolerance = 0.0;
        bool passed = true;
    };
    std::vector<Row> rows(config.tau_grid.size());
    parallel_for(rows.size(), config.threads, [&](std::size_t i) {
        const SnappedTau t = snap(config, config.tau_grid[i]);
        Row& row = rows[i];
        if (t.periods == 0) {
            row.values = {t.requested, 0.0, 0.0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
            return;
        }
        const auto trajectory = MirrorTrajectory::over_fundamental_periods(config.epsilon, p, t.periods);
        const double n_closed = particle_number(p, t.effective);
        const double s_closed = diagonal_entropy_closed_form(p, t.effective);
        const FockResult fock = run_fock(config, tables, trajectory);
        const FieldResult field = run_field(config, tables, trajectory);

        const std::array taus{t.effective};
        const SvaTrajectory sva = integrate_sva(sva_options(config, {1}), taus);
        const ModeCovariance cov = variances_from_bogoliubov(sva.samples.front(), 1);
        const double n_gauss = cov.particle_number();
        const double s_gauss = mode_diagonal_entropy(mode_populations(config, cov)).value;

        const std::array ns{n_closed, fock.particle_number, field.particle_number, n_gauss};
        const std::array ss{s_closed, fock.diagonal_entropy, field.diagonal_entropy, s_gauss};
        double dev_n = 0.0;
        double dev_s = 0.0;
        for (std::size_t a = 0; a < ns.size(); ++a) {
            for (std::size_t b = a + 1; b < ns.size(); ++b) {
                dev_n = std::max(dev_n, relative_deviation(ns[a], ns[b]));
                dev_s = std::max(dev_s, relative_deviation(ss[a], ss[b]));
            }
        }
        const double gap = std::abs(fock.coherence - fock.diagonal_entropy);
        row.n_tolerance = tol.n_relative_eps_factor * config.epsilon;
        row.s_tolerance = tol.entropy_n_factor * n_closed + tol.entropy_tau_factor * t.effective;
        row.passed = dev_n <= row.n_tolerance && dev_s <= row.s_tolerance && gap <= tol.coherence_absolute;
        row.field_unitarity = field.unitarity_deviation;
        row.fock_error = fock.error_estimate;
        row.values = {t.requested, t.effective, static_cast<double>(t.periods), n_closed, s_closed,
                      fock.particle_number, fock.diagonal_entropy, fock.coherence, field.particle_number,
                      field.diagonal_entropy, n_gauss, s_gauss, dev_n, dev_s, gap};
    });

    json checks = json::array();
    for (const auto& row : rows) {
        report.rows.push_back(row.values);
        report.passed = report.passed && row.passed;
        checks.push_back({{"tau", row.values[1]},
                          {"passed", row.passed},
                          {"max_dev_N", row.values[12]},
                          {"tolerance_N", row.n_tolerance},
                          {"max_dev_S_d", row.values[13]},
                          {"tolerance_S_d", row.s_tolerance},
                          {"coherence_gap", row.values[14]},
                          {"tolerance_coherence", tol.coherence_absolute},
                          {"field_unitarity_deviation", row.field_unitarity},
                          {"fock_error_estimate", row.fock_error}});
    }
    report.diagnostics = {{"passed", report.passed}, {"checks", checks}};
    finish_report(report, start);
    return report;
}

namespace {

struct ResonanceSample {
    double tau;
    int m;
    double alpha;
    double beta;
    ModeCovariance cov;
    double entropy;
    double renyi;
    int n_cut;
    double normalization_error;
};

std::vector<ResonanceSample> resonance_samples(const ScenarioConfig& config, const SvaTrajectory& trajectory) {
    const std::size_t nm = config.modes.size();
    std::vector<ResonanceSample> out(trajectory.samples.size() * nm);
    parallel_for(out.size(), config.threads, [&](std::size_t i) {
        const BogoliubovState& state = trajectory.samples[i / nm];
        const int m = config.modes[i % nm];
        const Eigen::Index c = state.column_of(m);
        const ModeCovariance cov = variances_from_bogoliubov(state, m);
        cov.validate();
        const ModePopulations pop = mode_populations(config, cov);
        double total = 0.0;
        for (double rho : pop.probs) total += rho;
        out[i] = {state.tau,
                  m,
                  state.alpha(0, c),
                  state.beta(0, c),
                  cov,
                  mode_diagonal_entropy(pop).value,
                  renyi2_entropy(cov),
                  pop.n_cut(),
                  std::abs(total - 1.0)};
    });
    return out;
}

const ResonanceSample* nearest(const std::vector<ResonanceSample>& samples, int m, double tau) {
    const ResonanceSample* best = nullptr;
    for (const auto& s : samples)
        if (s.m == m && (!best || std::abs(s.tau - tau) < std::abs(best->tau - tau))) best = &s;
    return best;
}

// Least-squares slope of σ_p(τ) over the upper half of the grid.
double fitted_sigma_p_slope(const std::vector<ResonanceSample>& samples, int m, double tau_lo, double tau_hi) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : samples) {
        if (s.m != m || s.tau < tau_lo || s.tau > tau_hi) continue;
        n += 1;
        sx += s.tau;
        sy += s.cov.sigma_p;
        sxx += s.tau * s.tau;
        sxy += s.tau * s.cov.sigma_p;
    }
    const double den = n * sxx - sx * sx;
    return n >= 2 && den > 0.0 ? (n * sxy - sx * sy) / den : std::nan("");
}

json asymptote_residuals(const std::vector<ResonanceSample>& samples, double tau_end) {
    using std::numbers::pi;
    json out = json::object();
    const double tau_probe = std::min(10.0, tau_end);
    if (const auto* s = nearest(samples, 1, tau_probe)) {
        out["probe_tau"] = s->tau;
        out["alpha_11"] = {{"value", s->alpha}, {"limit", 2 / pi}, {"relative", s->alpha / (2 / pi) - 1}};
        out["sigma_q_1"] = {{"value", s->cov.sigma_q},
                            {"limit", 2 / (pi * pi)},
                            {"relative", s->cov.sigma_q / (2 / (pi * pi)) - 1}};
        const double slope = fitted_sigma_p_slope(samples, 1, tau_end / 2, tau_end);
        out["sigma_p_1_slope"] = {{"fit_range", {tau_end / 2, tau_end}},
                                  {"value", slope},
                                  {"limit", 16 / (pi * pi)},
                                  {"relative", slope / (16 / (pi * pi)) - 1}};
    }
    // S_R → ½ln(c·τ) predicts a growth of ½ln(τ₂/τ₁) between two samples.
    const std::pair<int, double> renyi_refs[] = {{1, 32 / std::pow(pi, 4)}, {3, 608 / (27 * std::pow(pi, 4))}};
    for (const auto& [m, c] : renyi_refs) {
        const auto* hi = nearest(samples, m, tau_end);
        const auto* lo = nearest(samples, m, tau_end / 2);
        if (!hi || !lo || !(hi->tau > lo->tau) || !(lo->tau > 0)) continue;
        const double growth = hi->renyi - lo->renyi;
        const double expected = 0.5 * std::log(hi->tau / lo->tau);
        out["renyi_growth_" + std::to_string(m)] = {
            {"tau_low", lo->tau},
            {"tau_high", hi->tau},
            {"value", growth},
            {"limit", expected},
            {"relative", growth / expected - 1},
            {"offset_at_tau_high", hi->renyi - 0.5 * std::log(c * hi->tau)}};
    }
    return out;
}

json convergence_study(const ScenarioConfig& config) {
    const double tau = std::min(10.0, config.tau_grid.back());
    const std::array taus{tau};
    const auto probe = [&](int k_max, double tolerance) {
        SvaOptions o = sva_options(config, {1});
        o.k_max = k_max;
        o.tolerance = tolerance;
        const BogoliubovState s = integrate_sva(o, taus).samples.front();
        const ModeCovariance cov = variances_from_bogoliubov(s, 1);
        return json{{"k_max", k_max},
                    {"tolerance", tolerance},
                    {"alpha_11", s.alpha(0, 0)},
                    {"sigma_q_1", cov.sigma_q},
                    {"sigma_p_1", cov.sigma_p},
                    {"S_R2_1", renyi2_entropy(cov)}};
    };
    const int k = config.cutoffs.k_max_sva;
    const double tol = config.tolerances.sva;
    std::vector<std::pair<int, double>> settings = {{k, tol}, {2 * k, tol}};
    if (tol / 10 >= 1e-12) settings.emplace_back(k, tol / 10);
    std::vector<json> results(settings.size());
    parallel_for(settings.size(), config.threads,
                 [&](std::size_t i) { results[i] = probe(settings[i].first, settings[i].second); });
    json out = {{"tau", tau}, {"runs", results}};
    double worst = 0.0;
    for (std::size_t i = 1; i < results.size(); ++i)
        for (const char* key : {"alpha_11", "sigma_q_1", "sigma_p_1"})
            worst = std::max(worst, relative_deviation(results[i][key].get<double>(), results[0][key].get<double>()));
    out["max_relative_change"] = worst;
    return out;
}

}  // namespace

RunReport run_resonance_study(const ScenarioConfig& config) {
    require_pipeline(config, {Pipeline::resonance, Pipeline::gaussian}, "run_resonance_study");
    validate(config);
    const auto start = Clock::now();
    RunReport report = start_report(config);
    report.columns = {"tau", "m", "alpha_1m", "beta_1m", "sigma_q", "sigma_p", "N_m", "S_d", "S_R2"};

    const SvaTrajectory trajectory = integrate_sva(sva_options(config, config.modes), config.tau_grid);
    const auto samples = resonance_samples(config, trajectory);
    for (const auto& s : samples)
        report.rows.push_back({s.tau, static_cast<double>(s.m), s.alpha, s.beta, s.cov.sigma_q, s.cov.sigma_p,
                               s.cov.particle_number(), s.entropy, s.renyi});
    report.diagnostics = {{"steps", trajectory.steps},
                          {"asymptotes", asymptote_residuals(samples, config.tau_grid.back())},
                          {"convergence", convergence_study(config)}};
    finish_report(report, start);
    return report;
}

RunReport run_gaussian_study(const ScenarioConfig& config) {
    require_pipeline(config, {Pipeline::gaussian, Pipeline::resonance}, "run_gaussian_study");
    validate(config);
    const auto start = Clock::now();
    RunReport report = start_report(config);
    report.columns = {"tau", "m", "sigma_q", "sigma_p", "N_m", "S_d", "S_R2", "n_cut"};

    const SvaTrajectory trajectory = integrate_sva(sva_options(config, config.modes), config.tau_grid);
    const auto samples = resonance_samples(config, trajectory);
    double normalization = 0.0;
    double min_excess = std::numeric_limits<double>::infinity();
    double unitarity = 0.0;
    double rate_vs_direct = 0.0;
    for (const auto& s : samples) {
        report.rows.push_back({s.tau, static_cast<double>(s.m), s.cov.sigma_q, s.cov.sigma_p, s.cov.particle_number(),
                               s.entropy, s.renyi, static_cast<double>(s.n_cut)});
        normalization = std::max(normalization, s.normalization_error);
        min_excess = std::min(min_excess, s.cov.determinant() - 0.25);
    }
    for (int m : config.modes) {
        const auto by_ode = variances_by_ode(trajectory, m);
        for (std::size_t i = 0; i < trajectory.samples.size(); ++i) {
            const auto direct = variances_from_bogoliubov(trajectory.samples[i], m);
            rate_vs_direct = std::max({rate_vs_direct, relative_deviation(by_ode[i].sigma_q, direct.sigma_q),
                                       relative_deviation(by_ode[i].sigma_p, direct.sigma_p)});
            unitarity = std::max(unitarity, std::abs(trajectory.samples[i].unitarity_sum(m) - 1.0));
        }
    }
    report.diagnostics = {{"steps", trajectory.steps},
                          {"max_normalization_error", normalization},
                          {"min_uncertainty_excess", min_excess},
                          {"max_unitarity_deviation", unitarity},
                          {"max_rate_vs_direct_relative", rate_vs_direct}};
    finish_report(report, start);
    return report;
}

RunReport run_field_oracle(const ScenarioConfig& config) {
    require_pipeline(config, {Pipeline::field_oracle}, "run_field_oracle");
    validate(config);
    const auto start = Clock::now();
    RunReport report = start_report(config);
    report.columns = {"tau_requested", "tau", "periods", "N", "S_d", "N_closed", "unitarity_deviation", "steps"};
    const int p = config.harmonics.front();
    const CouplingTables tables = field_tables(config);

    std::vector<std::vector<double>> rows(config.tau_grid.size());
    std::vector<std::string> coefficient_lines(rows.size());
    parallel_for(rows.size(), config.threads, [&](std::size_t i) {
        const SnappedTau t = snap(config, config.tau_grid[i]);
        if (t.periods == 0) {
            rows[i] = {t.requested, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
            return;
        }
        const auto trajectory = MirrorTrajectory::over_fundamental_periods(config.epsilon, p, t.periods);
        const FieldResult field = run_field(config, tables, trajectory);
        rows[i] = {t.requested, t.effective, static_cast<double>(t.periods), field.particle_number,
                   field.diagonal_entropy, particle_number(p, t.effective), field.unitarity_deviation,
                   static_cast<double>(field.steps)};
        std::ostringstream lines;
        const auto& b = field.bogoliubov;
        for (Eigen::Index c = 0; c < b.alpha.rows(); ++c)
            for (Eigen::Index j = 0; j < b.alpha.cols(); ++j)
                lines << format_number(t.effective) << ',' << b.columns[static_cast<std::size_t>(c)] << ','
                      << j + 1 << ',' << format_number(b.alpha(c, j).real()) << ','
                      << format_number(b.alpha(c, j).imag()) << ',' << format_number(b.beta(c, j).real()) << ','
                      << format_number(b.beta(c, j).imag()) << '\n';
        coefficient_lines[i] = lines.str();
    });
    report.rows = std::move(rows);
    std::string coefficients = "tau,k,j,alpha_re,alpha_im,beta_re,beta_im\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        coefficients += coefficient_lines[i];
        worst = std::max(worst, report.rows[i][6]);
    }
    report.extra_files["field_bogoliubov.csv"] = coefficients;
    report.diagnostics = {{"max_unitarity_deviation", worst},
                          {"unitarity_bound", 10 * config.tolerances.field},
                          {"unitarity_within_bound", worst <= 10 * config.tolerances.field}};
    finish_report(report, start);
    return report;
}

RunReport run_fock_oracle(const ScenarioConfig& config) {
    require_pipeline(config, {Pipeline::fock_oracle}, "run_fock_oracle");
    validate(config);
    const auto start = Clock::now();
    RunReport report = start_report(config);
    report.columns = {"tau_requested", "tau", "periods", "N", "S_d", "S_vn", "C",
                      "N_closed", "S_d_closed", "steps", "error_estimate"};
    const int p = config.harmonics.front();
    const CouplingTables tables = field_tables(config);

    std::vector<std::vector<double>> rows(config.tau_grid.size());
    std::vector<std::string> diagonals(rows.size());
    parallel_for(rows.size(), config.threads, [&](std::size_t i) {
        const SnappedTau t = snap(config, config.tau_grid[i]);
        if (t.periods == 0) {
            rows[i] = {t.requested, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
            return;
        }
        const auto trajectory = MirrorTrajectory::over_fundamental_periods(config.epsilon, p, t.periods);
        const FockResult fock = run_fock(config, tables, trajectory);
        rows[i] = {t.requested, t.effective, static_cast<double>(t.periods), fock.particle_number,
                   fock.diagonal_entropy, fock.von_neumann, fock.coherence, particle_number(p, t.effective),
                   diagonal_entropy_closed_form(p, t.effective), static_cast<double>(fock.steps),
                   fock.error_estimate};
        diagonals[i] = fock.diagonal_csv;
    });
    report.rows = std::move(rows);
    double gap = 0.0;
    for (std::size_t i = 0; i < diagonals.size(); ++i) {
        gap = std::max(gap, std::abs(report.rows[i][6] - report.rows[i][4]));
        if (!diagonals[i].empty()) report.extra_files["fock_diagonal_" + std::to_string(i) + ".csv"] = diagonals[i];
    }
    report.diagnostics = {{"max_coherence_gap", gap},
                          {"basis_dimension", FockBasis(config.cutoffs.fock_modes, config.cutoffs.fock_n_max).dimension()}};
    finish_report(report, start);
    return report;
}

RunReport run_scenario(const ScenarioConfig& config) {
    switch (config.pipeline) {
        case Pipeline::short_time: return run_entropy_sweep(config);
        case Pipeline::crosscheck: return run_crosscheck(config);
        case Pipeline::resonance: return run_resonance_study(config);
        case Pipeline::gaussian: return run_gaussian_study(config);
        case Pipeline::field_oracle: return run_field_oracle(config);
        case Pipeline::fock_oracle: return run_fock_oracle(config);
    }
    throw ConfigurationError("unknown pipeline");
}

}  // namespace dce
