#pragma once

// Scenario configuration, orchestration of the backends and report output.

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dce/field_oracle.hpp"
#include "dce/resonance.hpp"

namespace dce {

enum class Pipeline { short_time, fock_oracle, resonance, gaussian, field_oracle, crosscheck };

[[nodiscard]] std::string to_string(Pipeline p);
/// Throws ConfigurationError for unknown names.
[[nodiscard]] Pipeline pipeline_from_string(const std::string& name);

/// Every knob consumed by any backend. Defaults live in default_config()
/// and are listed in the README.
struct ScenarioConfig {
    int schema_version = 1;
    Pipeline pipeline = Pipeline::short_time;
    double epsilon = 1e-3;
    std::vector<int> harmonics;
    std::vector<double> tau_grid;
    std::vector<int> modes;

    struct Cutoffs {
        int k_max_field = 16;
        int k_max_sva = 64;
        int l_sum_max = 0;  ///< 0 = 10·k_max_field
        int fock_modes = 4;
        int fock_n_max = 4;
        int n_cut = 0;      ///< 0 = adaptive
    } cutoffs;

    struct Tolerances {
        double sva = 1e-9;
        double field = 1e-10;
        double fock = 1e-9;
        double population_negligible = 1e-14;
        double population_tail = 1e-10;
    } tolerances;

    struct Crosscheck {
        double n_relative_eps_factor = 5.0;   ///< N agreement: factor·ε relative
        double entropy_n_factor = 5.0;        ///< S_d agreement: factor·N + ...
        double entropy_tau_factor = 0.1;      ///< ... + factor·τ relative
        double coherence_absolute = 1e-8;     ///< |C − S_d| on the Fock state
    } crosscheck;

    AbsorberOptions absorber;
    HClosure field_closure = HClosure::consistent;
    bool include_off_resonant = false;
    int threads = 0;  ///< 0 = available parallelism
    std::string output_path = "dce-out";
};

/// Defaults for a pipeline, including its τ grid, harmonics and modes.
[[nodiscard]] ScenarioConfig default_config(Pipeline pipeline = Pipeline::short_time);
[[nodiscard]] nlohmann::json to_json(const ScenarioConfig& config);
/// Reads "pipeline" first and starts from default_config(pipeline).
/// Missing keys take defaults; unknown keys and type mismatches throw
/// ConfigurationError. The result is validated.
[[nodiscard]] ScenarioConfig config_from_json(const nlohmann::json& j);
/// Checks grids, cutoffs and tolerances against their documented ranges.
void validate(const ScenarioConfig& config);

/// Overrides leaf scalars from environment variables named
/// DCE_<PATH_IN_UPPER_CASE> (path segments joined by '_', e.g.
/// DCE_CUTOFFS_K_MAX_SVA). Values parse as JSON, falling back to a string.
/// `lookup` defaults to std::getenv.
void apply_env_overrides(nlohmann::json& j,
                         const std::function<std::optional<std::string>(const std::string&)>& lookup = {});

/// Tabular output plus machine-readable metadata for one run.
struct RunReport {
    std::string pipeline;
    nlohmann::json config;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    nlohmann::json diagnostics = nlohmann::json::object();
    /// Additional CSV files (name → content), e.g. Fock diagonals.
    std::map<std::string, std::string> extra_files;
    double wall_time_seconds = 0.0;
    std::string version;
    bool passed = true;

    /// CSV with a header line; numbers in shortest round-trip form.
    [[nodiscard]] std::string csv() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

[[nodiscard]] RunReport run_entropy_sweep(const ScenarioConfig& config);
[[nodiscard]] RunReport run_crosscheck(const ScenarioConfig& config);
[[nodiscard]] RunReport run_resonance_study(const ScenarioConfig& config);
[[nodiscard]] RunReport run_gaussian_study(const ScenarioConfig& config);
[[nodiscard]] RunReport run_field_oracle(const ScenarioConfig& config);
[[nodiscard]] RunReport run_fock_oracle(const ScenarioConfig& config);
/// Dispatches on config.pipeline.
[[nodiscard]] RunReport run_scenario(const ScenarioConfig& config);

/// Writes <pipeline>.csv, report.json and any extra files into `dir`.
void write_report(const RunReport& report, const std::filesystem::path& dir);

/// Snaps τ to the nearest whole number of fundamental periods, τ = επn.
[[nodiscard]] int periods_for_tau(double epsilon, double tau);

/// Runs `task(i)` for i in [0, count) on `threads` workers (0 = available
/// parallelism). The first exception thrown by any task is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

[[nodiscard]] std::string library_version();

}  // namespace dce
