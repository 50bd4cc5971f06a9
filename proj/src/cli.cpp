#include "dce/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dce/errors.hpp"
#include "dce/format.hpp"
#include "dce/scenario.hpp"

namespace dce {

using nlohmann::json;

namespace {

struct Flags {
    std::string config_path;
    std::string out_dir;
    std::optional<int> threads;
    std::optional<double> tol;
};

json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigurationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

// The tolerance knob that --tol sets for each pipeline.
std::vector<std::string> tolerance_keys(Pipeline p) {
    switch (p) {
        case Pipeline::resonance:
        case Pipeline::gaussian: return {"sva"};
        case Pipeline::field_oracle: return {"field"};
        case Pipeline::fock_oracle: return {"fock"};
        case Pipeline::crosscheck: return {"fock", "field", "sva"};
        case Pipeline::short_time: return {};
    }
    return {};
}

ScenarioConfig resolve_config(std::optional<Pipeline> pipeline, const Flags& flags) {
    json file = flags.config_path.empty() ? json::object() : read_config_file(flags.config_path);
    if (!file.is_object()) throw ConfigurationError("config file must hold a JSON object");
    if (!pipeline) {
        const auto it = file.find("pipeline");
        if (it == file.end() || !it->is_string()) throw ConfigurationError("config: 'pipeline' is required");
        pipeline = pipeline_from_string(it->get<std::string>());
    }
    if (const auto it = file.find("pipeline"); it != file.end() && *it != to_string(*pipeline))
        throw ConfigurationError("config pipeline '" + it->dump() + "' does not match subcommand '" +
                                 to_string(*pipeline) + "'");

    json merged = to_json(default_config(*pipeline));
    merged.merge_patch(file);
    apply_env_overrides(merged);
    if (merged.value("pipeline", std::string{}) != to_string(*pipeline))
        throw ConfigurationError("DCE_PIPELINE does not match the subcommand");

    if (!flags.out_dir.empty()) merged["output_path"] = flags.out_dir;
    if (flags.threads) merged["threads"] = *flags.threads;
    if (flags.tol) {
        const auto keys = tolerance_keys(*pipeline);
        if (keys.empty()) throw ConfigurationError("--tol has no meaning for " + to_string(*pipeline));
        for (const auto& key : keys) merged["tolerances"][key] = *flags.tol;
    }
    return config_from_json(merged);
}

int exit_code_for(std::ostream& err) {
    try {
        throw;
    } catch (const ConfigurationError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const RegimeError& e) {
        err << "regime violation: " << e.what() << '\n';
        return 3;
    } catch (const IntegrationError& e) {
        err << "integration failure: " << e.what() << " (reached " << format_number(e.reached()) << ")\n";
        return 4;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 4;
    } catch (const CrosscheckFailure& e) {
        err << "crosscheck failure: " << e.what() << '\n';
        return 5;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 4;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Entropy production of a cavity field driven by an oscillating mirror", "dce"};
    app.require_subcommand(1);
    app.set_version_flag("--version", library_version());

    Flags flags;
    const std::pair<const char*, std::optional<Pipeline>> commands[] = {
        {"sweep-entropy", Pipeline::short_time},  {"crosscheck", Pipeline::crosscheck},
        {"resonance", Pipeline::resonance},       {"gaussian", Pipeline::gaussian},
        {"field-oracle", Pipeline::field_oracle}, {"fock-oracle", Pipeline::fock_oracle},
        {"validate-config", std::nullopt},
    };
    const std::map<std::string, std::string> descriptions = {
        {"sweep-entropy", "Closed-form N and S_d over harmonics and a tau grid"},
        {"crosscheck", "Compare closed form, Fock oracle, field oracle and Gaussian pipeline"},
        {"resonance", "Slowly varying amplitudes at p = 2 with asymptote residuals"},
        {"gaussian", "Single-mode variances, populations and entropies at p = 2"},
        {"field-oracle", "Integrate the mode functions and extract Bogoliubov coefficients"},
        {"fock-oracle", "Evolve the vacuum in a truncated Fock space"},
        {"validate-config", "Check a config file and print it with all defaults filled in"},
    };
    std::map<CLI::App*, std::optional<Pipeline>> pipelines;
    for (const auto& [name, pipeline] : commands) {
        CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
        sub->add_option("--config", flags.config_path, "JSON config file")->check(CLI::ExistingFile);
        if (pipeline) {
            sub->add_option("--out", flags.out_dir, "Output directory (overrides output_path)");
            sub->add_option("--threads", flags.threads, "Worker threads, 0 = available parallelism");
            sub->add_option("--tol", flags.tol, "Integration tolerance of the pipeline");
        } else {
            sub->get_option("--config")->required();
        }
        pipelines[sub] = pipeline;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const std::optional<Pipeline> pipeline = pipelines.at(sub);
        const ScenarioConfig config = resolve_config(pipeline, flags);
        if (!pipeline) {
            out << to_json(config).dump(2) << '\n';
            return 0;
        }
        const RunReport report = run_scenario(config);
        write_report(report, config.output_path);
        out << report.pipeline << ": " << report.rows.size() << " rows written to "
            << (std::filesystem::path(config.output_path) / (report.pipeline + ".csv")).string() << " in "
            << format_number(report.wall_time_seconds) << " s\n";
        if (!report.passed) throw CrosscheckFailure(report.diagnostics.dump());
        return 0;
    } catch (...) {
        return exit_code_for(err);
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace dce
