#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>
#include <string>

#include "dce/errors.hpp"
#include "dce/scenario.hpp"

namespace dce {

using nlohmann::json;

namespace {

const std::pair<Pipeline, const char*> kPipelineNames[] = {
    {Pipeline::short_time, "short-time"}, {Pipeline::fock_oracle, "fock-oracle"},
    {Pipeline::resonance, "resonance"},   {Pipeline::gaussian, "gaussian"},
    {Pipeline::field_oracle, "field-oracle"}, {Pipeline::crosscheck, "crosscheck"},
};

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

}  // namespace

std::string to_string(Pipeline p) {
    for (const auto& [value, name] : kPipelineNames)
        if (value == p) return name;
    return "unknown";
}

Pipeline pipeline_from_string(const std::string& name) {
    for (const auto& [value, label] : kPipelineNames)
        if (name == label) return value;
    throw ConfigurationError("unknown pipeline '" + name + "'");
}

// The single defaults table. Per-pipeline grids are chosen so that each
// subcommand runs out of the box and reproduces its reference figure or
// limit.
ScenarioConfig default_config(Pipeline pipeline) {
    ScenarioConfig c;
    c.pipeline = pipeline;
    switch (pipeline) {
        case Pipeline::short_time:
            c.harmonics = {1, 2, 3, 4, 5};
            c.tau_grid = linspace(0.004, 0.2, 50);
            break;
        case Pipeline::crosscheck:
            c.harmonics = {2};
            c.tau_grid = {0.02};
            break;
        case Pipeline::fock_oracle:
            c.harmonics = {2};
            c.tau_grid = {0.01, 0.02, 0.05};
            break;
        case Pipeline::field_oracle:
            c.harmonics = {2};
            c.tau_grid = {0.02, 0.05};
            break;
        case Pipeline::resonance:
        case Pipeline::gaussian:
            c.harmonics = {2};
            c.tau_grid = linspace(0.0, 16.0, 65);
            c.modes = {1, 3, 5};
            break;
    }
    if (c.modes.empty()) c.modes = {1};
    return c;
}

json to_json(const ScenarioConfig& c) {
    return json{
        {"schema_version", c.schema_version},
        {"pipeline", to_string(c.pipeline)},
        {"epsilon", c.epsilon},
        {"harmonics", c.harmonics},
        {"tau_grid", c.tau_grid},
        {"modes", c.modes},
        {"cutoffs",
         {{"k_max_field", c.cutoffs.k_max_field},
          {"k_max_sva", c.cutoffs.k_max_sva},
          {"l_sum_max", c.cutoffs.l_sum_max},
          {"fock_modes", c.cutoffs.fock_modes},
          {"fock_n_max", c.cutoffs.fock_n_max},
          {"n_cut", c.cutoffs.n_cut}}},
        {"tolerances",
         {{"sva", c.tolerances.sva},
          {"field", c.tolerances.field},
          {"fock", c.tolerances.fock},
          {"population_negligible", c.tolerances.population_negligible},
          {"population_tail", c.tolerances.population_tail}}},
        {"crosscheck",
         {{"n_relative_eps_factor", c.crosscheck.n_relative_eps_factor},
          {"entropy_n_factor", c.crosscheck.entropy_n_factor},
          {"entropy_tau_factor", c.crosscheck.entropy_tau_factor},
          {"coherence_absolute", c.crosscheck.coherence_absolute}}},
        {"absorber", {{"fraction", c.absorber.fraction}, {"strength", c.absorber.strength}}},
        {"field_closure", c.field_closure == HClosure::consistent ? "consistent" : "summed"},
        {"include_off_resonant", c.include_off_resonant},
        {"threads", c.threads},
        {"output_path", c.output_path},
    };
}

namespace {

// Reads members of one JSON object, rejecting keys nobody asked for.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigurationError("config: '" + label() + "' must be an object");
    }
    ~Reader() = default;
    Reader(const Reader&) = delete;
    Reader& operator=(const Reader&) = delete;

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        const auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!it->is_number()) throw ConfigurationError("");
            } else if constexpr (std::is_same_v<T, int>) {
                if (!it->is_number_integer()) throw ConfigurationError("");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!it->is_boolean()) throw ConfigurationError("");
            }
            out = it->template get<T>();
        } catch (const std::exception&) {
            throw ConfigurationError("config: '" + child(key) + "' has the wrong type");
        }
    }

    Reader object(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return Reader(it == j_.end() ? empty() : *it, child(key));
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key())) throw ConfigurationError("config: unknown key '" + child(item.key()) + "'");
    }

private:
    static const json& empty() {
        static const json e = json::object();
        return e;
    }
    [[nodiscard]] std::string label() const { return path_.empty() ? "<root>" : path_; }
    [[nodiscard]] std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace

ScenarioConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigurationError("config must be a JSON object");
    Pipeline pipeline = Pipeline::short_time;
    if (const auto it = j.find("pipeline"); it != j.end()) {
        if (!it->is_string()) throw ConfigurationError("config: 'pipeline' must be a string");
        pipeline = pipeline_from_string(it->get<std::string>());
    }
    ScenarioConfig c = default_config(pipeline);

    Reader root(j, "");
    std::string pipeline_name = to_string(pipeline);
    root.get("pipeline", pipeline_name);
    root.get("schema_version", c.schema_version);
    root.get("epsilon", c.epsilon);
    root.get("harmonics", c.harmonics);
    root.get("tau_grid", c.tau_grid);
    root.get("modes", c.modes);
    {
        Reader r = root.object("cutoffs");
        r.get("k_max_field", c.cutoffs.k_max_field);
        r.get("k_max_sva", c.cutoffs.k_max_sva);
        r.get("l_sum_max", c.cutoffs.l_sum_max);
        r.get("fock_modes", c.cutoffs.fock_modes);
        r.get("fock_n_max", c.cutoffs.fock_n_max);
        r.get("n_cut", c.cutoffs.n_cut);
        r.finish();
    }
    {
        Reader r = root.object("tolerances");
        r.get("sva", c.tolerances.sva);
        r.get("field", c.tolerances.field);
        r.get("fock", c.tolerances.fock);
        r.get("population_negligible", c.tolerances.population_negligible);
        r.get("population_tail", c.tolerances.population_tail);
        r.finish();
    }
    {
        Reader r = root.object("crosscheck");
        r.get("n_relative_eps_factor", c.crosscheck.n_relative_eps_factor);
        r.get("entropy_n_factor", c.crosscheck.entropy_n_factor);
        r.get("entropy_tau_factor", c.crosscheck.entropy_tau_factor);
        r.get("coherence_absolute", c.crosscheck.coherence_absolute);
        r.finish();
    }
    {
        Reader r = root.object("absorber");
        r.get("fraction", c.absorber.fraction);
        r.get("strength", c.absorber.strength);
        r.finish();
    }
    std::string closure = c.field_closure == HClosure::consistent ? "consistent" : "summed";
    root.get("field_closure", closure);
    if (closure == "consistent") {
        c.field_closure = HClosure::consistent;
    } else if (closure == "summed") {
        c.field_closure = HClosure::summed;
    } else {
        throw ConfigurationError("config: 'field_closure' must be \"consistent\" or \"summed\"");
    }
    root.get("include_off_resonant", c.include_off_resonant);
    root.get("threads", c.threads);
    root.get("output_path", c.output_path);
    root.finish();

    validate(c);
    return c;
}

namespace {

template <typename T>
void require_sorted(const std::vector<T>& v, const char* name) {
    if (v.empty()) throw ConfigurationError(std::string("config: '") + name + "' must not be empty");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i - 1] < v[i]))
            throw ConfigurationError(std::string("config: '") + name + "' must be strictly increasing");
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigurationError("config: " + message);
}

}  // namespace

void validate(const ScenarioConfig& c) {
    require(c.schema_version == 1, "unsupported schema_version " + std::to_string(c.schema_version));
    require(c.epsilon > 0.0 && c.epsilon <= 0.1, "epsilon must lie in (0, 0.1]");
    require_sorted(c.harmonics, "harmonics");
    require_sorted(c.tau_grid, "tau_grid");
    require_sorted(c.modes, "modes");
    require(c.harmonics.front() >= 1, "harmonics must be >= 1");
    require(c.tau_grid.front() >= 0.0, "tau_grid must be >= 0");

    const auto& k = c.cutoffs;
    require(k.k_max_field >= 1 && k.k_max_field <= 64, "cutoffs.k_max_field must lie in [1, 64]");
    require(k.k_max_sva >= 2 && k.k_max_sva <= 1024, "cutoffs.k_max_sva must lie in [2, 1024]");
    require(k.l_sum_max == 0 || k.l_sum_max >= 4 * k.k_max_field,
            "cutoffs.l_sum_max must be 0 (auto) or >= 4*k_max_field");
    require(k.fock_modes >= 1 && k.fock_modes <= 8, "cutoffs.fock_modes must lie in [1, 8]");
    require(k.fock_modes <= k.k_max_field, "cutoffs.fock_modes must not exceed k_max_field");
    require(k.fock_n_max >= 0 && k.fock_n_max <= 12, "cutoffs.fock_n_max must lie in [0, 12]");
    require(k.n_cut >= 0 && k.n_cut <= (1 << 20), "cutoffs.n_cut must lie in [0, 2^20]");

    const auto& t = c.tolerances;
    require(t.sva >= 1e-12 && t.sva <= 1e-6, "tolerances.sva must lie in [1e-12, 1e-6]");
    require(t.field >= 1e-14 && t.field <= 1e-8, "tolerances.field must lie in [1e-14, 1e-8]");
    require(t.fock > 0.0 && t.fock <= 1e-4, "tolerances.fock must lie in (0, 1e-4]");
    require(t.population_negligible > 0.0 && t.population_tail > 0.0, "population tolerances must be positive");

    const auto& x = c.crosscheck;
    require(x.n_relative_eps_factor > 0.0 && x.entropy_n_factor >= 0.0 && x.entropy_tau_factor >= 0.0 &&
                x.coherence_absolute > 0.0,
            "crosscheck tolerances must be positive");
    require(c.absorber.fraction > 0.0 && c.absorber.fraction <= 1.0, "absorber.fraction must lie in (0, 1]");
    require(c.absorber.strength >= 0.0, "absorber.strength must be >= 0");
    require(c.threads >= 0 && c.threads <= 1024, "threads must lie in [0, 1024]");

    const double tau_max = c.tau_grid.back();
    switch (c.pipeline) {
        case Pipeline::short_time:
            require(c.harmonics.back() <= 8, "short-time harmonics must lie in 1..8");
            require(c.tau_grid.front() > 0.0 && tau_max <= 0.3, "short-time tau_grid must lie in (0, 0.3]");
            break;
        case Pipeline::crosscheck:
            require(c.epsilon <= 1e-2, "crosscheck needs epsilon <= 1e-2");
            require(tau_max <= 0.1, "crosscheck needs tau <= 0.1");
            require(c.harmonics == std::vector<int>{2}, "crosscheck runs at p = 2 only");
            break;
        case Pipeline::fock_oracle:
        case Pipeline::field_oracle:
            require(c.harmonics.size() == 1, "oracle pipelines take a single harmonic");
            require(tau_max <= 1.0, "oracle pipelines cover tau <= 1");
            break;
        case Pipeline::resonance:
        case Pipeline::gaussian:
            require(tau_max <= 20.0, "resonance tau_grid must end at or before 20");
            for (int m : c.modes)
                require(m >= 1 && m % 2 == 1 && m <= 2 * k.k_max_sva - 1,
                        "resonance modes must be odd and retained by k_max_sva");
            break;
    }
}

void apply_env_overrides(json& j, const std::function<std::optional<std::string>(const std::string&)>& lookup) {
    const auto get = [&](const std::string& name) -> std::optional<std::string> {
        if (lookup) return lookup(name);
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
    const std::function<void(json&, const std::string&)> walk = [&](json& node, const std::string& prefix) {
        for (auto& [key, value] : node.items()) {
            std::string name = prefix + "_" + key;
            std::transform(name.begin(), name.end(), name.begin(),
                           [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
            if (value.is_object()) {
                walk(value, name);
                continue;
            }
            const auto text = get(name);
            if (!text) continue;
            try {
                value = json::parse(*text);
            } catch (const json::parse_error&) {
                value = *text;
            }
        }
    };
    walk(j, "DCE");
}

}  // namespace dce
