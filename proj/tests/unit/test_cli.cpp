#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "dce/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = dce::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "dce-cli-tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string write_file(const std::string& name, const std::string& content) {
    const auto path = scratch(name);
    std::ofstream(path) << content;
    return path.string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate-config prints the completed config") {
    const auto path = write_file("ok.json", R"({"pipeline": "gaussian", "tau_grid": [0, 2]})");
    const auto r = cli({"validate-config", "--config", path});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"k_max_sva\": 64") != std::string::npos);
    CHECK(r.out.find("\"pipeline\": \"gaussian\"") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"no-such-command"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"validate-config"}).code == 2);
    CHECK(cli({"validate-config", "--config", write_file("bad.json", "{not json")}).code == 2);
    CHECK(cli({"resonance", "--config", write_file("mismatch.json", R"({"pipeline": "gaussian"})")}).code == 2);
    CHECK(cli({"sweep-entropy", "--tol", "1e-9", "--out", scratch("o").string()}).code == 2);
    const auto regime = write_file("regime.json", R"({"pipeline": "short-time", "harmonics": [8], "tau_grid": [0.3]})");
    const auto r = cli({"sweep-entropy", "--config", regime, "--out", scratch("o").string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("p = 8") != std::string::npos);
    const auto truncated =
        write_file("truncated.json", R"({"pipeline": "gaussian", "tau_grid": [0, 16], "cutoffs": {"n_cut": 4}})");
    CHECK(cli({"gaussian", "--config", truncated, "--out", scratch("o").string()}).code == 4);
}

TEST_CASE("flags override the config file") {
    const auto path = write_file("res.json", R"({"pipeline": "resonance", "tau_grid": [0, 1], "modes": [1],
                                              "output_path": "ignored"})");
    const auto out = scratch("flags");
    fs::remove_all(out);
    const auto r = cli({"resonance", "--config", path, "--out", out.string(), "--threads", "2", "--tol", "1e-10"});
    CHECK(r.code == 0);
    std::ifstream report(out / "report.json");
    const auto j = nlohmann::json::parse(report);
    CHECK(j["config"]["output_path"] == out.string());
    CHECK(j["config"]["threads"] == 2);
    CHECK(j["config"]["tolerances"]["sva"] == 1e-10);
    CHECK(fs::exists(out / "resonance.csv"));
}

}
