#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pfl/config.hpp"
#include "pfl/error.hpp"
#include "pfl/scenarios.hpp"
#include "pfl/version.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::string scenario_list() {
    std::string s;
    for (const auto& n : pfl::scenario_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
}

bool known_scenario(const std::string& name) {
    const auto& names = pfl::scenario_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::filesystem::path output_dir(const pfl::RunConfig& config, const std::string& cli_out) {
    if (!cli_out.empty()) return cli_out;
    if (!config.run.output.empty()) return config.run.output;
    const char* root = std::getenv("PFL_OUT");
    return std::filesystem::path(root && *root ? root : "pfl_out") / config.run.scenario;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Paraxial fluid-of-light simulator and gradient echo memory model"};
    app.set_version_flag("--version", pfl::kVersion);

    std::string command, config_path, out;
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    app.add_option("command", command, "Scenario name, 'validate' or 'version'")->required();
    auto* config_opt = app.add_option("-c,--config", config_path, "Run configuration file (INI)");
    app.add_option("-j,--jobs", jobs, "Concurrent workers for independent runs")->check(CLI::PositiveNumber);
    app.add_option("-o,--out", out, "Output directory (default $PFL_OUT/<scenario>)");
    auto* seed_opt = app.add_option("-s,--seed", seed, "Override run.seed");
    app.footer("Scenarios: " + scenario_list());

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (command == "version") {
        std::cout << "pfl " << pfl::kVersion << '\n';
        return kOk;
    }
    if (command != "validate" && !known_scenario(command)) {
        std::cerr << "pfl: unknown scenario '" << command << "'; valid scenarios: " << scenario_list() << '\n';
        return kConfigError;
    }
    if (config_opt->count() == 0) {
        std::cerr << "pfl: --config is required\n";
        return kConfigError;
    }

    pfl::RunConfig config;
    try {
        config = pfl::load_config(config_path, false);
        if (command != "validate") config.run.scenario = command;
        if (seed_opt->count() > 0) config.run.seed = seed;
        pfl::validate_config(config);
    } catch (const pfl::Error& e) {
        std::cerr << "pfl: config error in " << config_path << ": " << e.what() << '\n';
        return kConfigError;
    }
    if (command == "validate") {
        std::cout << "config ok: scenario " << config.run.scenario << '\n';
        return kOk;
    }

    try {
        pfl::RunOptions options;
        options.out_dir = output_dir(config, out);
        options.jobs = jobs;
        const auto result = pfl::run_scenario(config, options);
        for (const auto& [k, v] : result.summary) std::cout << k << ' ' << v << '\n';
        std::cout << "wrote " << result.files.size() << " files to " << result.out_dir.string() << " (manifest "
                  << result.manifest.filename().string() << ")\n";
    } catch (const pfl::ConfigError& e) {
        std::cerr << "pfl: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "pfl: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}
