#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "otabc/runner.hpp"

namespace {

int do_validate(const std::string& config_path) {
    const auto result = otabc::validate_config_file(config_path);
    if (!result.ok()) {
        for (const auto& e : result.errors) {
            std::cerr << "error: " << e << "\n";
        }
        return otabc::kExitValidation;
    }
    std::cout << result.config->resolved_json << "\n";
    return otabc::kExitOk;
}

int do_run(const std::string& config_path, const std::string& out_override, int threads_override) {
    auto result = otabc::validate_config_file(config_path);
    if (!result.ok()) {
        for (const auto& e : result.errors) {
            std::cerr << "error: " << e << "\n";
        }
        return otabc::kExitValidation;
    }
    otabc::RunConfig cfg = *result.config;
    if (!out_override.empty()) {
        cfg.output_dir = out_override;
    }
    if (threads_override > 0) {
        cfg.threads = threads_override;
    }
    const int status = otabc::run_experiment(cfg);
    if (status == otabc::kExitZeroAcceptance) {
        std::cerr << "error: zero acceptances at the configured threshold; raise epsilon or use "
                     "epsilon_quantile to pick one from the observed discrepancies\n";
    } else {
        std::cout << "wrote artifacts to " << cfg.output_dir.string() << "\n";
    }
    return status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"otabc - likelihood-free inference with optimal-transport discrepancies"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    int threads_override = 0;

    auto* validate = app.add_subcommand("validate", "parse and validate a run configuration");
    validate->add_option("--config", config_path, "path to the JSON run configuration")
        ->required();

    auto* run = app.add_subcommand("run", "execute the configured experiment");
    run->add_option("--config", config_path, "path to the JSON run configuration")->required();
    run->add_option("--out", out_override, "output directory (overrides the config)");
    run->add_option("--threads", threads_override, "worker threads (overrides the config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate)) {
            return do_validate(config_path);
        }
        return do_run(config_path, out_override, threads_override);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
