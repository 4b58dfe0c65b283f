// cavpass — cavity-mediated adiabatic-passage gate simulator CLI.
#include "cavpass/commands.hpp"
#include "cavpass/version.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"state-vector simulator for cavity-mediated adiabatic-passage gates"};
    app.set_version_flag("--version", std::string("cavpass ") + cavpass::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string protocol_override;
    bool assert_mode = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path,
                        "JSON run configuration (defaults: reference operating point)");
        cmd->add_option("--out", out_dir, "output directory (overrides config)");
        cmd->add_option("--protocol", protocol_override,
                        "protocol override: swap8 | swap7 | cnot11")
            ->check(CLI::IsMember({"swap8", "swap7", "cnot11"}));
        cmd->add_flag("--assert", assert_mode,
                      "exit 4 when acceptance thresholds are violated");
    };

    CLI::App* simulate = app.add_subcommand(
        "simulate", "propagate one initial state and the full gate; write CSV + JSON");
    add_common(simulate);
    CLI::App* scan =
        app.add_subcommand("scan", "parameter scan over the config grid; write CSV");
    add_common(scan);
    CLI::App* darkstates = app.add_subcommand(
        "darkstates", "per-step dark-state kernel/gap/phase report; write JSON");
    add_common(darkstates);

    CLI::App* estimate =
        app.add_subcommand("estimate", "metastable-Helium physical estimates");
    double intensity = 1e4;
    double t_p = 1e-9;
    double gamma = 1e7;
    std::string estimate_json;
    estimate->add_option("--intensity", intensity, "laser intensity in W/cm^2")
        ->required();
    estimate->add_option("--tp", t_p, "pulse width in seconds")->required();
    estimate->add_option("--gamma", gamma, "linewidth of |e> in s^-1 (default 1e7)");
    estimate->add_option("--json", estimate_json, "also write the estimate as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cavpass::kExitConfig;
    }

    if (estimate->parsed()) {
        std::optional<std::filesystem::path> json_path;
        if (!estimate_json.empty()) json_path = estimate_json;
        return cavpass::estimate_cmd(intensity, t_p, gamma, json_path, std::cout, std::cerr);
    }

    cavpass::RunConfig config;
    try {
        if (!config_path.empty()) config = cavpass::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return cavpass::kExitConfig;
    }
    if (!protocol_override.empty()) config.protocol = protocol_override;
    std::filesystem::path out = out_dir.empty() ? config.out_dir : out_dir;

    if (simulate->parsed())
        return cavpass::simulate_cmd(config, out, assert_mode, std::cout, std::cerr);
    if (scan->parsed())
        return cavpass::scan_cmd(config, out, assert_mode, std::cout, std::cerr);
    if (darkstates->parsed())
        return cavpass::darkstates_cmd(config, out, assert_mode, std::cout, std::cerr);
    return cavpass::kExitConfig;
}
