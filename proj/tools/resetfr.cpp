#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resetfr/cli.hpp"

int main(int argc, char** argv) {
    using namespace resetfr::cli;

    CLI::App app{"Steady-state frequency response of closed-loop reset control systems"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;
    int nh = 0;
    std::vector<double> freqs;
    std::string method = "new";

    const std::vector<std::pair<const char*, const char*>> commands{
        {"bode-open", "Open-loop HOSIDF next to the classical one"},
        {"bode-closed", "Closed-loop S_n, T_n, CS_n with the correction factor"},
        {"predict", "Predicted steady-state e, y, u over one period"},
        {"simulate", "Hybrid simulation and steady-state record"},
        {"compare", "Prediction error of the HOSIDF model against simulation"},
        {"verify", "Assumption checks: open-loop condition, H_beta, reset count"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory (overrides output_dir)");
        sub->add_option("--nh", nh, "Highest harmonic index (overrides n_harmonics)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--freqs", freqs, "Excitation frequencies in Hz (overrides the config)")
            ->delimiter(',');
        sub->add_option("--method", method, "Closed-loop method columns")
            ->check(CLI::IsMember({"new", "A", "B", "all"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    CliOverrides ov;
    if (!out_dir.empty()) ov.out_dir = out_dir;
    if (nh > 0) ov.n_harmonics = nh;
    const auto* sub = app.get_subcommands().front();
    if (sub->count("--freqs") > 0) ov.frequencies_hz = freqs;

    return run(sub->get_name(), config, ov, parse_method(method), std::cerr);
}
