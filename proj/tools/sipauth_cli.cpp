#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "sipauth/harness.hpp"
#include "sipauth/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format;
    uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* sub, CommonOpts& opts) {
    sub->add_option("--config", opts.config_path, "scenario config file")->required();
    sub->add_option("--seed", opts.seed, "seed override (takes precedence over the config)")
        ->each([&](const std::string&) { opts.seed_given = true; });
    sub->add_option("--out", opts.out_path, "report output path (default: config, else stdout)");
    sub->add_option("--format", opts.format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
}

int run(const CommonOpts& opts, std::optional<sipauth::Campaign> forced,
        bool attack_only) {
    using sipauth::Campaign;
    sipauth::ScenarioConfig cfg = sipauth::ScenarioConfig::parse_file(opts.config_path);
    if (opts.seed_given) {
        cfg.seed = opts.seed;
        cfg.seed_set = true;
    }
    if (!opts.out_path.empty()) {
        cfg.output = opts.out_path;
    }
    if (!opts.format.empty()) {
        cfg.format = opts.format;
    }
    if (forced.has_value()) {
        cfg.campaign = *forced;
    }
    if (attack_only) {
        switch (cfg.campaign) {
            case Campaign::TamperExhaustive:
            case Campaign::ReplayTest:
            case Campaign::DosTest:
            case Campaign::ForgeTest:
            case Campaign::RemovalProbe:
                break;
            default:
                throw sipauth::ConfigError(
                    "attack requires campaign = tamper_exhaustive, replay_test, dos_test, "
                    "forge_test, or removal_probe");
        }
    }
    (void)sipauth::run_scenario(cfg);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chiplet authentication simulator: garbled-signature secure boot "
                 "over a simulated interposer, with attack campaigns and metrics"};
    app.require_subcommand(1);

    CommonOpts opts;
    CLI::App* cmd_enroll = app.add_subcommand("enroll", "compute vendor baselines only");
    CLI::App* cmd_boot = app.add_subcommand("boot", "run enrollment plus secure boot cycles");
    CLI::App* cmd_attack = app.add_subcommand("attack", "run the attack campaign named in the config");
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "fault-injection Hamming-distance sweep");
    CLI::App* cmd_complexity = app.add_subcommand("complexity", "replay work-factor table");
    CLI::App* cmd_report = app.add_subcommand("report", "run whatever campaign the config names");
    for (CLI::App* sub : {cmd_enroll, cmd_boot, cmd_attack, cmd_sweep, cmd_complexity, cmd_report}) {
        add_common(sub, opts);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        using sipauth::Campaign;
        if (cmd_enroll->parsed()) return run(opts, Campaign::EnrollOnly, false);
        if (cmd_boot->parsed()) return run(opts, Campaign::Boot, false);
        if (cmd_attack->parsed()) return run(opts, std::nullopt, true);
        if (cmd_sweep->parsed()) return run(opts, Campaign::HdSweep, false);
        if (cmd_complexity->parsed()) return run(opts, Campaign::Complexity, false);
        if (cmd_report->parsed()) return run(opts, std::nullopt, false);
        return kExitConfig;
    } catch (const sipauth::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const sipauth::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
