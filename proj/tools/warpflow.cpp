// Command-line front end: run, sweep, verify, resume.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "warpflow/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"warpflow: O(2) x O(n-1)-invariant Ricci flow on S^n"};
    app.require_subcommand(1);

    std::string config, out, suite, checkpoint;
    auto* run = app.add_subcommand("run", "evolve one configuration");
    run->add_option("--config", config, "key = value config file")->required();
    run->add_option("--out", out, "output directory (overrides the config)");

    auto* sweep = app.add_subcommand("sweep", "run a tau sweep and audit the trends");
    sweep->add_option("--config", config, "config file with taus = ...")->required();
    sweep->add_option("--out", out, "output directory (overrides the config)");

    auto* verify = app.add_subcommand("verify", "run a pinned verification suite");
    verify->add_option("suite", suite, "oracles | residuals | bounds | identities | all")->required();
    verify->add_option("--out", out, "directory for the audit JSON")->default_val("warpflow_verify");

    auto* resume = app.add_subcommand("resume", "continue a run from a checkpoint");
    resume->add_option("--checkpoint", checkpoint, ".wfc file")->required();
    resume->add_option("--out", out, "output directory (defaults to the original)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : warpflow::kExitConfig;
    }

    auto opt_out = out.empty() ? std::nullopt : std::optional<std::string>(out);
    if (*run) return warpflow::cmd_run(config, opt_out, std::cerr);
    if (*sweep) return warpflow::cmd_sweep(config, opt_out, std::cerr);
    if (*verify) return warpflow::cmd_verify(suite, out, std::cerr);
    return warpflow::cmd_resume(checkpoint, opt_out, std::cerr);
}
