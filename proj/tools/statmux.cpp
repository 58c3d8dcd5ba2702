/**
 * Copyright (C) 2026 The statmux Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "statmux/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace statmux::cli;

    CLI::App app{"Joint rate allocation simulator for statistically multiplexed video streams"};
    app.require_subcommand(1);

    Options opt;
    std::uint64_t seed = 0;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", opt.config, "scenario config (YAML)")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", opt.out, "output directory")->required();
        cmd->add_option("--seed", seed, "run this seed only");
        cmd->add_option("--allocators", opt.allocators, "allocators to run (lam, lfam, oracle, uniform)")
            ->delimiter(',');
        cmd->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run the scenarios of a config");
    add_run_flags(simulate);

    CLI::App* replay = app.add_subcommand("replay", "run allocators against a recorded R-D trace");
    replay->add_option("--trace", opt.trace, "trace CSV")->required()->check(CLI::ExistingFile);
    add_run_flags(replay);

    CLI::App* fit = app.add_subcommand("fit", "fit the hyperbolic R-D model to trace samples");
    fit->add_option("--trace", opt.trace, "trace CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--out", opt.out, "output directory")->required();

    CLI::App* report = app.add_subcommand("report", "aggregate runs into a LAM/LFAM comparison table");
    report->add_option("inputs", opt.inputs, "run directories, or one table CSV")->required();
    report->add_option("--out", opt.out, "table file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    for (CLI::App* cmd : {simulate, replay})
        if (cmd->count("--seed") > 0)
            opt.seed = seed;

    if (*simulate)
        return cmd_simulate(opt, std::cerr);
    if (*replay)
        return cmd_replay(opt, std::cerr);
    if (*fit)
        return cmd_fit(opt, std::cerr);
    return cmd_report(opt, std::cerr);
}
