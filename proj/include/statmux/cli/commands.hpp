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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace statmux::cli
{

/// Exit statuses of every subcommand.
enum ExitStatus : int
{
    exit_ok = 0,
    exit_runtime = 1,
    exit_input = 2,
};

struct Options
{
    std::string config;
    std::string trace;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> allocators;
    unsigned jobs = 1;
    /// Positional inputs of `report`.
    std::vector<std::string> inputs;
};

/// Runs every scenario x seed of the config. A single run writes straight into
/// `out`; several runs write into out/<scenario>/seed-<n>/. table1.txt always
/// lands in `out`.
int cmd_simulate(const Options& opt, std::ostream& log);

/// Like simulate, but streams, complexities and R-D samples come from a trace;
/// the config supplies the channel, the measure and the allocators.
int cmd_replay(const Options& opt, std::ostream& log);

/// Fits D = sigma C^2 / R per stream and super GOP; writes fit.csv and fig1.dat.
int cmd_fit(const Options& opt, std::ostream& log);

/// Aggregates run directories (or one table CSV) into a LAM/LFAM table at `out`
/// (stdout when empty).
int cmd_report(const Options& opt, std::ostream& log);

} // namespace statmux::cli
