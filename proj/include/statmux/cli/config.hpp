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

#include "statmux/sim.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace statmux::cli
{

inline constexpr int schema_version = 1;

/// Bad input (config, trace, run directory). Maps to exit status 2.
class InputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// How a scenario entry of the config produces streams.
struct ScenarioSpec
{
    std::string name;
    double channel_rate_bits = 0.0; ///< already converted to bits per super GOP
    int super_gop_frames = 10;
    double frame_rate = 25.0;
    std::size_t gops = 13;

    /// Explicit streams; empty together with `synthetic` unset means the
    /// streams come from elsewhere (a replay trace).
    std::vector<StreamTrace> streams;
    std::optional<sim::SyntheticClass> synthetic;
};

struct ConfigFile
{
    std::string label;
    std::vector<std::uint64_t> seeds{0};
    std::vector<std::string> allocators{"lam", "lfam"};
    double floor_fraction = alloc::default_floor_fraction;
    rd::EncoderModel encoder;
    complexity::ComplexityMeasure measure;
    /// Draw biased-oracle biases uniformly from this range per run.
    std::optional<std::pair<double, double>> bias_range;
    std::vector<ScenarioSpec> scenarios;
};

/// Parses and schema-checks a config. Errors name the line and the field.
/// Unit conversions are reported on `log`.
ConfigFile load_config(const std::string& path, std::ostream& log);
ConfigFile parse_config(const std::string& text, std::ostream& log);

struct PlannedRun
{
    std::string scenario;
    std::uint64_t seed = 0;
    sim::RunConfig config;
};

/// Expands scenarios x seeds. Synthetic scenarios and drawn biases use the run seed.
std::vector<PlannedRun> plan_runs(const ConfigFile& cfg);

/// Row label for comparison tables.
std::string measure_label(const ConfigFile& cfg);

} // namespace statmux::cli
