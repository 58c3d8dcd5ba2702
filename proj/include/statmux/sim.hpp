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

#include "statmux/alloc.hpp"
#include "statmux/complexity.hpp"
#include "statmux/core.hpp"
#include "statmux/metrics.hpp"
#include "statmux/rdmodel.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace statmux::sim
{

struct RunConfig
{
    Scenario scenario;
    rd::EncoderModel encoder;
    complexity::ComplexityMeasure complexity_measure;
    std::vector<std::string> allocators{"lam", "lfam"};
    double floor_fraction = alloc::default_floor_fraction;
    std::uint64_t seed = 0;
};

/// Realized ground truth shared by every allocator of a run, indexed [stream][gop].
struct GroundTruth
{
    std::vector<std::vector<double>> sigma;
    std::vector<std::vector<double>> complexity;
    std::vector<std::vector<double>> measured_complexity;
};

struct RunResult
{
    std::vector<metrics::RunSummary> summaries;
    GroundTruth truth;

    /// Throws lookup_error for an allocator that was not run.
    const metrics::RunSummary& summary(const std::string& allocator) const;
};

/// Closed multiplexing loop. Super GOP 0 is split uniformly; from then on each
/// allocator sees the look-ahead complexity of the next super GOP and the
/// feedback of the one just coded. Allocators replay identical truth and
/// identical noise draws, so their results are paired.
RunResult run_multiplex(const RunConfig& config);

/// Runs independent configurations on up to `jobs` threads; results keep input order.
std::vector<RunResult> run_batch(std::span<const RunConfig> configs, unsigned jobs);

struct Comparison
{
    /// Saving per super GOP k >= 1; empty when the baseline variance is zero
    /// and the candidate's is not.
    std::vector<std::optional<double>> per_gop;
    std::optional<double> average;
};

/// Saving of `candidate` over `baseline` per super GOP and on the averaged variance.
Comparison compare_runs(const RunResult& result, const std::string& baseline, const std::string& candidate);

/// Parameters of a generated stream set.
struct SyntheticClass
{
    std::string name;
    std::size_t streams = 4;
    double channel_rate_bps = 4e6;
    std::size_t gops = 13;
    int super_gop_frames = 10;
    double frame_rate = 25.0;
    /// Each stream's PSNR under an equal split is drawn uniformly from this range.
    double psnr_lo = 30.0;
    double psnr_hi = 38.0;
    /// Base complexity, log-uniform.
    double complexity_lo = 1.0;
    double complexity_hi = 4.0;
    /// log C follows an AR(1) around its base level.
    double complexity_phi = 0.8;
    double complexity_sd = 0.15;
};

/// Deterministic scenario from class parameters; sigma is constant per stream.
Scenario make_synthetic_scenario(const SyntheticClass& cls, std::uint64_t seed);

/// Six stream sets sized like the HEVC common test classes A-F:
/// 2, 5, 4, 4, 3, 3 streams at 20, 10, 4, 1, 2, 6 Mbit/s.
std::vector<SyntheticClass> six_class_pack();

} // namespace statmux::sim
