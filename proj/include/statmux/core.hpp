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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace statmux
{

enum class ErrorKind
{
    invalid_argument,
    division_by_zero,
    invalid_feedback,
    missing_data,
    fit_error,
    degenerate_weights,
    undefined_saving,
    lookup_error,
};

const char* to_string(ErrorKind kind);

/// Library-wide exception. The kind is stable and what() carries context.
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) { }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Bits spent on one stream (or the whole channel) over one super GOP.
struct RateBits
{
    double value = 0.0;

    constexpr RateBits() = default;
    constexpr explicit RateBits(double v) : value(v) { }

    bool valid() const;
    friend constexpr bool operator==(RateBits, RateBits) = default;
};

/// Luma mean squared error.
struct Distortion
{
    double mse = 0.0;

    constexpr Distortion() = default;
    constexpr explicit Distortion(double v) : mse(v) { }

    bool valid() const;
    friend constexpr bool operator==(Distortion, Distortion) = default;
};

/// Dimensionless look-ahead complexity measure.
struct Complexity
{
    double value = 0.0;

    constexpr Complexity() = default;
    constexpr explicit Complexity(double v) : value(v) { }

    bool valid() const;
    friend constexpr bool operator==(Complexity, Complexity) = default;
};

struct StreamId
{
    std::size_t index = 0;
    friend constexpr bool operator==(StreamId, StreamId) = default;
};

struct SuperGopIndex
{
    std::size_t k = 0;
    friend constexpr auto operator<=>(SuperGopIndex, SuperGopIndex) = default;
};

struct RdSample
{
    RateBits rate;
    Distortion distortion;
};

/// What the encoder actually produced for one stream over one super GOP.
struct FeedbackRecord
{
    RateBits achieved_rate;
    Distortion achieved_distortion;
};

/// Ground truth for one stream in one super GOP.
struct GopTruth
{
    Complexity complexity;
    double sigma = 0.0;
    std::vector<RdSample> rd_samples;
    /// Externally supplied measurement, consumed by the trace-provided measure.
    std::optional<Complexity> provided_complexity;
};

struct StreamTrace
{
    StreamId stream;
    std::vector<GopTruth> gops;
};

struct Scenario
{
    std::string name = "scenario";
    std::vector<StreamTrace> streams;
    RateBits channel_rate;
    int super_gop_frames = 10;
    double frame_rate = 25.0;
    std::uint64_t rng_seed = 0;

    std::size_t stream_count() const { return streams.size(); }
    /// Super GOP count K, taken from the first stream (0 when empty).
    std::size_t gop_count() const;
};

struct Violation
{
    std::optional<std::size_t> stream;
    std::optional<std::size_t> gop;
    std::string rule;

    std::string describe() const;
};

RateBits bps_to_bits_per_supergop(double rate_bps, int super_gop_frames, double frame_rate);

/// Returns every broken scenario invariant; empty means the scenario is usable.
std::vector<Violation> validate_scenario(const Scenario& s);

} // namespace statmux
