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

#include "statmux/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace statmux
{

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::division_by_zero: return "division-by-zero";
    case ErrorKind::invalid_feedback: return "invalid-feedback";
    case ErrorKind::missing_data: return "missing-data";
    case ErrorKind::fit_error: return "fit-error";
    case ErrorKind::degenerate_weights: return "degenerate-weights";
    case ErrorKind::undefined_saving: return "undefined-saving";
    case ErrorKind::lookup_error: return "lookup-error";
    }
    return "unknown";
}

bool RateBits::valid() const { return std::isfinite(value) && value >= 0.0; }
bool Distortion::valid() const { return std::isfinite(mse) && mse > 0.0; }
bool Complexity::valid() const { return std::isfinite(value) && value > 0.0; }

std::size_t Scenario::gop_count() const
{
    return streams.empty() ? 0 : streams.front().gops.size();
}

std::string Violation::describe() const
{
    std::ostringstream os;
    if (stream)
        os << "stream " << *stream << ": ";
    if (gop)
        os << "gop " << *gop << ": ";
    os << rule;
    return os.str();
}

RateBits bps_to_bits_per_supergop(double rate_bps, int super_gop_frames, double frame_rate)
{
    if (!(rate_bps > 0.0) || super_gop_frames <= 0 || !(frame_rate > 0.0)
        || !std::isfinite(rate_bps) || !std::isfinite(frame_rate))
        throw Error(ErrorKind::invalid_argument,
                    "bps_to_bits_per_supergop: rate, frame count and frame rate must be positive");
    return RateBits(rate_bps * super_gop_frames / frame_rate);
}

namespace
{

void check_samples(const std::vector<RdSample>& samples, std::size_t s, std::size_t k,
                   std::vector<Violation>& out)
{
    for (const RdSample& p : samples) {
        if (!(p.rate.valid() && p.rate.value > 0.0) || !p.distortion.valid()) {
            out.push_back({s, k, "rd sample rate and distortion must be positive and finite"});
            return;
        }
    }
    std::vector<RdSample> sorted = samples;
    std::sort(sorted.begin(), sorted.end(),
              [](const RdSample& a, const RdSample& b) { return a.rate.value < b.rate.value; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].rate.value == sorted[i - 1].rate.value) {
            out.push_back({s, k, "rd samples must have distinct rates"});
            return;
        }
        if (!(sorted[i].distortion.mse < sorted[i - 1].distortion.mse)) {
            out.push_back({s, k, "rd sample distortion must strictly decrease as rate increases"});
            return;
        }
    }
}

} // namespace

std::vector<Violation> validate_scenario(const Scenario& s)
{
    std::vector<Violation> out;
    if (s.streams.size() < 2)
        out.push_back({std::nullopt, std::nullopt, "needs >= 2 streams"});
    if (!(s.channel_rate.valid() && s.channel_rate.value > 0.0))
        out.push_back({std::nullopt, std::nullopt, "channel_rate must be positive and finite"});
    if (s.super_gop_frames <= 0)
        out.push_back({std::nullopt, std::nullopt, "super_gop_frames must be positive"});
    if (!(std::isfinite(s.frame_rate) && s.frame_rate > 0.0))
        out.push_back({std::nullopt, std::nullopt, "frame_rate must be positive"});

    const std::size_t k_count = s.gop_count();
    std::vector<bool> seen(s.streams.size(), false);
    for (std::size_t i = 0; i < s.streams.size(); ++i) {
        const StreamTrace& st = s.streams[i];
        const std::size_t id = st.stream.index;
        if (id >= s.streams.size())
            out.push_back({i, std::nullopt, "stream id out of range [0, N)"});
        else if (seen[id])
            out.push_back({i, std::nullopt, "duplicate stream id"});
        else
            seen[id] = true;

        if (st.gops.size() != k_count)
            out.push_back({i, std::nullopt, "all streams need the same super GOP count"});
        if (st.gops.size() < 2)
            out.push_back({i, std::nullopt, "needs >= 2 super GOPs"});

        for (std::size_t k = 0; k < st.gops.size(); ++k) {
            const GopTruth& g = st.gops[k];
            if (!g.complexity.valid())
                out.push_back({i, k, "true complexity must be positive and finite"});
            if (!(std::isfinite(g.sigma) && g.sigma > 0.0))
                out.push_back({i, k, "true sigma must be positive and finite"});
            if (g.provided_complexity && !g.provided_complexity->valid())
                out.push_back({i, k, "provided complexity must be positive and finite"});
            check_samples(g.rd_samples, i, k, out);
        }
    }
    return out;
}

} // namespace statmux
