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

#include "statmux/alloc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace statmux::alloc
{

namespace
{

void check_channel(RateBits channel_rate)
{
    if (!(channel_rate.valid() && channel_rate.value > 0.0))
        throw Error(ErrorKind::invalid_argument, "allocator: channel rate must be positive");
}

void check_count(std::size_t n)
{
    if (n < 2)
        throw Error(ErrorKind::invalid_argument, "allocator: needs at least 2 streams");
}

AllocationDecision finish(AllocatorKind kind, std::vector<double> weights, RateBits channel_rate,
                          double floor_fraction)
{
    AllocationDecision d;
    d.allocator = std::string(to_string(kind));
    d.shares = apportion(weights, channel_rate, floor_fraction);
    d.budget_bits = largest_remainder(d.shares, std::llround(channel_rate.value));
    d.weights = std::move(weights);
    return d;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::string_view to_string(AllocatorKind kind)
{
    switch (kind) {
    case AllocatorKind::lam: return "lam";
    case AllocatorKind::lfam: return "lfam";
    case AllocatorKind::oracle: return "oracle";
    case AllocatorKind::uniform: return "uniform";
    }
    return "unknown";
}

std::optional<AllocatorKind> parse_allocator(std::string_view name)
{
    for (AllocatorKind k : {AllocatorKind::lam, AllocatorKind::lfam, AllocatorKind::oracle, AllocatorKind::uniform})
        if (to_string(k) == name)
            return k;
    return std::nullopt;
}

std::vector<RateBits> apportion(std::span<const double> weights, RateBits channel_rate, double floor_fraction)
{
    check_channel(channel_rate);
    check_count(weights.size());
    if (!(floor_fraction >= 0.0 && floor_fraction < 1.0))
        throw Error(ErrorKind::invalid_argument, "allocator: floor_fraction must lie in [0, 1)");
    for (double w : weights)
        if (!(std::isfinite(w) && w >= 0.0))
            throw Error(ErrorKind::invalid_argument, "allocator: weights must be finite and non-negative");

    const std::size_t n = weights.size();
    const double floor_share = floor_fraction * channel_rate.value / static_cast<double>(n);
    std::vector<bool> pinned(n, false);
    std::vector<double> shares(n, 0.0);

    for (;;) {
        std::size_t pinned_count = 0;
        double free_weight = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i])
                ++pinned_count;
            else
                free_weight += weights[i];
        }
        if (!(free_weight > 0.0))
            throw Error(ErrorKind::degenerate_weights, "allocator: all weights are zero");

        const double remaining = channel_rate.value - static_cast<double>(pinned_count) * floor_share;
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (pinned[i]) {
                shares[i] = floor_share;
                continue;
            }
            shares[i] = weights[i] * remaining / free_weight;
            if (shares[i] < floor_share) {
                pinned[i] = true;
                changed = true;
            }
        }
        if (!changed)
            break;
    }

    std::vector<RateBits> out;
    out.reserve(n);
    for (double s : shares)
        out.emplace_back(s);
    return out;
}

std::vector<std::int64_t> largest_remainder(std::span<const RateBits> shares, std::int64_t total)
{
    const std::size_t n = shares.size();
    std::vector<std::int64_t> bits(n);
    std::vector<double> frac(n);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = std::floor(shares[i].value);
        bits[i] = static_cast<std::int64_t>(f);
        frac[i] = shares[i].value - f;
        assigned += bits[i];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::int64_t left = total - assigned;
    if (left >= 0) {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
        for (std::size_t j = 0; left > 0; j = (j + 1) % n, --left)
            ++bits[order[j]];
    } else {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] < frac[b]; });
        for (std::size_t j = 0; left < 0; j = (j + 1) % n, ++left)
            --bits[order[j]];
    }
    return bits;
}

AllocationDecision allocate_lam(std::span<const Complexity> c_next, RateBits channel_rate, double floor_fraction)
{
    check_count(c_next.size());
    std::vector<double> w;
    w.reserve(c_next.size());
    for (Complexity c : c_next) {
        if (!c.valid())
            throw Error(ErrorKind::invalid_argument, "lam: complexities must be positive");
        w.push_back(c.value);
    }
    return finish(AllocatorKind::lam, std::move(w), channel_rate, floor_fraction);
}

AllocationDecision allocate_lfam(const AllocationInput& input, double floor_fraction)
{
    const std::size_t n = input.streams.size();
    check_count(n);

    // X = D_k * R_k * (C_{k+1} / C_k)^2. The complexity ratio is formed first
    // so any constant per-stream scale on the measure cancels in one rounding.
    std::vector<double> w(n, 0.0);
    std::vector<double> fed_levels;
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < n; ++i) {
        const StreamInput& s = input.streams[i];
        if (!s.c_next.valid() || !s.c_prev.valid())
            throw Error(ErrorKind::invalid_argument, "lfam: complexities must be positive");
        if (!s.feedback) {
            missing.push_back(i);
            continue;
        }
        const double r = s.feedback->achieved_rate.value;
        const double d = s.feedback->achieved_distortion.mse;
        if (!(std::isfinite(r) && r > 0.0 && std::isfinite(d) && d > 0.0))
            throw Error(ErrorKind::invalid_feedback,
                        "lfam: stream " + std::to_string(i) + " fed back a non-positive rate or distortion");
        const double ratio = s.c_next.value / s.c_prev.value;
        w[i] = d * r * ratio * ratio;
        fed_levels.push_back(d * r / (s.c_prev.value * s.c_prev.value));
    }

    if (!missing.empty()) {
        const double level = fed_levels.empty() ? 1.0 : median(fed_levels);
        for (std::size_t i : missing) {
            const double c = input.streams[i].c_next.value;
            w[i] = c * c * level;
        }
    }

    if (std::none_of(w.begin(), w.end(), [](double x) { return x > 0.0; }))
        throw Error(ErrorKind::degenerate_weights, "lfam: every weight is zero");

    AllocationDecision d = finish(AllocatorKind::lfam, std::move(w), input.channel_rate, floor_fraction);
    d.fallback_streams = std::move(missing);
    return d;
}

AllocationDecision allocate_oracle(std::span<const double> sigma_true, std::span<const Complexity> c_true_next,
                                   RateBits channel_rate, double floor_fraction)
{
    check_count(c_true_next.size());
    if (sigma_true.size() != c_true_next.size())
        throw Error(ErrorKind::invalid_argument, "oracle: sigma and complexity lists differ in length");
    std::vector<double> w;
    w.reserve(c_true_next.size());
    for (std::size_t i = 0; i < c_true_next.size(); ++i) {
        const double s = sigma_true[i], c = c_true_next[i].value;
        if (!(std::isfinite(s) && s > 0.0) || !c_true_next[i].valid())
            throw Error(ErrorKind::invalid_argument, "oracle: sigma and complexity must be positive");
        w.push_back(s * c * c);
    }
    return finish(AllocatorKind::oracle, std::move(w), channel_rate, floor_fraction);
}

AllocationDecision allocate_uniform(std::size_t n, RateBits channel_rate)
{
    check_count(n);
    check_channel(channel_rate);
    return finish(AllocatorKind::uniform, std::vector<double>(n, 1.0), channel_rate, 0.0);
}

} // namespace statmux::alloc
