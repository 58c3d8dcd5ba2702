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

#include "statmux/core.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace statmux::alloc
{

inline constexpr double default_floor_fraction = 0.05;

enum class AllocatorKind
{
    lam,     ///< shares proportional to look-ahead complexity
    lfam,    ///< look-ahead complexity corrected by encoder feedback
    oracle,  ///< true sigma * C^2, an upper bound on what feedback can reach
    uniform, ///< equal split
};

std::string_view to_string(AllocatorKind kind);
std::optional<AllocatorKind> parse_allocator(std::string_view name);

struct StreamInput
{
    Complexity c_next; ///< look-ahead complexity of the super GOP being allocated
    Complexity c_prev; ///< complexity measured for the super GOP just coded
    std::optional<FeedbackRecord> feedback;
};

struct AllocationInput
{
    std::vector<StreamInput> streams;
    RateBits channel_rate;
};

struct AllocationDecision
{
    std::string allocator;
    std::vector<RateBits> shares;
    /// Pre-normalization weight of each stream (C, X or sigma*C^2).
    std::vector<double> weights;
    /// Integer budgets by largest remainder; they sum to round(channel_rate).
    std::vector<std::int64_t> budget_bits;
    /// Streams whose LFAM weight came from the missing-feedback fallback.
    std::vector<std::size_t> fallback_streams;
};

/// Splits `channel_rate` proportionally to `weights` while guaranteeing every
/// stream at least floor_fraction * channel_rate / N. Streams pinned at the
/// floor drop out and the rest is re-split among the others until stable.
std::vector<RateBits> apportion(std::span<const double> weights, RateBits channel_rate,
                                double floor_fraction);

std::vector<std::int64_t> largest_remainder(std::span<const RateBits> shares, std::int64_t total);

AllocationDecision allocate_lam(std::span<const Complexity> c_next, RateBits channel_rate,
                                double floor_fraction = default_floor_fraction);

AllocationDecision allocate_lfam(const AllocationInput& input,
                                 double floor_fraction = default_floor_fraction);

AllocationDecision allocate_oracle(std::span<const double> sigma_true, std::span<const Complexity> c_true_next,
                                   RateBits channel_rate, double floor_fraction = default_floor_fraction);

AllocationDecision allocate_uniform(std::size_t n, RateBits channel_rate);

} // namespace statmux::alloc
