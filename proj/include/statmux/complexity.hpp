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
#include "statmux/random.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace statmux::complexity
{

enum class MeasureKind
{
    oracle,
    biased_oracle,
    noisy_oracle,
    trace_provided,
};

std::string_view to_string(MeasureKind kind);
std::optional<MeasureKind> parse_measure_kind(std::string_view name);

/// Stand-in for a look-ahead complexity estimator. The simulator knows the
/// true complexity; each kind degrades it in a controlled way.
struct ComplexityMeasure
{
    MeasureKind kind = MeasureKind::oracle;
    std::vector<double> bias_per_stream; ///< biased-oracle, constant over time
    double noise_cv = 0.0;               ///< noisy-oracle

    void check(std::size_t stream_count) const;
    /// Short label used as the row name of comparison tables.
    std::string label() const;
};

/// `provided` carries the scenario-file value for the trace-provided kind.
Complexity measure(const ComplexityMeasure& cm, Complexity true_c, StreamId stream, RngStream& rng,
                   std::optional<Complexity> provided = std::nullopt);

} // namespace statmux::complexity
