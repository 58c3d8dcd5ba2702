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

#include "statmux/complexity.hpp"

#include <cmath>
#include <sstream>

namespace statmux::complexity
{

std::string_view to_string(MeasureKind kind)
{
    switch (kind) {
    case MeasureKind::oracle: return "oracle";
    case MeasureKind::biased_oracle: return "biased-oracle";
    case MeasureKind::noisy_oracle: return "noisy-oracle";
    case MeasureKind::trace_provided: return "trace-provided";
    }
    return "unknown";
}

std::optional<MeasureKind> parse_measure_kind(std::string_view name)
{
    for (MeasureKind k : {MeasureKind::oracle, MeasureKind::biased_oracle, MeasureKind::noisy_oracle,
                          MeasureKind::trace_provided})
        if (to_string(k) == name)
            return k;
    return std::nullopt;
}

void ComplexityMeasure::check(std::size_t stream_count) const
{
    if (kind == MeasureKind::biased_oracle) {
        if (bias_per_stream.size() != stream_count)
            throw Error(ErrorKind::invalid_argument, "biased-oracle: need one bias per stream");
        for (double b : bias_per_stream)
            if (!(std::isfinite(b) && b > 0.0))
                throw Error(ErrorKind::invalid_argument, "biased-oracle: biases must be positive");
    }
    if (!(std::isfinite(noise_cv) && noise_cv >= 0.0 && noise_cv < 0.5))
        throw Error(ErrorKind::invalid_argument, "noisy-oracle: noise_cv must lie in [0, 0.5)");
}

std::string ComplexityMeasure::label() const
{
    std::ostringstream os;
    os << to_string(kind);
    if (kind == MeasureKind::noisy_oracle)
        os << "(cv=" << noise_cv << ")";
    return os.str();
}

Complexity measure(const ComplexityMeasure& cm, Complexity true_c, StreamId stream, RngStream& rng,
                   std::optional<Complexity> provided)
{
    if (!true_c.valid())
        throw Error(ErrorKind::invalid_argument, "measure: true complexity must be positive");

    switch (cm.kind) {
    case MeasureKind::oracle:
        return true_c;
    case MeasureKind::biased_oracle:
        if (stream.index >= cm.bias_per_stream.size())
            throw Error(ErrorKind::invalid_argument,
                        "biased-oracle: no bias for stream " + std::to_string(stream.index));
        return Complexity(cm.bias_per_stream[stream.index] * true_c.value);
    case MeasureKind::noisy_oracle:
        return Complexity(true_c.value * rng.lognormal_factor(cm.noise_cv));
    case MeasureKind::trace_provided:
        if (!provided)
            throw Error(ErrorKind::missing_data,
                        "trace-provided: no complexity value for stream " + std::to_string(stream.index));
        return *provided;
    }
    return true_c;
}

} // namespace statmux::complexity
