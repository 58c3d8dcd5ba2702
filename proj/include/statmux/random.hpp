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

#include <cmath>
#include <cstdint>
#include <random>

namespace statmux
{

/// Independent random substreams of a run. Each (seed, stream, purpose)
/// triple names its own generator so draws never couple across streams.
enum class RngPurpose : std::uint32_t
{
    truth = 1,
    measure = 2,
    encode = 3,
    scenario = 4,
    bias = 5,
};

class RngStream
{
public:
    RngStream(std::uint64_t seed, std::uint64_t stream, RngPurpose purpose)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          static_cast<std::uint32_t>(purpose)};
        engine_.seed(seq);
    }

    double normal()
    {
        std::normal_distribution<double> dist(0.0, 1.0);
        return dist(engine_);
    }

    double uniform(double lo, double hi)
    {
        std::uniform_real_distribution<double> dist(lo, hi);
        return dist(engine_);
    }

    /// Mean-one lognormal factor with coefficient of variation `cv`.
    /// Always consumes one normal draw, so cv = 0 yields exactly 1.0
    /// without shifting the stream relative to a noisy configuration.
    double lognormal_factor(double cv)
    {
        const double z = normal();
        const double s2 = std::log1p(cv * cv);
        return std::exp(-0.5 * s2 + std::sqrt(s2) * z);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace statmux
