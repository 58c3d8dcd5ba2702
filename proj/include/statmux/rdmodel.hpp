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
#include <span>
#include <string_view>

namespace statmux::rd
{

// The virtual encoder. Rate and distortion follow the hyperbolic law
//   D = sigma * C^2 / R
// whose slope -dD/dR = sigma * C^2 / R^2 is the Lagrange multiplier. The
// quantizer side follows the quadratic rate model R = a*C/Q + b*C^2/Q^2 and
// lambda = c * Q^2.

struct LagrangeLambda
{
    double value = 0.0;
};

struct QStep
{
    double q = 0.0;
};

struct SigmaEstimate
{
    double sigma_hat = 0.0;
};

struct RateModelParams
{
    double a = 1.0;
    double b = 0.0;
    double c_lambda = 1.0;
};

/// Geometric AR(1) on log sigma. When `log_mean` is unset the simulator
/// anchors it per stream at the stream's initial sigma.
struct SigmaDrift
{
    double phi = 0.9;
    double innovation_sd = 0.1;
    std::optional<double> log_mean;
};

enum class EncoderKind
{
    ideal_hyperbolic,
    noisy_hyperbolic,
    quadratic_q,
    trace_replay,
};

std::string_view to_string(EncoderKind kind);
std::optional<EncoderKind> parse_encoder_kind(std::string_view name);

struct EncoderModel
{
    EncoderKind kind = EncoderKind::ideal_hyperbolic;
    RateModelParams params;
    double rate_cv = 0.0;
    double dist_cv = 0.0;
    std::optional<SigmaDrift> sigma_drift;

    /// Throws invalid_argument when a coefficient is out of range.
    void check() const;
};

struct TrueState
{
    Complexity complexity;
    double sigma = 0.0;
    std::span<const RdSample> rd_samples;
};

struct EncodeOutcome
{
    FeedbackRecord feedback;
    /// Trace replay was asked for a rate outside the sampled range.
    bool clamped = false;
};

struct HyperbolicFit
{
    double sigma_fit = 0.0;
    double r_squared = 0.0;
    double slope = 0.0; ///< of 1/D against R
};

Distortion distortion_from_rate(double sigma, Complexity c, RateBits r);

SigmaEstimate estimate_sigma(const FeedbackRecord& feedback, Complexity c_k);

RateBits rate_from_qstep(const RateModelParams& params, Complexity c, QStep q);

QStep qstep_from_rate(const RateModelParams& params, Complexity c, RateBits r);

LagrangeLambda lambda_from_qstep(const RateModelParams& params, QStep q);

LagrangeLambda lambda_from_rate(double sigma, Complexity c, RateBits r);

/// Distortion of an encode at quantizer step `q`: the hyperbolic law evaluated
/// at the first-order rate a*C/Q. With b > 0 the second-order term adds rate
/// that buys no distortion, which bends the 1/D-versus-R line.
Distortion distortion_at_qstep(const RateModelParams& params, double sigma, Complexity c, QStep q);

EncodeOutcome encode_supergop(const EncoderModel& model, const TrueState& truth,
                              RateBits allocated, RngStream& rng);

/// Log-log interpolation of D(R) over the samples, clamped to their range.
/// `clamped` is set when `rate` falls outside [min rate, max rate] or only one
/// sample exists.
Distortion interpolate_trace(std::span<const RdSample> samples, RateBits rate, bool& clamped);

double step_sigma_drift(const SigmaDrift& drift, double sigma_k, RngStream& rng);

HyperbolicFit fit_hyperbolic(std::span<const RdSample> samples, Complexity c);

} // namespace statmux::rd
