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

#include "statmux/rdmodel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace statmux::rd
{

namespace
{

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

void require(bool ok, ErrorKind kind, const char* what)
{
    if (!ok)
        throw Error(kind, what);
}

} // namespace

std::string_view to_string(EncoderKind kind)
{
    switch (kind) {
    case EncoderKind::ideal_hyperbolic: return "ideal-hyperbolic";
    case EncoderKind::noisy_hyperbolic: return "noisy-hyperbolic";
    case EncoderKind::quadratic_q: return "quadratic-q";
    case EncoderKind::trace_replay: return "trace-replay";
    }
    return "unknown";
}

std::optional<EncoderKind> parse_encoder_kind(std::string_view name)
{
    for (EncoderKind k : {EncoderKind::ideal_hyperbolic, EncoderKind::noisy_hyperbolic,
                          EncoderKind::quadratic_q, EncoderKind::trace_replay})
        if (to_string(k) == name)
            return k;
    return std::nullopt;
}

void EncoderModel::check() const
{
    require(positive(params.a), ErrorKind::invalid_argument, "encoder: a must be positive");
    require(std::isfinite(params.b) && params.b >= 0.0, ErrorKind::invalid_argument,
            "encoder: b must be non-negative");
    require(positive(params.c_lambda), ErrorKind::invalid_argument, "encoder: c_lambda must be positive");
    require(std::isfinite(rate_cv) && rate_cv >= 0.0 && rate_cv < 0.5, ErrorKind::invalid_argument,
            "encoder: rate_cv must lie in [0, 0.5)");
    require(std::isfinite(dist_cv) && dist_cv >= 0.0 && dist_cv < 0.5, ErrorKind::invalid_argument,
            "encoder: dist_cv must lie in [0, 0.5)");
    if (sigma_drift) {
        require(sigma_drift->phi >= 0.0 && sigma_drift->phi < 1.0, ErrorKind::invalid_argument,
                "encoder: drift phi must lie in [0, 1)");
        require(std::isfinite(sigma_drift->innovation_sd) && sigma_drift->innovation_sd >= 0.0,
                ErrorKind::invalid_argument, "encoder: drift innovation_sd must be non-negative");
        require(!sigma_drift->log_mean || std::isfinite(*sigma_drift->log_mean),
                ErrorKind::invalid_argument, "encoder: drift log_mean must be finite");
    }
}

Distortion distortion_from_rate(double sigma, Complexity c, RateBits r)
{
    require(r.value != 0.0, ErrorKind::division_by_zero, "distortion_from_rate: rate is zero");
    require(positive(r.value) && positive(sigma) && c.valid(), ErrorKind::invalid_argument,
            "distortion_from_rate: sigma, complexity and rate must be positive");
    return Distortion(sigma * c.value * c.value / r.value);
}

SigmaEstimate estimate_sigma(const FeedbackRecord& feedback, Complexity c_k)
{
    require(positive(feedback.achieved_rate.value) && feedback.achieved_distortion.valid() && c_k.valid(),
            ErrorKind::invalid_feedback, "estimate_sigma: feedback rate, distortion and complexity must be positive");
    return {feedback.achieved_distortion.mse * feedback.achieved_rate.value / (c_k.value * c_k.value)};
}

RateBits rate_from_qstep(const RateModelParams& params, Complexity c, QStep q)
{
    require(positive(q.q), ErrorKind::invalid_argument, "rate_from_qstep: qstep must be positive");
    const double x = c.value / q.q;
    return RateBits(params.a * x + params.b * x * x);
}

QStep qstep_from_rate(const RateModelParams& params, Complexity c, RateBits r)
{
    require(positive(r.value), ErrorKind::invalid_argument, "qstep_from_rate: rate must be positive");
    require(positive(params.a) && params.b >= 0.0 && c.valid(), ErrorKind::invalid_argument,
            "qstep_from_rate: invalid model parameters");
    double x;
    if (params.b > 0.0) {
        // Positive root of b x^2 + a x - R = 0, written in the cancellation-free form.
        const double disc = std::sqrt(params.a * params.a + 4.0 * params.b * r.value);
        x = 2.0 * r.value / (params.a + disc);
    } else {
        x = r.value / params.a;
    }
    return {c.value / x};
}

LagrangeLambda lambda_from_qstep(const RateModelParams& params, QStep q)
{
    require(positive(q.q), ErrorKind::invalid_argument, "lambda_from_qstep: qstep must be positive");
    return {params.c_lambda * q.q * q.q};
}

LagrangeLambda lambda_from_rate(double sigma, Complexity c, RateBits r)
{
    require(r.value != 0.0, ErrorKind::division_by_zero, "lambda_from_rate: rate is zero");
    require(positive(r.value) && positive(sigma) && c.valid(), ErrorKind::invalid_argument,
            "lambda_from_rate: sigma, complexity and rate must be positive");
    return {sigma * c.value * c.value / (r.value * r.value)};
}

Distortion distortion_at_qstep(const RateModelParams& params, double sigma, Complexity c, QStep q)
{
    require(positive(q.q), ErrorKind::invalid_argument, "distortion_at_qstep: qstep must be positive");
    const RateBits first_order(params.a * c.value / q.q);
    return distortion_from_rate(sigma, c, first_order);
}

Distortion interpolate_trace(std::span<const RdSample> samples, RateBits rate, bool& clamped)
{
    require(!samples.empty(), ErrorKind::missing_data, "trace replay: no rd samples for this super GOP");
    require(positive(rate.value), ErrorKind::invalid_argument, "trace replay: rate must be positive");

    std::vector<RdSample> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const RdSample& a, const RdSample& b) { return a.rate.value < b.rate.value; });

    clamped = false;
    if (sorted.size() == 1) {
        clamped = true;
        return sorted.front().distortion;
    }
    if (rate.value <= sorted.front().rate.value) {
        clamped = rate.value < sorted.front().rate.value;
        return sorted.front().distortion;
    }
    if (rate.value >= sorted.back().rate.value) {
        clamped = rate.value > sorted.back().rate.value;
        return sorted.back().distortion;
    }

    auto hi = std::upper_bound(sorted.begin(), sorted.end(), rate.value,
                               [](double r, const RdSample& s) { return r < s.rate.value; });
    auto lo = hi - 1;
    if (lo->rate.value == rate.value)
        return lo->distortion;

    const double x0 = std::log(lo->rate.value), x1 = std::log(hi->rate.value);
    const double y0 = std::log(lo->distortion.mse), y1 = std::log(hi->distortion.mse);
    const double t = (std::log(rate.value) - x0) / (x1 - x0);
    return Distortion(std::exp(y0 + t * (y1 - y0)));
}

EncodeOutcome encode_supergop(const EncoderModel& model, const TrueState& truth,
                              RateBits allocated, RngStream& rng)
{
    require(positive(allocated.value), ErrorKind::invalid_argument, "encode_supergop: allocated rate must be positive");

    EncodeOutcome out;
    switch (model.kind) {
    case EncoderKind::ideal_hyperbolic:
        out.feedback = {allocated, distortion_from_rate(truth.sigma, truth.complexity, allocated)};
        break;
    case EncoderKind::noisy_hyperbolic: {
        const double rate_factor = rng.lognormal_factor(model.rate_cv);
        const double dist_factor = rng.lognormal_factor(model.dist_cv);
        const Distortion d = distortion_from_rate(truth.sigma, truth.complexity, allocated);
        out.feedback = {RateBits(allocated.value * rate_factor), Distortion(d.mse * dist_factor)};
        break;
    }
    case EncoderKind::quadratic_q: {
        const QStep q = qstep_from_rate(model.params, truth.complexity, allocated);
        out.feedback = {allocated, distortion_at_qstep(model.params, truth.sigma, truth.complexity, q)};
        break;
    }
    case EncoderKind::trace_replay:
        out.feedback = {allocated, interpolate_trace(truth.rd_samples, allocated, out.clamped)};
        break;
    }
    return out;
}

double step_sigma_drift(const SigmaDrift& drift, double sigma_k, RngStream& rng)
{
    require(positive(sigma_k), ErrorKind::invalid_argument, "step_sigma_drift: sigma must be positive");
    require(drift.log_mean.has_value(), ErrorKind::invalid_argument, "step_sigma_drift: log_mean not set");
    const double eps = drift.innovation_sd * rng.normal();
    const double log_next = (1.0 - drift.phi) * *drift.log_mean + drift.phi * std::log(sigma_k) + eps;
    return std::exp(log_next);
}

HyperbolicFit fit_hyperbolic(std::span<const RdSample> samples, Complexity c)
{
    require(samples.size() >= 3, ErrorKind::fit_error, "fit_hyperbolic: needs at least 3 samples");
    require(c.valid(), ErrorKind::invalid_argument, "fit_hyperbolic: complexity must be positive");
    for (const RdSample& s : samples)
        require(positive(s.rate.value) && s.distortion.valid(), ErrorKind::fit_error,
                "fit_hyperbolic: samples must be positive");
    const bool distinct = std::any_of(samples.begin(), samples.end(), [&](const RdSample& s) {
        return s.rate.value != samples.front().rate.value;
    });
    require(distinct, ErrorKind::fit_error, "fit_hyperbolic: samples need distinct rates");

    // 1/D = slope * R, least squares through the origin.
    double sxy = 0.0, sxx = 0.0, sy = 0.0;
    for (const RdSample& s : samples) {
        const double x = s.rate.value, y = 1.0 / s.distortion.mse;
        sxy += x * y;
        sxx += x * x;
        sy += y;
    }
    const double slope = sxy / sxx;
    const double mean_y = sy / static_cast<double>(samples.size());

    double ss_res = 0.0, ss_tot = 0.0;
    for (const RdSample& s : samples) {
        const double x = s.rate.value, y = 1.0 / s.distortion.mse;
        ss_res += (y - slope * x) * (y - slope * x);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    r2 = std::clamp(r2, 0.0, 1.0);

    require(slope > 0.0, ErrorKind::fit_error, "fit_hyperbolic: non-positive slope");
    return {1.0 / (slope * c.value * c.value), r2, slope};
}

} // namespace statmux::rd
