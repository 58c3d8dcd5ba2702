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

#include "doctest.h"

#include "statmux/rdmodel.hpp"

#include <cmath>
#include <vector>

using namespace statmux;
using namespace statmux::rd;

namespace
{

ErrorKind kind_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::lookup_error;
}

// Test-side least squares through the origin, long double accumulation and
// uncentered residuals, to cross-check fit_hyperbolic.
struct RefFit
{
    long double slope;
    long double r2;
};

RefFit reference_fit(const std::vector<RdSample>& s)
{
    long double num = 0, den = 0;
    for (const auto& p : s) {
        num += static_cast<long double>(p.rate.value) / p.distortion.mse;
        den += static_cast<long double>(p.rate.value) * p.rate.value;
    }
    const long double slope = num / den;
    long double mean = 0;
    for (const auto& p : s)
        mean += 1.0L / p.distortion.mse;
    mean /= s.size();
    long double res = 0, tot = 0;
    for (const auto& p : s) {
        const long double y = 1.0L / p.distortion.mse;
        res += (y - slope * p.rate.value) * (y - slope * p.rate.value);
        tot += (y - mean) * (y - mean);
    }
    return {slope, 1.0L - res / tot};
}

} // namespace

TEST_CASE("distortion_from_rate")
{
    CHECK(distortion_from_rate(2500, Complexity(2), RateBits(1000)).mse == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(distortion_from_rate(20000, Complexity(2), RateBits(8000)).mse == doctest::Approx(10.0).epsilon(1e-15));
    for (double s : {0.5, 3.0, 1234.5, 9e9})
        CHECK(distortion_from_rate(s, Complexity(1), RateBits(s)).mse == 1.0);
    CHECK(kind_of([] { distortion_from_rate(1, Complexity(1), RateBits(0)); }) == ErrorKind::division_by_zero);
}

TEST_CASE("distortion strictly decreases in rate")
{
    double prev = INFINITY;
    for (double r = 10; r < 1e7; r *= 1.7) {
        const double d = distortion_from_rate(300, Complexity(3), RateBits(r)).mse;
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("estimate_sigma inverts the hyperbolic law")
{
    CHECK(estimate_sigma({RateBits(1000), Distortion(10)}, Complexity(2)).sigma_hat == doctest::Approx(2500).epsilon(1e-15));
    CHECK(estimate_sigma({RateBits(500), Distortion(40)}, Complexity(1)).sigma_hat == doctest::Approx(20000).epsilon(1e-15));
    CHECK(estimate_sigma({RateBits(37), Distortion(2.5)}, Complexity(1)).sigma_hat == 2.5 * 37);
    CHECK(kind_of([] { estimate_sigma({RateBits(0), Distortion(10)}, Complexity(2)); }) == ErrorKind::invalid_feedback);
    CHECK(kind_of([] { estimate_sigma({RateBits(10), Distortion(0)}, Complexity(2)); }) == ErrorKind::invalid_feedback);
    CHECK(kind_of([] { estimate_sigma({RateBits(10), Distortion(1)}, Complexity(0)); }) == ErrorKind::invalid_feedback);
}

TEST_CASE("quadratic rate model and its inverse")
{
    const RateModelParams linear{1.0, 0.0, 1.0};
    const RateModelParams quad{1.0, 1.0, 1.0};

    CHECK(rate_from_qstep(linear, Complexity(100), QStep{2}).value == 50.0);
    CHECK(qstep_from_rate(linear, Complexity(100), RateBits(50)).q == 2.0);

    // x = (-1 + sqrt(201)) / 2, Q = 100 / x
    const double x = (-1.0 + std::sqrt(201.0)) / 2.0;
    CHECK(qstep_from_rate(quad, Complexity(100), RateBits(50)).q == doctest::Approx(100.0 / x).epsilon(1e-12));
    CHECK(qstep_from_rate(quad, Complexity(100), RateBits(50)).q == doctest::Approx(15.177).epsilon(1e-4));
    CHECK(rate_from_qstep(quad, Complexity(100), QStep{15.177}).value == doctest::Approx(50.0).epsilon(2e-4));

    CHECK(rate_from_qstep(linear, Complexity(200), QStep{3}).value
          == doctest::Approx(2 * rate_from_qstep(linear, Complexity(100), QStep{3}).value).epsilon(1e-15));
    CHECK(kind_of([&] { rate_from_qstep(linear, Complexity(1), QStep{0}); }) == ErrorKind::invalid_argument);

    double prev = INFINITY;
    for (double q = 0.5; q < 300; q *= 1.3) {
        const double r = rate_from_qstep(quad, Complexity(50), QStep{q}).value;
        CHECK(r < prev);
        prev = r;
    }
}

TEST_CASE("lambda relations")
{
    CHECK(lambda_from_qstep({1, 0, 1.0}, QStep{3}).value == 9.0);
    CHECK(lambda_from_qstep({1, 0, 0.85}, QStep{2}).value == doctest::Approx(3.4).epsilon(1e-15));
    CHECK(lambda_from_qstep({1, 0, 0.7}, QStep{6}).value
          == doctest::Approx(4 * lambda_from_qstep({1, 0, 0.7}, QStep{3}).value).epsilon(1e-15));

    CHECK(lambda_from_rate(2500, Complexity(2), RateBits(1000)).value == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(kind_of([] { lambda_from_rate(1, Complexity(1), RateBits(0)); }) == ErrorKind::division_by_zero);

    // Central difference of D(R) at step 1e-3 R.
    const double r = 1000, h = 1e-3 * r;
    const double slope = -(distortion_from_rate(2500, Complexity(2), RateBits(r + h)).mse
                           - distortion_from_rate(2500, Complexity(2), RateBits(r - h)).mse) / (2 * h);
    CHECK(slope == doctest::Approx(lambda_from_rate(2500, Complexity(2), RateBits(r)).value).epsilon(1e-4));
}

TEST_CASE("encode_supergop")
{
    RngStream rng(7, 0, RngPurpose::encode);
    const TrueState state{Complexity(2), 2500, {}};

    SUBCASE("ideal")
    {
        EncoderModel m;
        auto out = encode_supergop(m, state, RateBits(1000), rng);
        CHECK(out.feedback.achieved_rate.value == 1000);
        CHECK(out.feedback.achieved_distortion.mse == doctest::Approx(10).epsilon(1e-15));
        CHECK_FALSE(out.clamped);
    }
    SUBCASE("noisy with zero spread equals ideal")
    {
        EncoderModel ideal, noisy;
        noisy.kind = EncoderKind::noisy_hyperbolic;
        for (double r : {10.0, 1000.0, 3.3e6}) {
            auto a = encode_supergop(ideal, state, RateBits(r), rng);
            auto b = encode_supergop(noisy, state, RateBits(r), rng);
            CHECK(a.feedback.achieved_rate == b.feedback.achieved_rate);
            CHECK(a.feedback.achieved_distortion == b.feedback.achieved_distortion);
        }
    }
    SUBCASE("noisy factors are mean one")
    {
        EncoderModel noisy;
        noisy.kind = EncoderKind::noisy_hyperbolic;
        noisy.rate_cv = 0.2;
        noisy.dist_cv = 0.3;
        double rate_sum = 0, dist_sum = 0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            auto out = encode_supergop(noisy, state, RateBits(1000), rng);
            rate_sum += out.feedback.achieved_rate.value / 1000;
            dist_sum += out.feedback.achieved_distortion.mse / 10;
        }
        CHECK(rate_sum / n == doctest::Approx(1.0).epsilon(0.01));
        CHECK(dist_sum / n == doctest::Approx(1.0).epsilon(0.01));
    }
    SUBCASE("quadratic-q with b = 0 equals ideal")
    {
        EncoderModel q;
        q.kind = EncoderKind::quadratic_q;
        auto out = encode_supergop(q, state, RateBits(1000), rng);
        CHECK(out.feedback.achieved_rate.value == 1000);
        CHECK(out.feedback.achieved_distortion.mse == doctest::Approx(10).epsilon(1e-12));
    }
    SUBCASE("quadratic-q with b > 0 spends extra rate on no distortion")
    {
        EncoderModel q;
        q.kind = EncoderKind::quadratic_q;
        q.params.b = 0.5;
        auto out = encode_supergop(q, state, RateBits(1000), rng);
        CHECK(out.feedback.achieved_distortion.mse > 10.0);
    }
    SUBCASE("trace replay")
    {
        EncoderModel t;
        t.kind = EncoderKind::trace_replay;
        std::vector<RdSample> samples{{RateBits(100), Distortion(50)}, {RateBits(400), Distortion(20)},
                                      {RateBits(1600), Distortion(4)}};
        TrueState ts{Complexity(2), 2500, samples};
        auto at = encode_supergop(t, ts, RateBits(400), rng);
        CHECK(at.feedback.achieved_distortion.mse == 20);
        CHECK_FALSE(at.clamped);

        // midpoint in log rate of (400, 20) and (1600, 4) -> sqrt(20 * 4)
        auto mid = encode_supergop(t, ts, RateBits(800), rng);
        CHECK(mid.feedback.achieved_distortion.mse == doctest::Approx(std::sqrt(80.0)).epsilon(1e-12));

        auto lo = encode_supergop(t, ts, RateBits(10), rng);
        CHECK(lo.clamped);
        CHECK(lo.feedback.achieved_distortion.mse == 50);
        auto hi = encode_supergop(t, ts, RateBits(1e6), rng);
        CHECK(hi.clamped);
        CHECK(hi.feedback.achieved_distortion.mse == 4);

        CHECK(kind_of([&] { encode_supergop(t, state, RateBits(10), rng); }) == ErrorKind::missing_data);
    }
    SUBCASE("trace replay of an exact power law is exact")
    {
        std::vector<RdSample> samples;
        for (double r : {1e3, 3e3, 1e4, 5e4})
            samples.push_back({RateBits(r), distortion_from_rate(2500, Complexity(2), RateBits(r))});
        bool clamped = false;
        for (double r = 1e3; r <= 5e4; r *= 1.37)
            CHECK(interpolate_trace(samples, RateBits(r), clamped).mse
                  == doctest::Approx(1e4 / r).epsilon(1e-12));
    }
    SUBCASE("single sample is a clamped constant")
    {
        std::vector<RdSample> one{{RateBits(100), Distortion(50)}};
        bool clamped = false;
        CHECK(interpolate_trace(one, RateBits(100), clamped).mse == 50);
        CHECK(clamped);
    }
}

TEST_CASE("sigma drift")
{
    RngStream rng(11, 3, RngPurpose::truth);
    CHECK(step_sigma_drift({1.0, 0.0, 5.0}, 42.0, rng) == doctest::Approx(42.0).epsilon(1e-14));
    CHECK(step_sigma_drift({0.0, 0.0, std::log(300.0)}, 42.0, rng) == doctest::Approx(300.0).epsilon(1e-14));
    CHECK(kind_of([&] { step_sigma_drift({0.9, 0.1, std::nullopt}, 1.0, rng); }) == ErrorKind::invalid_argument);

    // Stationary sd of log sigma for AR(1): sd / sqrt(1 - phi^2).
    const SigmaDrift d{0.9, 0.1, std::log(1000.0)};
    double s = 1000.0;
    for (int i = 0; i < 200; ++i)
        s = step_sigma_drift(d, s, rng);
    const int n = 10000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
        s = step_sigma_drift(d, s, rng);
        const double l = std::log(s);
        sum += l;
        sum2 += l * l;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CHECK(sd == doctest::Approx(0.1 / std::sqrt(1 - 0.81)).epsilon(0.10));
}

TEST_CASE("determinism of the random parts")
{
    EncoderModel noisy;
    noisy.kind = EncoderKind::noisy_hyperbolic;
    noisy.rate_cv = 0.1;
    noisy.dist_cv = 0.1;
    RngStream a(5, 1, RngPurpose::encode), b(5, 1, RngPurpose::encode);
    for (int i = 0; i < 50; ++i) {
        auto x = encode_supergop(noisy, {Complexity(3), 77, {}}, RateBits(500), a);
        auto y = encode_supergop(noisy, {Complexity(3), 77, {}}, RateBits(500), b);
        CHECK(x.feedback.achieved_rate == y.feedback.achieved_rate);
        CHECK(x.feedback.achieved_distortion == y.feedback.achieved_distortion);
    }
}

TEST_CASE("fit_hyperbolic")
{
    std::vector<RdSample> exact;
    for (double r : {500.0, 1000.0, 2000.0, 4000.0, 8000.0, 16000.0, 32000.0})
        exact.push_back({RateBits(r), distortion_from_rate(2500, Complexity(2), RateBits(r))});
    auto fit = fit_hyperbolic(exact, Complexity(2));
    CHECK(fit.sigma_fit == doctest::Approx(2500).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    RngStream rng(2024, 0, RngPurpose::encode);
    std::vector<RdSample> noisy;
    for (const auto& p : exact)
        noisy.push_back({p.rate, Distortion(p.distortion.mse * rng.lognormal_factor(0.01))});
    auto nf = fit_hyperbolic(noisy, Complexity(2));
    const RefFit ref = reference_fit(noisy);
    CHECK(nf.slope == doctest::Approx(static_cast<double>(ref.slope)).epsilon(1e-12));
    CHECK(nf.r_squared == doctest::Approx(static_cast<double>(ref.r2)).epsilon(1e-9));
    CHECK(nf.r_squared >= 0.99);
    CHECK(nf.sigma_fit == doctest::Approx(2500).epsilon(0.02));

    std::vector<RdSample> two(exact.begin(), exact.begin() + 2);
    CHECK(kind_of([&] { fit_hyperbolic(two, Complexity(2)); }) == ErrorKind::fit_error);
    std::vector<RdSample> same(3, exact.front());
    CHECK(kind_of([&] { fit_hyperbolic(same, Complexity(2)); }) == ErrorKind::fit_error);
}

TEST_CASE("encoder model coefficient checks")
{
    EncoderModel m;
    CHECK_NOTHROW(m.check());
    m.rate_cv = 0.5;
    CHECK_THROWS_AS(m.check(), Error);
    m.rate_cv = 0.0;
    m.params.a = 0;
    CHECK_THROWS_AS(m.check(), Error);
    m.params.a = 1;
    m.sigma_drift = SigmaDrift{1.0, 0.1, std::nullopt};
    CHECK_THROWS_AS(m.check(), Error);
    CHECK(parse_encoder_kind("quadratic-q") == EncoderKind::quadratic_q);
    CHECK_FALSE(parse_encoder_kind("hm16"));
}
