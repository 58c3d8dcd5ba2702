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

#include "statmux/alloc.hpp"
#include "statmux/rdmodel.hpp"

#include <numeric>

using namespace statmux;
using namespace statmux::alloc;

namespace
{

std::vector<double> values(const AllocationDecision& d)
{
    std::vector<double> v;
    for (RateBits r : d.shares)
        v.push_back(r.value);
    return v;
}

double total(const AllocationDecision& d)
{
    double s = 0;
    for (RateBits r : d.shares)
        s += r.value;
    return s;
}

std::vector<Complexity> cs(std::initializer_list<double> v)
{
    std::vector<Complexity> out;
    for (double x : v)
        out.emplace_back(x);
    return out;
}

} // namespace

TEST_CASE("lam splits in proportion to complexity")
{
    auto d = allocate_lam(cs({2, 1, 1}), RateBits(8000));
    CHECK(values(d) == std::vector<double>{4000, 2000, 2000});
    CHECK(d.allocator == "lam");
    CHECK(d.weights == std::vector<double>{2, 1, 1});

    auto eq = allocate_lam(cs({5, 5}), RateBits(12345.5));
    CHECK(eq.shares[0] == eq.shares[1]);

    auto a = allocate_lam(cs({3, 1.5, 7}), RateBits(1e6));
    auto b = allocate_lam(cs({30, 15, 70}), RateBits(1e6));
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(a.shares[i].value == doctest::Approx(b.shares[i].value).epsilon(1e-15));

    CHECK_THROWS_AS(allocate_lam(cs({1, 0}), RateBits(10)), Error);
    CHECK_THROWS_AS(allocate_lam(cs({1}), RateBits(10)), Error);
}

TEST_CASE("lfam worked example equalizes the next super GOP")
{
    AllocationInput in;
    in.channel_rate = RateBits(9000);
    in.streams.push_back({Complexity(2), Complexity(2), FeedbackRecord{RateBits(1000), Distortion(10)}});
    in.streams.push_back({Complexity(2), Complexity(1), FeedbackRecord{RateBits(500), Distortion(40)}});
    auto d = allocate_lfam(in);
    CHECK(d.weights[0] == doctest::Approx(10000).epsilon(1e-15));
    CHECK(d.weights[1] == doctest::Approx(80000).epsilon(1e-15));
    CHECK(d.shares[0].value == doctest::Approx(1000).epsilon(1e-15));
    CHECK(d.shares[1].value == doctest::Approx(8000).epsilon(1e-15));
    CHECK(d.budget_bits == std::vector<std::int64_t>{1000, 8000});

    // sigma of stream 0 is 2500, of stream 1 is 20000; both land on MSE 10.
    CHECK(rd::distortion_from_rate(2500, Complexity(2), d.shares[0]).mse == doctest::Approx(10).epsilon(1e-14));
    CHECK(rd::distortion_from_rate(20000, Complexity(2), d.shares[1]).mse == doctest::Approx(10).epsilon(1e-14));
}

TEST_CASE("lfam symmetry and complexity-scale cancellation")
{
    AllocationInput in;
    in.channel_rate = RateBits(1e5);
    const FeedbackRecord fb{RateBits(700), Distortion(12)};
    in.streams = {{Complexity(3), Complexity(2), fb}, {Complexity(3), Complexity(2), fb}};
    auto d = allocate_lfam(in);
    CHECK(d.shares[0] == d.shares[1]);

    in.streams = {{Complexity(3), Complexity(2), fb},
                  {Complexity(1.25), Complexity(4.5), FeedbackRecord{RateBits(300), Distortion(30)}},
                  {Complexity(5), Complexity(4), FeedbackRecord{RateBits(9000), Distortion(3)}}};
    auto base = allocate_lfam(in);
    // kappa = 1.5 is exact on these dyadic complexities, so the cancellation is bitwise.
    in.streams[1].c_next = Complexity(1.25 * 1.5);
    in.streams[1].c_prev = Complexity(4.5 * 1.5);
    auto scaled = allocate_lfam(in);
    CHECK(values(base) == values(scaled));
}

TEST_CASE("lfam input errors and fallback")
{
    AllocationInput in;
    in.channel_rate = RateBits(1000);
    in.streams = {{Complexity(1), Complexity(1), FeedbackRecord{RateBits(0), Distortion(1)}},
                  {Complexity(1), Complexity(1), FeedbackRecord{RateBits(10), Distortion(1)}}};
    try {
        allocate_lfam(in);
        FAIL("expected invalid feedback");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_feedback);
    }

    // Stream 2 has no feedback: its level is the median D*R/C^2 of the others.
    in.streams = {{Complexity(2), Complexity(1), FeedbackRecord{RateBits(100), Distortion(1)}},
                  {Complexity(1), Complexity(1), FeedbackRecord{RateBits(300), Distortion(1)}},
                  {Complexity(2), Complexity(2), std::nullopt}};
    auto d = allocate_lfam(in, 0.0);
    CHECK(d.fallback_streams == std::vector<std::size_t>{2});
    CHECK(d.weights[2] == doctest::Approx(4 * 200.0));
    CHECK(total(d) == doctest::Approx(1000));
}

TEST_CASE("oracle allocation equalizes distortion")
{
    const std::vector<double> sigma{2500, 20000};
    auto d = allocate_oracle(sigma, cs({2, 2}), RateBits(9000));
    CHECK(d.shares[0].value == doctest::Approx(1000).epsilon(1e-15));
    CHECK(d.shares[1].value == doctest::Approx(8000).epsilon(1e-15));

    auto u = allocate_oracle(std::vector<double>{4, 1}, cs({1, 2}), RateBits(600));
    CHECK(u.shares[0] == u.shares[1]);

    const std::vector<double> s3{100, 900, 30};
    const auto c3 = cs({1.7, 0.4, 3.3});
    auto e = allocate_oracle(s3, c3, RateBits(5e5));
    double level = 0;
    for (std::size_t i = 0; i < 3; ++i)
        level += s3[i] * c3[i].value * c3[i].value;
    level /= 5e5;
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(rd::distortion_from_rate(s3[i], c3[i], e.shares[i]).mse == doctest::Approx(level).epsilon(1e-12));
}

TEST_CASE("uniform")
{
    auto d = allocate_uniform(4, RateBits(1'600'000));
    CHECK(values(d) == std::vector<double>(4, 400'000));
    CHECK(values(allocate_uniform(2, RateBits(9000))) == std::vector<double>{4500, 4500});
    CHECK(total(allocate_uniform(4, RateBits(1'600'000))) == 1'600'000);
    CHECK_THROWS_AS(allocate_uniform(1, RateBits(10)), Error);
}

TEST_CASE("floor rule keeps every stream above the floor and conserves the channel")
{
    auto d = allocate_lam(cs({1000, 1, 1e-3}), RateBits(3000), 0.05);
    const double floor = 0.05 * 3000 / 3;
    CHECK(d.shares[1].value == doctest::Approx(floor));
    CHECK(d.shares[2].value == doctest::Approx(floor));
    CHECK(d.shares[0].value == doctest::Approx(3000 - 2 * floor));
    CHECK(total(d) == doctest::Approx(3000).epsilon(1e-15));

    auto none = allocate_lam(cs({1000, 1}), RateBits(3000), 0.0);
    CHECK(none.shares[1].value == doctest::Approx(3000.0 / 1001));
    CHECK_THROWS_AS(allocate_lam(cs({1, 1}), RateBits(10), 1.0), Error);
}

TEST_CASE("largest remainder budgets sum exactly")
{
    auto d = allocate_lam(cs({1, 1, 1}), RateBits(1000));
    CHECK(std::accumulate(d.budget_bits.begin(), d.budget_bits.end(), std::int64_t{0}) == 1000);
    CHECK(d.budget_bits == std::vector<std::int64_t>{334, 333, 333});

    std::vector<RateBits> shares{RateBits(0.4), RateBits(0.4), RateBits(0.2)};
    CHECK(largest_remainder(shares, 1) == std::vector<std::int64_t>{1, 0, 0});
    CHECK(largest_remainder(shares, 0) == std::vector<std::int64_t>{0, 0, 0});
}
