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

#include "statmux/sim.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace statmux::sim
{

namespace
{

using alloc::AllocatorKind;

std::string context(const std::string& allocator, std::optional<std::size_t> stream, std::size_t gop)
{
    std::ostringstream os;
    os << "allocator " << allocator;
    if (stream)
        os << ", stream " << *stream;
    os << ", gop " << gop << ": ";
    return os.str();
}

GroundTruth realize_truth(const RunConfig& cfg)
{
    const Scenario& sc = cfg.scenario;
    const std::size_t n = sc.stream_count(), gops = sc.gop_count();
    GroundTruth t;
    t.sigma.assign(n, std::vector<double>(gops));
    t.complexity.assign(n, std::vector<double>(gops));
    t.measured_complexity.assign(n, std::vector<double>(gops));

    for (std::size_t i = 0; i < n; ++i) {
        const auto& trace = sc.streams[i].gops;
        RngStream truth_rng(cfg.seed, i, RngPurpose::truth);
        RngStream measure_rng(cfg.seed, i, RngPurpose::measure);

        std::optional<rd::SigmaDrift> drift = cfg.encoder.sigma_drift;
        if (drift && !drift->log_mean)
            drift->log_mean = std::log(trace.front().sigma);

        for (std::size_t k = 0; k < gops; ++k) {
            t.complexity[i][k] = trace[k].complexity.value;
            if (k == 0 || !drift)
                t.sigma[i][k] = trace[k].sigma;
            else
                t.sigma[i][k] = rd::step_sigma_drift(*drift, t.sigma[i][k - 1], truth_rng);

            try {
                t.measured_complexity[i][k] = complexity::measure(cfg.complexity_measure, trace[k].complexity,
                                                                  StreamId{i}, measure_rng,
                                                                  trace[k].provided_complexity).value;
            } catch (const Error& e) {
                throw Error(e.kind(), context("(measure)", i, k) + e.what());
            }
        }
    }
    return t;
}

metrics::RunSummary run_allocator(const RunConfig& cfg, const GroundTruth& truth, const std::string& name,
                                  AllocatorKind kind)
{
    const Scenario& sc = cfg.scenario;
    const std::size_t n = sc.stream_count(), gops = sc.gop_count();

    std::vector<RngStream> encode_rng;
    encode_rng.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        encode_rng.emplace_back(cfg.seed, i, RngPurpose::encode);

    std::vector<FeedbackRecord> feedback(n);
    std::vector<metrics::GopReport> reports;
    reports.reserve(gops);

    for (std::size_t k = 0; k < gops; ++k) {
        alloc::AllocationDecision decision;
        try {
            if (k == 0 || kind == AllocatorKind::uniform) {
                decision = alloc::allocate_uniform(n, sc.channel_rate);
            } else if (kind == AllocatorKind::lam) {
                std::vector<Complexity> c(n);
                for (std::size_t i = 0; i < n; ++i)
                    c[i] = Complexity(truth.measured_complexity[i][k]);
                decision = alloc::allocate_lam(c, sc.channel_rate, cfg.floor_fraction);
            } else if (kind == AllocatorKind::lfam) {
                alloc::AllocationInput in;
                in.channel_rate = sc.channel_rate;
                for (std::size_t i = 0; i < n; ++i)
                    in.streams.push_back({Complexity(truth.measured_complexity[i][k]),
                                          Complexity(truth.measured_complexity[i][k - 1]), feedback[i]});
                decision = alloc::allocate_lfam(in, cfg.floor_fraction);
            } else {
                std::vector<double> s(n);
                std::vector<Complexity> c(n);
                for (std::size_t i = 0; i < n; ++i) {
                    s[i] = truth.sigma[i][k];
                    c[i] = Complexity(truth.complexity[i][k]);
                }
                decision = alloc::allocate_oracle(s, c, sc.channel_rate, cfg.floor_fraction);
            }
        } catch (const Error& e) {
            throw Error(e.kind(), context(name, std::nullopt, k) + e.what());
        }

        std::vector<std::string> warnings;
        for (std::size_t i : decision.fallback_streams)
            warnings.push_back(context(name, i, k) + "no feedback, lfam fell back to a complexity-only weight");

        for (std::size_t i = 0; i < n; ++i) {
            const GopTruth& g = sc.streams[i].gops[k];
            rd::TrueState state{Complexity(truth.complexity[i][k]), truth.sigma[i][k], g.rd_samples};
            try {
                rd::EncodeOutcome out = rd::encode_supergop(cfg.encoder, state, decision.shares[i], encode_rng[i]);
                feedback[i] = out.feedback;
                if (out.clamped)
                    warnings.push_back(context(name, i, k) + "rate outside the sampled R-D range, distortion clamped");
            } catch (const Error& e) {
                throw Error(e.kind(), context(name, i, k) + e.what());
            }
        }

        metrics::GopReport report = metrics::make_gop_report(SuperGopIndex{k}, decision.shares, feedback);
        report.warnings = std::move(warnings);
        reports.push_back(std::move(report));
    }
    return metrics::summarize(name, std::move(reports));
}

} // namespace

const metrics::RunSummary& RunResult::summary(const std::string& allocator) const
{
    for (const auto& s : summaries)
        if (s.allocator == allocator)
            return s;
    throw Error(ErrorKind::lookup_error, "no run for allocator '" + allocator + "'");
}

RunResult run_multiplex(const RunConfig& config)
{
    const std::vector<Violation> violations = validate_scenario(config.scenario);
    if (!violations.empty()) {
        std::string msg = "invalid scenario '" + config.scenario.name + "':";
        for (const Violation& v : violations)
            msg += " [" + v.describe() + "]";
        throw Error(ErrorKind::invalid_argument, msg);
    }
    config.encoder.check();
    config.complexity_measure.check(config.scenario.stream_count());
    if (config.allocators.empty())
        throw Error(ErrorKind::invalid_argument, "run needs at least one allocator");

    std::vector<AllocatorKind> kinds;
    for (const std::string& name : config.allocators) {
        auto kind = alloc::parse_allocator(name);
        if (!kind)
            throw Error(ErrorKind::lookup_error, "unknown allocator '" + name + "'");
        kinds.push_back(*kind);
    }

    RunResult result;
    result.truth = realize_truth(config);
    for (std::size_t a = 0; a < kinds.size(); ++a)
        result.summaries.push_back(run_allocator(config, result.truth, config.allocators[a], kinds[a]));
    return result;
}

std::vector<RunResult> run_batch(std::span<const RunConfig> configs, unsigned jobs)
{
    std::vector<RunResult> results(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                results[i] = run_multiplex(configs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return results;
}

Comparison compare_runs(const RunResult& result, const std::string& baseline, const std::string& candidate)
{
    const metrics::RunSummary& base = result.summary(baseline);
    const metrics::RunSummary& cand = result.summary(candidate);

    auto paired = [](double b, double c) -> std::optional<double> {
        if (b == 0.0)
            return c == 0.0 ? std::optional<double>(0.0) : std::nullopt;
        return metrics::saving(b, c);
    };

    Comparison cmp;
    for (std::size_t k = 1; k < base.gops.size(); ++k)
        cmp.per_gop.push_back(paired(base.gops[k].variance_mse, cand.gops[k].variance_mse));
    cmp.average = paired(base.average_variance, cand.average_variance);
    return cmp;
}

namespace
{

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

Scenario make_synthetic_scenario(const SyntheticClass& cls, std::uint64_t seed)
{
    if (cls.streams < 2 || cls.gops < 2)
        throw Error(ErrorKind::invalid_argument, "synthetic class needs >= 2 streams and >= 2 super GOPs");

    Scenario sc;
    sc.name = cls.name;
    sc.super_gop_frames = cls.super_gop_frames;
    sc.frame_rate = cls.frame_rate;
    sc.channel_rate = bps_to_bits_per_supergop(cls.channel_rate_bps, cls.super_gop_frames, cls.frame_rate);
    sc.rng_seed = seed;

    // Streams of different classes must not share draws under one seed.
    const std::uint64_t class_key = fnv1a(cls.name);
    const double equal_share = sc.channel_rate.value / static_cast<double>(cls.streams);
    for (std::size_t i = 0; i < cls.streams; ++i) {
        RngStream rng(seed, class_key + i, RngPurpose::scenario);
        const double log_c0 = rng.uniform(std::log(cls.complexity_lo), std::log(cls.complexity_hi));
        const double psnr = rng.uniform(cls.psnr_lo, cls.psnr_hi);
        const double c0 = std::exp(log_c0);
        const double sigma = metrics::mse_from_psnr(psnr).mse * equal_share / (c0 * c0);

        StreamTrace st;
        st.stream = StreamId{i};
        double log_c = log_c0;
        for (std::size_t k = 0; k < cls.gops; ++k) {
            if (k > 0)
                log_c = log_c0 + cls.complexity_phi * (log_c - log_c0) + cls.complexity_sd * rng.normal();
            GopTruth g;
            g.complexity = Complexity(std::exp(log_c));
            g.sigma = sigma;
            st.gops.push_back(std::move(g));
        }
        sc.streams.push_back(std::move(st));
    }
    return sc;
}

std::vector<SyntheticClass> six_class_pack()
{
    const char* names[] = {"class_a", "class_b", "class_c", "class_d", "class_e", "class_f"};
    const std::size_t streams[] = {2, 5, 4, 4, 3, 3};
    const double bps[] = {20e6, 10e6, 4e6, 1e6, 2e6, 6e6};
    std::vector<SyntheticClass> pack;
    for (int c = 0; c < 6; ++c) {
        SyntheticClass cls;
        cls.name = names[c];
        cls.streams = streams[c];
        cls.channel_rate_bps = bps[c];
        pack.push_back(cls);
    }
    return pack;
}

} // namespace statmux::sim
