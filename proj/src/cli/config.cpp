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

#include "statmux/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace statmux::cli
{

namespace
{

[[noreturn]] void fail(const YAML::Node& at, const std::string& field, const std::string& msg)
{
    std::ostringstream os;
    const YAML::Mark m = at.Mark();
    if (!m.is_null())
        os << "line " << m.line + 1 << ": ";
    os << field << ": " << msg;
    throw InputError(os.str());
}

void allow_keys(const YAML::Node& map, const std::string& path, std::initializer_list<const char*> keys)
{
    if (!map.IsMap())
        fail(map, path, "expected a mapping");
    for (const auto& kv : map) {
        const std::string key = kv.first.as<std::string>();
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
            fail(kv.first, path.empty() ? key : path + "." + key, "unknown key");
    }
}

std::string join(const std::string& path, const char* key)
{
    return path.empty() ? std::string(key) : path + "." + key;
}

double number(const YAML::Node& n, const std::string& field)
{
    if (!n.IsScalar())
        fail(n, field, "expected a number");
    try {
        const double v = n.as<double>();
        if (!std::isfinite(v))
            fail(n, field, "must be finite");
        return v;
    } catch (const YAML::BadConversion&) {
        fail(n, field, "expected a number, got '" + n.Scalar() + "'");
    }
}

double positive(const YAML::Node& n, const std::string& field)
{
    const double v = number(n, field);
    if (!(v > 0.0))
        fail(n, field, "must be positive");
    return v;
}

double in_range(const YAML::Node& n, const std::string& field, double lo, double hi, const char* text)
{
    const double v = number(n, field);
    if (!(v >= lo && v < hi))
        fail(n, field, std::string("must lie in ") + text);
    return v;
}

std::uint64_t unsigned_int(const YAML::Node& n, const std::string& field)
{
    if (!n.IsScalar())
        fail(n, field, "expected a non-negative integer");
    try {
        const std::string& s = n.Scalar();
        if (s.empty() || s.front() == '-')
            fail(n, field, "expected a non-negative integer");
        return n.as<std::uint64_t>();
    } catch (const YAML::BadConversion&) {
        fail(n, field, "expected a non-negative integer, got '" + n.Scalar() + "'");
    }
}

std::string text(const YAML::Node& n, const std::string& field)
{
    if (!n.IsScalar())
        fail(n, field, "expected a string");
    return n.Scalar();
}

std::pair<double, double> range(const YAML::Node& n, const std::string& field)
{
    if (!n.IsSequence() || n.size() != 2)
        fail(n, field, "expected [low, high]");
    const double lo = number(n[0], field + "[0]"), hi = number(n[1], field + "[1]");
    if (!(lo <= hi))
        fail(n, field, "low must not exceed high");
    return {lo, hi};
}

/// A scalar or a list of length `count`, expanded to a list.
std::vector<double> per_gop(const YAML::Node& n, const std::string& field, std::size_t count)
{
    if (n.IsScalar())
        return std::vector<double>(count, positive(n, field));
    if (!n.IsSequence())
        fail(n, field, "expected a number or a list");
    if (n.size() != count)
        fail(n, field, "expected " + std::to_string(count) + " values, one per super GOP");
    std::vector<double> out;
    for (std::size_t k = 0; k < n.size(); ++k)
        out.push_back(positive(n[k], field + "[" + std::to_string(k) + "]"));
    return out;
}

rd::EncoderModel parse_encoder(const YAML::Node& n)
{
    const std::string path = "encoder";
    allow_keys(n, path, {"kind", "a", "b", "c_lambda", "rate_cv", "dist_cv", "drift"});
    rd::EncoderModel m;
    if (n["kind"]) {
        const std::string k = text(n["kind"], "encoder.kind");
        auto kind = rd::parse_encoder_kind(k);
        if (!kind)
            fail(n["kind"], "encoder.kind",
                 "unknown kind '" + k + "' (ideal-hyperbolic, noisy-hyperbolic, quadratic-q, trace-replay)");
        m.kind = *kind;
    }
    if (n["a"])
        m.params.a = positive(n["a"], "encoder.a");
    if (n["b"]) {
        m.params.b = number(n["b"], "encoder.b");
        if (m.params.b < 0.0)
            fail(n["b"], "encoder.b", "must be non-negative");
    }
    if (n["c_lambda"])
        m.params.c_lambda = positive(n["c_lambda"], "encoder.c_lambda");
    if (n["rate_cv"])
        m.rate_cv = in_range(n["rate_cv"], "encoder.rate_cv", 0.0, 0.5, "[0, 0.5)");
    if (n["dist_cv"])
        m.dist_cv = in_range(n["dist_cv"], "encoder.dist_cv", 0.0, 0.5, "[0, 0.5)");
    if (const YAML::Node d = n["drift"]) {
        allow_keys(d, "encoder.drift", {"phi", "innovation_sd", "log_mean"});
        rd::SigmaDrift drift;
        if (d["phi"])
            drift.phi = in_range(d["phi"], "encoder.drift.phi", 0.0, 1.0, "[0, 1)");
        if (d["innovation_sd"]) {
            drift.innovation_sd = number(d["innovation_sd"], "encoder.drift.innovation_sd");
            if (drift.innovation_sd < 0.0)
                fail(d["innovation_sd"], "encoder.drift.innovation_sd", "must be non-negative");
        }
        if (d["log_mean"])
            drift.log_mean = number(d["log_mean"], "encoder.drift.log_mean");
        m.sigma_drift = drift;
    }
    return m;
}

void parse_complexity(const YAML::Node& n, ConfigFile& cfg)
{
    allow_keys(n, "complexity", {"kind", "label", "bias", "bias_range", "noise_cv"});
    auto& cm = cfg.measure;
    if (n["kind"]) {
        const std::string k = text(n["kind"], "complexity.kind");
        auto kind = complexity::parse_measure_kind(k);
        if (!kind)
            fail(n["kind"], "complexity.kind",
                 "unknown kind '" + k + "' (oracle, biased-oracle, noisy-oracle, trace-provided)");
        cm.kind = *kind;
    }
    if (n["label"])
        cfg.label = text(n["label"], "complexity.label");
    if (n["noise_cv"])
        cm.noise_cv = in_range(n["noise_cv"], "complexity.noise_cv", 0.0, 0.5, "[0, 0.5)");
    if (n["bias"]) {
        const YAML::Node b = n["bias"];
        if (!b.IsSequence())
            fail(b, "complexity.bias", "expected a list, one bias per stream");
        for (std::size_t i = 0; i < b.size(); ++i)
            cm.bias_per_stream.push_back(positive(b[i], "complexity.bias[" + std::to_string(i) + "]"));
    }
    if (n["bias_range"]) {
        auto r = range(n["bias_range"], "complexity.bias_range");
        if (!(r.first > 0.0))
            fail(n["bias_range"], "complexity.bias_range", "biases must be positive");
        cfg.bias_range = r;
    }
    if (cm.kind == complexity::MeasureKind::biased_oracle && cm.bias_per_stream.empty() && !cfg.bias_range)
        fail(n, "complexity", "biased-oracle needs 'bias' or 'bias_range'");
}

sim::SyntheticClass parse_synthetic(const YAML::Node& n, const std::string& path)
{
    allow_keys(n, path, {"streams", "psnr_range", "complexity_range", "complexity_phi", "complexity_sd"});
    sim::SyntheticClass cls;
    if (!n["streams"])
        fail(n, path + ".streams", "required");
    cls.streams = unsigned_int(n["streams"], path + ".streams");
    if (cls.streams < 2)
        fail(n["streams"], path + ".streams", "needs >= 2 streams");
    if (n["psnr_range"])
        std::tie(cls.psnr_lo, cls.psnr_hi) = range(n["psnr_range"], path + ".psnr_range");
    if (n["complexity_range"]) {
        std::tie(cls.complexity_lo, cls.complexity_hi) = range(n["complexity_range"], path + ".complexity_range");
        if (!(cls.complexity_lo > 0.0))
            fail(n["complexity_range"], path + ".complexity_range", "must be positive");
    }
    if (n["complexity_phi"])
        cls.complexity_phi = in_range(n["complexity_phi"], path + ".complexity_phi", 0.0, 1.0, "[0, 1)");
    if (n["complexity_sd"]) {
        cls.complexity_sd = number(n["complexity_sd"], path + ".complexity_sd");
        if (cls.complexity_sd < 0.0)
            fail(n["complexity_sd"], path + ".complexity_sd", "must be non-negative");
    }
    return cls;
}

void log_rate(std::ostream& log, const std::string& name, double bps, const ScenarioSpec& s)
{
    log << "info: scenario " << name << ": " << bps << " bps = " << s.channel_rate_bits
        << " bits per super GOP (" << s.super_gop_frames << " frames at " << s.frame_rate << " fps)\n";
}

void parse_scenario(const YAML::Node& n, const std::string& path, std::vector<ScenarioSpec>& out,
                    std::ostream& log)
{
    allow_keys(n, path, {"name", "pack", "channel_rate_bps", "channel_rate_bits", "super_gop_frames", "frame_rate",
                         "gops", "streams", "synthetic"});
    ScenarioSpec base;
    if (n["super_gop_frames"]) {
        const std::uint64_t f = unsigned_int(n["super_gop_frames"], join(path, "super_gop_frames"));
        if (f == 0)
            fail(n["super_gop_frames"], join(path, "super_gop_frames"), "must be positive");
        base.super_gop_frames = static_cast<int>(f);
    }
    if (n["frame_rate"])
        base.frame_rate = positive(n["frame_rate"], join(path, "frame_rate"));
    const bool explicit_gops = static_cast<bool>(n["gops"]);
    if (explicit_gops) {
        base.gops = unsigned_int(n["gops"], join(path, "gops"));
        if (base.gops < 2)
            fail(n["gops"], join(path, "gops"), "needs >= 2 super GOPs");
    }

    if (n["pack"]) {
        const std::string pack = text(n["pack"], join(path, "pack"));
        if (pack != "six-class")
            fail(n["pack"], join(path, "pack"), "unknown pack '" + pack + "' (six-class)");
        for (const char* k : {"name", "channel_rate_bps", "channel_rate_bits", "streams", "synthetic"})
            if (n[k])
                fail(n[k], join(path, k), "not allowed together with 'pack'");
        for (sim::SyntheticClass cls : sim::six_class_pack()) {
            ScenarioSpec s = base;
            s.name = cls.name;
            cls.gops = s.gops;
            cls.super_gop_frames = s.super_gop_frames;
            cls.frame_rate = s.frame_rate;
            s.channel_rate_bits =
                bps_to_bits_per_supergop(cls.channel_rate_bps, s.super_gop_frames, s.frame_rate).value;
            log_rate(log, s.name, cls.channel_rate_bps, s);
            s.synthetic = cls;
            out.push_back(std::move(s));
        }
        return;
    }

    ScenarioSpec s = base;
    s.name = n["name"] ? text(n["name"], join(path, "name")) : "scenario" + std::to_string(out.size());
    if (n["channel_rate_bps"] && n["channel_rate_bits"])
        fail(n["channel_rate_bits"], join(path, "channel_rate_bits"), "give either channel_rate_bps or channel_rate_bits");
    double bps = 0.0;
    if (n["channel_rate_bps"]) {
        bps = positive(n["channel_rate_bps"], join(path, "channel_rate_bps"));
        s.channel_rate_bits = bps_to_bits_per_supergop(bps, s.super_gop_frames, s.frame_rate).value;
        log_rate(log, s.name, bps, s);
    } else if (n["channel_rate_bits"]) {
        s.channel_rate_bits = positive(n["channel_rate_bits"], join(path, "channel_rate_bits"));
    } else {
        fail(n, join(path, "channel_rate_bps"), "required (or channel_rate_bits)");
    }

    if (n["streams"] && n["synthetic"])
        fail(n["synthetic"], join(path, "synthetic"), "give either streams or synthetic");

    if (const YAML::Node syn = n["synthetic"]) {
        sim::SyntheticClass cls = parse_synthetic(syn, join(path, "synthetic"));
        cls.name = s.name;
        cls.gops = s.gops;
        cls.super_gop_frames = s.super_gop_frames;
        cls.frame_rate = s.frame_rate;
        cls.channel_rate_bps = s.channel_rate_bits * s.frame_rate / s.super_gop_frames;
        s.synthetic = cls;
    }

    if (const YAML::Node streams = n["streams"]) {
        const std::string sp = join(path, "streams");
        if (!streams.IsSequence())
            fail(streams, sp, "expected a list of streams");
        if (!explicit_gops) {
            for (const auto& st : streams)
                for (const char* k : {"sigma", "complexity", "provided_complexity"})
                    if (st.IsMap() && st[k] && st[k].IsSequence()) {
                        s.gops = st[k].size();
                        break;
                    }
        }
        for (std::size_t i = 0; i < streams.size(); ++i) {
            const YAML::Node st = streams[i];
            const std::string ip = sp + "[" + std::to_string(i) + "]";
            allow_keys(st, ip, {"sigma", "complexity", "provided_complexity"});
            if (!st["sigma"])
                fail(st, ip + ".sigma", "required");
            if (!st["complexity"])
                fail(st, ip + ".complexity", "required");
            const auto sigma = per_gop(st["sigma"], ip + ".sigma", s.gops);
            const auto c = per_gop(st["complexity"], ip + ".complexity", s.gops);
            std::vector<double> provided;
            if (st["provided_complexity"])
                provided = per_gop(st["provided_complexity"], ip + ".provided_complexity", s.gops);
            StreamTrace trace;
            trace.stream = StreamId{i};
            for (std::size_t k = 0; k < s.gops; ++k) {
                GopTruth g;
                g.complexity = Complexity(c[k]);
                g.sigma = sigma[k];
                if (!provided.empty())
                    g.provided_complexity = Complexity(provided[k]);
                trace.gops.push_back(std::move(g));
            }
            s.streams.push_back(std::move(trace));
        }
        if (s.streams.size() < 2)
            fail(streams, sp, "needs >= 2 streams");
    }
    out.push_back(std::move(s));
}

ConfigFile parse_root(const YAML::Node& root, std::ostream& log)
{
    if (!root.IsMap())
        throw InputError("config: expected a mapping at the top level");
    allow_keys(root, "", {"schema_version", "label", "seed", "seeds", "seed_count", "allocators", "floor_fraction",
                          "encoder", "complexity", "scenario", "scenarios"});

    if (!root["schema_version"])
        fail(root, "schema_version", "required");
    if (unsigned_int(root["schema_version"], "schema_version") != schema_version)
        fail(root["schema_version"], "schema_version", "unsupported version (expected 1)");

    ConfigFile cfg;
    if (root["label"])
        cfg.label = text(root["label"], "label");

    std::uint64_t seed = root["seed"] ? unsigned_int(root["seed"], "seed") : 0;
    cfg.seeds = {seed};
    if (root["seeds"] && root["seed_count"])
        fail(root["seed_count"], "seed_count", "give either seeds or seed_count");
    if (const YAML::Node seeds = root["seeds"]) {
        if (!seeds.IsSequence() || seeds.size() == 0)
            fail(seeds, "seeds", "expected a non-empty list");
        cfg.seeds.clear();
        for (std::size_t i = 0; i < seeds.size(); ++i)
            cfg.seeds.push_back(unsigned_int(seeds[i], "seeds[" + std::to_string(i) + "]"));
    }
    if (root["seed_count"]) {
        const std::uint64_t count = unsigned_int(root["seed_count"], "seed_count");
        if (count == 0)
            fail(root["seed_count"], "seed_count", "must be positive");
        cfg.seeds.clear();
        for (std::uint64_t s = 0; s < count; ++s)
            cfg.seeds.push_back(seed + s);
    }

    if (const YAML::Node a = root["allocators"]) {
        if (!a.IsSequence() || a.size() == 0)
            fail(a, "allocators", "expected a non-empty list");
        cfg.allocators.clear();
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string name = text(a[i], "allocators[" + std::to_string(i) + "]");
            if (!alloc::parse_allocator(name))
                fail(a[i], "allocators[" + std::to_string(i) + "]",
                     "unknown allocator '" + name + "' (lam, lfam, oracle, uniform)");
            cfg.allocators.push_back(name);
        }
    }
    if (root["floor_fraction"])
        cfg.floor_fraction = in_range(root["floor_fraction"], "floor_fraction", 0.0, 1.0, "[0, 1)");
    if (root["encoder"])
        cfg.encoder = parse_encoder(root["encoder"]);
    if (root["complexity"])
        parse_complexity(root["complexity"], cfg);

    if (root["scenario"] && root["scenarios"])
        fail(root["scenarios"], "scenarios", "give either scenario or scenarios");
    if (const YAML::Node s = root["scenario"]) {
        parse_scenario(s, "scenario", cfg.scenarios, log);
    } else if (const YAML::Node list = root["scenarios"]) {
        if (!list.IsSequence() || list.size() == 0)
            fail(list, "scenarios", "expected a non-empty list");
        for (std::size_t i = 0; i < list.size(); ++i)
            parse_scenario(list[i], "scenarios[" + std::to_string(i) + "]", cfg.scenarios, log);
    } else {
        fail(root, "scenarios", "required");
    }

    std::vector<std::string> names;
    for (const auto& s : cfg.scenarios) {
        if (std::find(names.begin(), names.end(), s.name) != names.end())
            throw InputError("scenarios: duplicate scenario name '" + s.name + "'");
        names.push_back(s.name);
    }
    return cfg;
}

} // namespace

ConfigFile parse_config(const std::string& text, std::ostream& log)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw InputError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    return parse_root(root, log);
}

ConfigFile load_config(const std::string& path, std::ostream& log)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str(), log);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string measure_label(const ConfigFile& cfg)
{
    return cfg.label.empty() ? cfg.measure.label() : cfg.label;
}

std::vector<PlannedRun> plan_runs(const ConfigFile& cfg)
{
    std::vector<PlannedRun> runs;
    for (const ScenarioSpec& spec : cfg.scenarios) {
        for (std::uint64_t seed : cfg.seeds) {
            PlannedRun run;
            run.scenario = spec.name;
            run.seed = seed;
            sim::RunConfig& rc = run.config;
            if (spec.synthetic) {
                rc.scenario = sim::make_synthetic_scenario(*spec.synthetic, seed);
            } else {
                if (spec.streams.empty())
                    throw InputError("scenario '" + spec.name + "': no streams (give streams or synthetic)");
                rc.scenario.streams = spec.streams;
                rc.scenario.channel_rate = RateBits(spec.channel_rate_bits);
                rc.scenario.super_gop_frames = spec.super_gop_frames;
                rc.scenario.frame_rate = spec.frame_rate;
            }
            rc.scenario.name = spec.name;
            rc.scenario.rng_seed = seed;
            rc.encoder = cfg.encoder;
            rc.complexity_measure = cfg.measure;
            rc.allocators = cfg.allocators;
            rc.floor_fraction = cfg.floor_fraction;
            rc.seed = seed;

            const std::size_t n = rc.scenario.stream_count();
            if (cfg.bias_range && cfg.measure.bias_per_stream.empty()) {
                auto& bias = rc.complexity_measure.bias_per_stream;
                for (std::size_t i = 0; i < n; ++i) {
                    RngStream rng(seed, i, RngPurpose::bias);
                    bias.push_back(rng.uniform(cfg.bias_range->first, cfg.bias_range->second));
                }
            }
            if (rc.complexity_measure.kind == complexity::MeasureKind::biased_oracle
                && rc.complexity_measure.bias_per_stream.size() != n)
                throw InputError("complexity.bias: scenario '" + spec.name + "' has " + std::to_string(n)
                                 + " streams but " + std::to_string(rc.complexity_measure.bias_per_stream.size())
                                 + " biases are given");

            const auto violations = validate_scenario(rc.scenario);
            if (!violations.empty())
                throw InputError("scenario '" + spec.name + "': " + violations.front().describe());
            runs.push_back(std::move(run));
        }
    }
    return runs;
}

} // namespace statmux::cli
