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

#include "statmux/cli/commands.hpp"

#include "statmux/cli/config.hpp"
#include "statmux/cli/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>

namespace fs = std::filesystem;

namespace statmux::cli
{

namespace
{

template <class F>
int guarded(std::ostream& log, F&& body)
{
    try {
        body();
        return exit_ok;
    } catch (const InputError& e) {
        log << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    return os;
}

void apply_overrides(const Options& opt, ConfigFile& cfg)
{
    if (opt.seed)
        cfg.seeds = {*opt.seed};
    if (!opt.allocators.empty()) {
        for (const auto& a : opt.allocators)
            if (!alloc::parse_allocator(a))
                throw InputError("--allocators: unknown allocator '" + a + "' (lam, lfam, oracle, uniform)");
        cfg.allocators = opt.allocators;
    }
    if (opt.jobs == 0)
        throw InputError("--jobs: must be at least 1");
}

ConfigFile load(const Options& opt, std::ostream& log)
{
    if (opt.config.empty())
        throw InputError("--config is required");
    ConfigFile cfg = load_config(opt.config, log);
    apply_overrides(opt, cfg);
    return cfg;
}

const metrics::RunSummary* find(const sim::RunResult& r, const std::string& name)
{
    for (const auto& s : r.summaries)
        if (s.allocator == name)
            return &s;
    return nullptr;
}

void write_run(const fs::path& dir, const PlannedRun& run, const sim::RunResult& result, const std::string& measure)
{
    fs::create_directories(dir);
    {
        auto os = open_out(dir / "gop_report.csv");
        write_gop_report(os, result.summaries);
    }
    {
        auto os = open_out(dir / "summary.csv");
        write_summary(os, result.summaries);
    }
    {
        auto os = open_out(dir / "variance.dat");
        write_variance_dat(os, result.summaries);
    }
    auto os = open_out(dir / "run.yaml");
    write_run_meta(os, {run.scenario, measure, run.seed});
}

/// Runs the plan, writes per-run directories and the combined table.
void execute(const ConfigFile& cfg, const std::vector<PlannedRun>& plan, const Options& opt, std::ostream& log)
{
    if (opt.out.empty())
        throw InputError("--out is required");

    std::vector<sim::RunConfig> configs;
    for (const auto& p : plan)
        configs.push_back(p.config);
    const std::vector<sim::RunResult> results = sim::run_batch(configs, opt.jobs);

    const fs::path out(opt.out);
    fs::create_directories(out);
    const std::string measure = measure_label(cfg);
    const bool single = plan.size() == 1;
    for (std::size_t r = 0; r < plan.size(); ++r) {
        const fs::path dir = single ? out : out / plan[r].scenario / ("seed-" + std::to_string(plan[r].seed));
        write_run(dir, plan[r], results[r], measure);
        for (const auto& s : results[r].summaries)
            for (const auto& g : s.gops)
                for (const auto& w : g.warnings)
                    log << "warning: " << plan[r].scenario << " seed " << plan[r].seed << ": " << w << '\n';
    }

    auto table = open_out(out / "table1.txt");
    const bool has_pair = std::find(cfg.allocators.begin(), cfg.allocators.end(), "lam") != cfg.allocators.end()
                          && std::find(cfg.allocators.begin(), cfg.allocators.end(), "lfam") != cfg.allocators.end();
    if (!has_pair) {
        table << "# the comparison table needs both the lam and lfam allocators\n";
        return;
    }

    metrics::TableInput input;
    input.row_labels = {measure};
    input.cells.emplace_back();
    for (const auto& spec : cfg.scenarios) {
        metrics::VariancePair cell;
        std::size_t count = 0;
        for (std::size_t r = 0; r < plan.size(); ++r) {
            if (plan[r].scenario != spec.name)
                continue;
            cell.lam += find(results[r], "lam")->average_variance;
            cell.lfam += find(results[r], "lfam")->average_variance;
            ++count;
        }
        if (count == 0)
            continue;
        cell.lam /= static_cast<double>(count);
        cell.lfam /= static_cast<double>(count);
        input.column_labels.push_back(spec.name);
        input.cells.back().push_back(cell);
    }
    write_table(table, input);
}

double mean_sigma(const TraceCell& cell)
{
    double sum = 0.0;
    for (const RdSample& p : cell.samples)
        sum += p.distortion.mse * p.rate.value / (cell.complexity * cell.complexity);
    return sum / static_cast<double>(cell.samples.size());
}

std::size_t distinct_rates(const TraceCell& cell)
{
    std::vector<double> rates;
    for (const RdSample& p : cell.samples)
        rates.push_back(p.rate.value);
    std::sort(rates.begin(), rates.end());
    return static_cast<std::size_t>(std::unique(rates.begin(), rates.end()) - rates.begin());
}

} // namespace

int cmd_simulate(const Options& opt, std::ostream& log)
{
    return guarded(log, [&] {
        const ConfigFile cfg = load(opt, log);
        execute(cfg, plan_runs(cfg), opt, log);
    });
}

int cmd_replay(const Options& opt, std::ostream& log)
{
    return guarded(log, [&] {
        if (opt.trace.empty())
            throw InputError("--trace is required");
        ConfigFile cfg = load(opt, log);
        const Trace trace = load_trace(opt.trace);
        if (!trace.has_samples)
            throw InputError(opt.trace + ": replay needs rate and mse columns");
        if (trace.streams() < 2)
            throw InputError(opt.trace + ": needs >= 2 streams");
        if (trace.gops() < 2)
            throw InputError(opt.trace + ": needs >= 2 super GOPs");

        const ScenarioSpec channel = cfg.scenarios.front();
        if (cfg.scenarios.size() > 1)
            log << "warning: replay uses the channel of scenario '" << channel.name << "' only\n";

        Scenario sc;
        sc.name = channel.name;
        sc.channel_rate = RateBits(channel.channel_rate_bits);
        sc.super_gop_frames = channel.super_gop_frames;
        sc.frame_rate = channel.frame_rate;
        for (std::size_t s = 0; s < trace.streams(); ++s) {
            StreamTrace st;
            st.stream = StreamId{s};
            for (std::size_t g = 0; g < trace.gops(); ++g) {
                const TraceCell& cell = trace.cells[s][g];
                GopTruth truth;
                truth.complexity = Complexity(cell.complexity);
                truth.provided_complexity = truth.complexity;
                truth.rd_samples = cell.samples;
                if (distinct_rates(cell) >= 3) {
                    truth.sigma = rd::fit_hyperbolic(cell.samples, truth.complexity).sigma_fit;
                } else {
                    truth.sigma = mean_sigma(cell);
                    log << "warning: stream " << s << ", gop " << g << ": fewer than 3 R-D samples, sigma taken as "
                        << "the mean of D*R/C^2";
                    if (cell.samples.size() == 1)
                        log << "; a single sample clamps every replayed distortion to it";
                    log << '\n';
                }
                st.gops.push_back(std::move(truth));
            }
            sc.streams.push_back(std::move(st));
        }

        const auto violations = validate_scenario(sc);
        if (!violations.empty())
            throw InputError(opt.trace + ": " + violations.front().describe());

        cfg.encoder.kind = rd::EncoderKind::trace_replay;
        ConfigFile replay_cfg = cfg;
        replay_cfg.scenarios = {channel};

        std::vector<PlannedRun> plan;
        for (std::uint64_t seed : cfg.seeds) {
            PlannedRun run;
            run.scenario = sc.name;
            run.seed = seed;
            run.config.scenario = sc;
            run.config.scenario.rng_seed = seed;
            run.config.encoder = cfg.encoder;
            run.config.complexity_measure = cfg.measure;
            run.config.allocators = cfg.allocators;
            run.config.floor_fraction = cfg.floor_fraction;
            run.config.seed = seed;
            if (cfg.bias_range && cfg.measure.bias_per_stream.empty())
                for (std::size_t i = 0; i < sc.stream_count(); ++i) {
                    RngStream rng(seed, i, RngPurpose::bias);
                    run.config.complexity_measure.bias_per_stream.push_back(
                        rng.uniform(cfg.bias_range->first, cfg.bias_range->second));
                }
            plan.push_back(std::move(run));
        }
        execute(replay_cfg, plan, opt, log);
    });
}

int cmd_fit(const Options& opt, std::ostream& log)
{
    return guarded(log, [&] {
        if (opt.trace.empty())
            throw InputError("--trace is required");
        if (opt.out.empty())
            throw InputError("--out is required");
        const Trace trace = load_trace(opt.trace);
        if (!trace.has_samples)
            throw InputError(opt.trace + ": fit needs rate and mse columns");

        struct Fitted
        {
            std::size_t stream, gop;
            rd::HyperbolicFit fit;
        };
        std::vector<Fitted> fits;
        for (std::size_t s = 0; s < trace.streams(); ++s)
            for (std::size_t g = 0; g < trace.gops(); ++g) {
                const TraceCell& cell = trace.cells[s][g];
                if (distinct_rates(cell) < 3)
                    throw InputError(opt.trace + ": stream " + std::to_string(s) + ", gop " + std::to_string(g)
                                     + ": at least 3 samples with distinct rates are needed");
                fits.push_back({s, g, rd::fit_hyperbolic(cell.samples, Complexity(cell.complexity))});
            }

        const fs::path out(opt.out);
        fs::create_directories(out);
        {
            auto os = open_out(out / "fit.csv");
            os << "stream,gop,complexity,sigma_fit,r_squared,slope\n";
            for (const auto& f : fits)
                os << f.stream << ',' << f.gop << ',' << format_number(trace.cells[f.stream][f.gop].complexity) << ','
                   << format_number(f.fit.sigma_fit) << ',' << format_number(f.fit.r_squared) << ','
                   << format_number(f.fit.slope) << '\n';
        }
        auto os = open_out(out / "fig1.dat");
        for (std::size_t b = 0; b < fits.size(); ++b) {
            const auto& f = fits[b];
            std::vector<RdSample> samples = trace.cells[f.stream][f.gop].samples;
            std::sort(samples.begin(), samples.end(),
                      [](const RdSample& x, const RdSample& y) { return x.rate.value < y.rate.value; });
            if (b > 0)
                os << "\n\n";
            os << "# stream " << f.stream << " gop " << f.gop << " sigma_fit " << format_number(f.fit.sigma_fit)
               << " r_squared " << format_number(f.fit.r_squared) << '\n';
            os << "# rate inv_mse fitted\n";
            for (const RdSample& p : samples)
                os << format_number(p.rate.value) << ' ' << format_number(1.0 / p.distortion.mse) << ' '
                   << format_number(f.fit.slope * p.rate.value) << '\n';
        }
        log << "info: fitted " << fits.size() << " stream/gop cells\n";
    });
}

int cmd_report(const Options& opt, std::ostream& log)
{
    return guarded(log, [&] {
        if (opt.inputs.empty())
            throw InputError("report needs run directories or a table CSV");

        metrics::TableInput input;
        if (opt.inputs.size() == 1 && fs::is_regular_file(opt.inputs.front())) {
            std::ifstream in(opt.inputs.front());
            if (!in)
                throw InputError("cannot read '" + opt.inputs.front() + "'");
            input = read_table_csv(in, opt.inputs.front());
        } else {
            std::vector<fs::path> summaries;
            for (const auto& dir : opt.inputs) {
                if (!fs::is_directory(dir))
                    throw InputError("'" + dir + "' is not a run directory");
                for (const auto& e : fs::recursive_directory_iterator(dir))
                    if (e.is_regular_file() && e.path().filename() == "summary.csv")
                        summaries.push_back(e.path());
            }
            if (summaries.empty())
                throw InputError("no summary.csv found under the given directories");
            std::sort(summaries.begin(), summaries.end());

            struct Cell
            {
                metrics::VariancePair sum;
                std::size_t runs = 0;
            };
            std::map<std::pair<std::size_t, std::size_t>, Cell> cells;
            auto index_of = [](std::vector<std::string>& labels, const std::string& name) {
                auto it = std::find(labels.begin(), labels.end(), name);
                if (it != labels.end())
                    return static_cast<std::size_t>(it - labels.begin());
                labels.push_back(name);
                return labels.size() - 1;
            };
            for (const auto& path : summaries) {
                const fs::path meta_path = path.parent_path() / "run.yaml";
                std::ifstream meta_in(meta_path);
                if (!meta_in)
                    throw InputError("'" + path.parent_path().string() + "' has summary.csv but no run.yaml");
                const RunMeta meta = read_run_meta(meta_in, meta_path.string());
                std::ifstream in(path);
                const auto rows = read_summary(in, path.string());
                const SummaryRow *lam = nullptr, *lfam = nullptr;
                for (const auto& r : rows) {
                    if (r.allocator == "lam")
                        lam = &r;
                    if (r.allocator == "lfam")
                        lfam = &r;
                }
                if (!lam || !lfam)
                    throw InputError(path.string() + ": needs both lam and lfam rows");
                Cell& cell = cells[{index_of(input.row_labels, meta.measure),
                                    index_of(input.column_labels, meta.scenario)}];
                cell.sum.lam += lam->avg_variance;
                cell.sum.lfam += lfam->avg_variance;
                ++cell.runs;
            }

            std::size_t runs_per_cell = 0;
            for (std::size_t r = 0; r < input.row_labels.size(); ++r) {
                input.cells.emplace_back();
                for (std::size_t c = 0; c < input.column_labels.size(); ++c) {
                    auto it = cells.find({r, c});
                    if (it == cells.end())
                        throw InputError("inconsistent run grid: no runs for " + input.row_labels[r] + " / "
                                         + input.column_labels[c]);
                    if (runs_per_cell == 0)
                        runs_per_cell = it->second.runs;
                    else if (runs_per_cell != it->second.runs)
                        throw InputError("inconsistent run grid: " + input.row_labels[r] + " / "
                                         + input.column_labels[c] + " has " + std::to_string(it->second.runs)
                                         + " runs, expected " + std::to_string(runs_per_cell));
                    const double n = static_cast<double>(it->second.runs);
                    input.cells.back().push_back({it->second.sum.lam / n, it->second.sum.lfam / n});
                }
            }
            log << "info: " << summaries.size() << " runs, " << input.row_labels.size() << " x "
                << input.column_labels.size() << " grid\n";
        }

        if (opt.out.empty()) {
            write_table(std::cout, input);
        } else {
            const fs::path out(opt.out);
            if (out.has_parent_path())
                fs::create_directories(out.parent_path());
            auto os = open_out(out);
            write_table(os, input);
        }
    });
}

} // namespace statmux::cli
