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

#include "statmux/cli/io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace statmux::cli
{

std::string format_number(double v)
{
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view field, const std::string& what)
{
    double v = 0.0;
    const char* end = field.data() + field.size();
    auto res = std::from_chars(field.data(), end, v);
    if (field.empty() || res.ec != std::errc() || res.ptr != end)
        throw InputError(what + ": '" + std::string(field) + "' is not a number");
    if (!std::isfinite(v))
        throw InputError(what + ": value must be finite");
    return v;
}

namespace
{

std::uint64_t parse_index(std::string_view field, const std::string& what)
{
    std::uint64_t v = 0;
    const char* end = field.data() + field.size();
    auto res = std::from_chars(field.data(), end, v);
    if (field.empty() || res.ec != std::errc() || res.ptr != end)
        throw InputError(what + ": '" + std::string(field) + "' is not a non-negative integer");
    return v;
}

std::string where(const std::string& source, std::size_t line)
{
    return source + ":" + std::to_string(line);
}

/// Reads lines, dropping a trailing '\r'; blank lines are skipped.
bool next_line(std::istream& is, std::string& line, std::size_t& number)
{
    while (std::getline(is, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            return true;
    }
    return false;
}

} // namespace

std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

void write_gop_report(std::ostream& os, std::span<const metrics::RunSummary> runs)
{
    os << "allocator,gop,stream,allocated_bits,achieved_bits,mse,psnr_db\n";
    for (const auto& run : runs)
        for (const auto& g : run.gops)
            for (std::size_t i = 0; i < g.streams.size(); ++i) {
                const auto& s = g.streams[i];
                os << run.allocator << ',' << g.k.k << ',' << i << ',' << format_number(s.allocated.value) << ','
                   << format_number(s.achieved.achieved_rate.value) << ','
                   << format_number(s.achieved.achieved_distortion.mse) << ',' << format_number(s.psnr_db) << '\n';
            }
}

std::vector<metrics::RunSummary> read_gop_report(std::istream& is)
{
    const std::string source = "gop_report.csv";
    std::string line;
    std::size_t number = 0;
    if (!next_line(is, line, number) || line != "allocator,gop,stream,allocated_bits,achieved_bits,mse,psnr_db")
        throw InputError(where(source, number) + ": unexpected header");

    struct Gop
    {
        std::vector<RateBits> allocated;
        std::vector<FeedbackRecord> achieved;
    };
    std::vector<std::pair<std::string, std::vector<Gop>>> runs;

    while (next_line(is, line, number)) {
        const auto f = split_csv(line);
        const std::string at = where(source, number);
        if (f.size() != 7)
            throw InputError(at + ": expected 7 fields");
        const std::string allocator(f[0]);
        const std::uint64_t k = parse_index(f[1], at + ": gop");
        const std::uint64_t i = parse_index(f[2], at + ": stream");

        if (runs.empty() || runs.back().first != allocator)
            runs.push_back({allocator, {}});
        auto& gops = runs.back().second;
        if (k == gops.size())
            gops.emplace_back();
        if (k + 1 != gops.size() || i != gops.back().allocated.size())
            throw InputError(at + ": rows out of order");
        gops.back().allocated.push_back(RateBits(parse_number(f[3], at + ": allocated_bits")));
        gops.back().achieved.push_back({RateBits(parse_number(f[4], at + ": achieved_bits")),
                                        Distortion(parse_number(f[5], at + ": mse"))});
    }

    std::vector<metrics::RunSummary> out;
    for (auto& [allocator, gops] : runs) {
        std::vector<metrics::GopReport> reports;
        for (std::size_t k = 0; k < gops.size(); ++k)
            reports.push_back(metrics::make_gop_report(SuperGopIndex{k}, gops[k].allocated, gops[k].achieved));
        out.push_back(metrics::summarize(allocator, std::move(reports)));
    }
    return out;
}

void write_summary(std::ostream& os, std::span<const metrics::RunSummary> runs)
{
    os << "allocator,avg_variance,avg_abs_dev";
    const std::size_t n = runs.empty() ? 0 : runs.front().average_psnr.size();
    for (std::size_t i = 0; i < n; ++i)
        os << ",avg_psnr_s" << i;
    os << '\n';
    for (const auto& run : runs) {
        os << run.allocator << ',' << format_number(run.average_variance) << ','
           << format_number(run.average_abs_dev);
        for (double p : run.average_psnr)
            os << ',' << format_number(p);
        os << '\n';
    }
}

std::vector<SummaryRow> read_summary(std::istream& is, const std::string& source)
{
    std::string line;
    std::size_t number = 0;
    if (!next_line(is, line, number))
        throw InputError(source + ": empty file");
    const auto header = split_csv(line);
    if (header.size() < 3 || header[0] != "allocator" || header[1] != "avg_variance" || header[2] != "avg_abs_dev")
        throw InputError(where(source, number) + ": unexpected header");

    std::vector<SummaryRow> rows;
    while (next_line(is, line, number)) {
        const auto f = split_csv(line);
        const std::string at = where(source, number);
        if (f.size() != header.size())
            throw InputError(at + ": expected " + std::to_string(header.size()) + " fields");
        SummaryRow row;
        row.allocator = std::string(f[0]);
        row.avg_variance = parse_number(f[1], at + ": avg_variance");
        row.avg_abs_dev = parse_number(f[2], at + ": avg_abs_dev");
        for (std::size_t c = 3; c < f.size(); ++c)
            row.avg_psnr.push_back(parse_number(f[c], at + ": " + std::string(header[c])));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_variance_dat(std::ostream& os, std::span<const metrics::RunSummary> runs)
{
    os << "# gop";
    for (const auto& run : runs)
        os << ' ' << run.allocator;
    os << '\n';
    const std::size_t gops = runs.empty() ? 0 : runs.front().gops.size();
    for (std::size_t k = 0; k < gops; ++k) {
        os << k;
        for (const auto& run : runs)
            os << ' ' << format_number(run.gops[k].variance_mse);
        os << '\n';
    }
}

void write_run_meta(std::ostream& os, const RunMeta& meta)
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "scenario" << YAML::Value << meta.scenario;
    out << YAML::Key << "measure" << YAML::Value << meta.measure;
    out << YAML::Key << "seed" << YAML::Value << meta.seed;
    out << YAML::EndMap;
    os << out.c_str() << '\n';
}

RunMeta read_run_meta(std::istream& is, const std::string& source)
{
    try {
        const YAML::Node n = YAML::Load(is);
        RunMeta m;
        m.scenario = n["scenario"].as<std::string>();
        m.measure = n["measure"].as<std::string>();
        m.seed = n["seed"].as<std::uint64_t>();
        return m;
    } catch (const YAML::Exception& e) {
        throw InputError(source + ": " + e.what());
    }
}

Trace read_trace(std::istream& is, const std::string& source)
{
    std::string line;
    std::size_t number = 0;
    if (!next_line(is, line, number))
        throw InputError(source + ": empty trace");
    Trace t;
    if (line == "stream,gop,complexity,rate,mse")
        t.has_samples = true;
    else if (line != "stream,gop,complexity")
        throw InputError(where(source, number) + ": header must be stream,gop,complexity[,rate,mse]");
    const std::size_t fields = t.has_samples ? 5 : 3;

    std::map<std::pair<std::uint64_t, std::uint64_t>, TraceCell> cells;
    std::uint64_t max_stream = 0, max_gop = 0;
    while (next_line(is, line, number)) {
        const auto f = split_csv(line);
        const std::string at = where(source, number);
        if (f.size() != fields)
            throw InputError(at + ": expected " + std::to_string(fields) + " fields");
        const std::uint64_t s = parse_index(f[0], at + ": stream");
        const std::uint64_t g = parse_index(f[1], at + ": gop");
        const double c = parse_number(f[2], at + ": complexity");
        if (!(c > 0.0))
            throw InputError(at + ": complexity must be positive");

        auto [it, fresh] = cells.try_emplace({s, g});
        TraceCell& cell = it->second;
        if (fresh)
            cell.complexity = c;
        else if (!t.has_samples)
            throw InputError(at + ": duplicate row for stream " + std::to_string(s) + ", gop " + std::to_string(g));
        else if (cell.complexity != c)
            throw InputError(at + ": complexity differs from earlier rows of the same stream and gop");

        if (t.has_samples) {
            const double r = parse_number(f[3], at + ": rate");
            const double d = parse_number(f[4], at + ": mse");
            if (!(r > 0.0) || !(d > 0.0))
                throw InputError(at + ": rate and mse must be positive");
            cell.samples.push_back({RateBits(r), Distortion(d)});
        }
        max_stream = std::max(max_stream, s);
        max_gop = std::max(max_gop, g);
    }
    if (cells.empty())
        throw InputError(source + ": trace has no rows");

    t.cells.assign(max_stream + 1, std::vector<TraceCell>(max_gop + 1));
    for (std::uint64_t s = 0; s <= max_stream; ++s)
        for (std::uint64_t g = 0; g <= max_gop; ++g) {
            auto it = cells.find({s, g});
            if (it == cells.end())
                throw InputError(source + ": trace is not rectangular, stream " + std::to_string(s) + " has no gop "
                                 + std::to_string(g));
            t.cells[s][g] = std::move(it->second);
        }
    return t;
}

Trace load_trace(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot read trace '" + path + "'");
    return read_trace(in, path);
}

void write_trace(std::ostream& os, const Trace& trace)
{
    os << (trace.has_samples ? "stream,gop,complexity,rate,mse\n" : "stream,gop,complexity\n");
    for (std::size_t s = 0; s < trace.streams(); ++s)
        for (std::size_t g = 0; g < trace.gops(); ++g) {
            const TraceCell& cell = trace.cells[s][g];
            const std::string head = std::to_string(s) + ',' + std::to_string(g) + ',' + format_number(cell.complexity);
            if (!trace.has_samples) {
                os << head << '\n';
                continue;
            }
            for (const RdSample& p : cell.samples)
                os << head << ',' << format_number(p.rate.value) << ',' << format_number(p.distortion.mse) << '\n';
        }
}

namespace
{

std::string fixed2(double v)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

} // namespace

void write_table(std::ostream& os, const metrics::TableInput& input)
{
    const std::size_t rows = input.cells.size();
    const std::size_t cols = input.column_labels.size();

    // A zero LAM variance leaves the saving undefined; those cells print "-".
    std::optional<metrics::TableSummary> sum;
    try {
        sum = metrics::aggregate_table(input);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::undefined_saving)
            throw;
    }

    std::vector<std::vector<std::string>> lines;
    auto block = [&](const std::string& label, std::vector<metrics::VariancePair> vars, std::vector<std::string> sav,
                     metrics::VariancePair avg, std::string avg_saving) {
        std::vector<std::string> lam{label, "LAM"}, lfam{"", "LFAM"}, saving{"", "Saving(%)"};
        for (std::size_t c = 0; c < vars.size(); ++c) {
            lam.push_back(fixed2(vars[c].lam));
            lfam.push_back(fixed2(vars[c].lfam));
            saving.push_back(sav[c]);
        }
        lam.push_back(fixed2(avg.lam));
        lfam.push_back(fixed2(avg.lfam));
        saving.push_back(avg_saving);
        lines.push_back(std::move(lam));
        lines.push_back(std::move(lfam));
        lines.push_back(std::move(saving));
    };

    std::vector<std::string> header{"measure", "variance"};
    for (const auto& c : input.column_labels)
        header.push_back(c);
    header.push_back("Average");
    lines.push_back(header);

    std::vector<metrics::VariancePair> col_avg(cols);
    metrics::VariancePair grand;
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<std::string> sav;
        metrics::VariancePair avg;
        for (std::size_t c = 0; c < cols; ++c) {
            const auto& v = input.cells[r][c];
            sav.push_back(sum ? fixed2(sum->cell_saving[r][c]) : "-");
            avg.lam += v.lam / static_cast<double>(cols);
            avg.lfam += v.lfam / static_cast<double>(cols);
            col_avg[c].lam += v.lam / static_cast<double>(rows);
            col_avg[c].lfam += v.lfam / static_cast<double>(rows);
        }
        grand.lam += avg.lam / static_cast<double>(rows);
        grand.lfam += avg.lfam / static_cast<double>(rows);
        block(input.row_labels[r], input.cells[r], sav, avg, sum ? fixed2(sum->row_average_saving[r]) : "-");
    }
    if (rows > 1) {
        std::vector<std::string> sav;
        for (std::size_t c = 0; c < cols; ++c)
            sav.push_back(sum ? fixed2(sum->column_average_saving[c]) : "-");
        block("Average", col_avg, sav, grand, sum ? fixed2(sum->grand_average_saving) : "-");
    }

    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& l : lines)
        for (std::size_t c = 0; c < l.size(); ++c)
            width[c] = std::max(width[c], l[c].size());
    for (const auto& l : lines) {
        std::string out;
        for (std::size_t c = 0; c < l.size(); ++c) {
            if (c < 2)
                out += l[c] + std::string(width[c] - l[c].size(), ' ');
            else
                out += std::string(width[c] - l[c].size(), ' ') + l[c];
            if (c + 1 < l.size())
                out += "  ";
        }
        while (!out.empty() && out.back() == ' ')
            out.pop_back();
        os << out << '\n';
    }
}

metrics::TableInput read_table_csv(std::istream& is, const std::string& source)
{
    std::string line;
    std::size_t number = 0;
    if (!next_line(is, line, number) || line != "measure,class,variance_lam,variance_lfam")
        throw InputError(where(source, number) + ": header must be measure,class,variance_lam,variance_lfam");

    metrics::TableInput t;
    std::map<std::pair<std::size_t, std::size_t>, metrics::VariancePair> cells;
    auto index_of = [](std::vector<std::string>& labels, std::string_view name) {
        auto it = std::find(labels.begin(), labels.end(), name);
        if (it != labels.end())
            return static_cast<std::size_t>(it - labels.begin());
        labels.emplace_back(name);
        return labels.size() - 1;
    };
    while (next_line(is, line, number)) {
        const auto f = split_csv(line);
        const std::string at = where(source, number);
        if (f.size() != 4)
            throw InputError(at + ": expected 4 fields");
        const std::size_t r = index_of(t.row_labels, f[0]);
        const std::size_t c = index_of(t.column_labels, f[1]);
        const metrics::VariancePair v{parse_number(f[2], at + ": variance_lam"),
                                      parse_number(f[3], at + ": variance_lfam")};
        if (!(v.lam >= 0.0) || !(v.lfam >= 0.0))
            throw InputError(at + ": variances must be non-negative");
        if (!cells.emplace(std::pair{r, c}, v).second)
            throw InputError(at + ": duplicate cell " + std::string(f[0]) + " / " + std::string(f[1]));
    }
    if (cells.empty())
        throw InputError(source + ": no rows");
    for (std::size_t r = 0; r < t.row_labels.size(); ++r) {
        t.cells.emplace_back();
        for (std::size_t c = 0; c < t.column_labels.size(); ++c) {
            auto it = cells.find({r, c});
            if (it == cells.end())
                throw InputError(source + ": inconsistent grid, no cell for " + t.row_labels[r] + " / "
                                 + t.column_labels[c]);
            t.cells.back().push_back(it->second);
        }
    }
    return t;
}

} // namespace statmux::cli
