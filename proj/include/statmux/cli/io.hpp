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

#include "statmux/cli/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace statmux::cli
{

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);
/// Strict parse of a whole field; throws InputError naming `what`.
double parse_number(std::string_view field, const std::string& what);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string_view> split_csv(std::string_view line);

/// gop_report.csv: allocator,gop,stream,allocated_bits,achieved_bits,mse,psnr_db
void write_gop_report(std::ostream& os, std::span<const metrics::RunSummary> runs);
/// Rebuilds the per-allocator reports; statistics are recomputed from the rows.
std::vector<metrics::RunSummary> read_gop_report(std::istream& is);

/// summary.csv: allocator,avg_variance,avg_abs_dev,avg_psnr_s0,...
void write_summary(std::ostream& os, std::span<const metrics::RunSummary> runs);

struct SummaryRow
{
    std::string allocator;
    double avg_variance = 0.0;
    double avg_abs_dev = 0.0;
    std::vector<double> avg_psnr;
};
std::vector<SummaryRow> read_summary(std::istream& is, const std::string& source);

/// Per-GOP variance of every allocator, one row per super GOP.
void write_variance_dat(std::ostream& os, std::span<const metrics::RunSummary> runs);

struct RunMeta
{
    std::string scenario;
    std::string measure;
    std::uint64_t seed = 0;
};
void write_run_meta(std::ostream& os, const RunMeta& meta);
RunMeta read_run_meta(std::istream& is, const std::string& source);

/// One (stream, gop) cell of a trace.
struct TraceCell
{
    double complexity = 0.0;
    std::vector<RdSample> samples;
};

/// Rectangular trace, indexed [stream][gop].
struct Trace
{
    bool has_samples = false;
    std::vector<std::vector<TraceCell>> cells;

    std::size_t streams() const { return cells.size(); }
    std::size_t gops() const { return cells.empty() ? 0 : cells.front().size(); }
};

/// Reads `stream,gop,complexity[,rate,mse]`. Streams and GOPs are numbered
/// from 0 and every stream must cover every GOP.
Trace read_trace(std::istream& is, const std::string& source);
Trace load_trace(const std::string& path);
void write_trace(std::ostream& os, const Trace& trace);

/// Aligned text table: LAM, LFAM and saving rows per measure, plus averages.
void write_table(std::ostream& os, const metrics::TableInput& input);

/// `measure,class,variance_lam,variance_lfam`, one row per cell.
metrics::TableInput read_table_csv(std::istream& is, const std::string& source);

} // namespace statmux::cli
