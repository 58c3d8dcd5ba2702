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

#include "statmux/metrics.hpp"

#include <cmath>

namespace statmux::metrics
{

double psnr_from_mse(Distortion mse)
{
    if (!mse.valid())
        throw Error(ErrorKind::invalid_argument, "psnr_from_mse: mse must be positive");
    return 10.0 * std::log10(peak_squared / mse.mse);
}

Distortion mse_from_psnr(double psnr_db)
{
    if (!std::isfinite(psnr_db))
        throw Error(ErrorKind::invalid_argument, "mse_from_psnr: psnr must be finite");
    return Distortion(peak_squared / std::pow(10.0, psnr_db / 10.0));
}

namespace
{

double mean_of(std::span<const Distortion> mses)
{
    double sum = 0.0;
    for (Distortion d : mses)
        sum += d.mse;
    return sum / static_cast<double>(mses.size());
}

void need_two(std::span<const Distortion> mses)
{
    if (mses.size() < 2)
        throw Error(ErrorKind::invalid_argument, "variance needs at least 2 values");
}

} // namespace

double variance_of_mse(std::span<const Distortion> mses)
{
    need_two(mses);
    const double mean = mean_of(mses);
    double ss = 0.0;
    for (Distortion d : mses)
        ss += (d.mse - mean) * (d.mse - mean);
    return ss / static_cast<double>(mses.size());
}

double abs_deviation_sum(std::span<const Distortion> mses)
{
    need_two(mses);
    const double mean = mean_of(mses);
    double sum = 0.0;
    for (Distortion d : mses)
        sum += std::abs(d.mse - mean);
    return sum;
}

double saving(double variance_lam, double variance_lfam)
{
    if (variance_lam == 0.0)
        throw Error(ErrorKind::undefined_saving, "saving: baseline variance is zero");
    if (!(variance_lam > 0.0) || !(variance_lfam >= 0.0))
        throw Error(ErrorKind::invalid_argument, "saving: variances must be non-negative");
    return 100.0 * (variance_lam - variance_lfam) / variance_lam;
}

GopReport make_gop_report(SuperGopIndex k, std::span<const RateBits> allocated,
                          std::span<const FeedbackRecord> achieved)
{
    if (allocated.size() != achieved.size())
        throw Error(ErrorKind::invalid_argument, "gop report: allocation and feedback counts differ");

    GopReport r;
    r.k = k;
    std::vector<Distortion> mses;
    mses.reserve(achieved.size());
    for (std::size_t i = 0; i < achieved.size(); ++i) {
        r.streams.push_back({allocated[i], achieved[i], psnr_from_mse(achieved[i].achieved_distortion)});
        mses.push_back(achieved[i].achieved_distortion);
    }
    r.mean_mse = mean_of(mses);
    r.variance_mse = variance_of_mse(mses);
    r.abs_dev_sum = abs_deviation_sum(mses);
    return r;
}

RunSummary summarize(std::string allocator, std::vector<GopReport> gops)
{
    RunSummary s;
    s.allocator = std::move(allocator);
    s.gops = std::move(gops);
    if (s.gops.size() < 2)
        throw Error(ErrorKind::invalid_argument, "summary needs at least 2 super GOPs");

    const std::size_t n = s.gops.front().streams.size();
    s.average_psnr.assign(n, 0.0);
    const double counted = static_cast<double>(s.gops.size() - 1);
    for (std::size_t k = 1; k < s.gops.size(); ++k) {
        const GopReport& g = s.gops[k];
        s.average_variance += g.variance_mse;
        s.average_abs_dev += g.abs_dev_sum;
        for (std::size_t i = 0; i < n; ++i)
            s.average_psnr[i] += g.streams[i].psnr_db;
    }
    s.average_variance /= counted;
    s.average_abs_dev /= counted;
    for (double& p : s.average_psnr)
        p /= counted;
    return s;
}

TableSummary aggregate_table(const TableInput& input)
{
    const std::size_t rows = input.cells.size();
    if (rows == 0 || input.cells.front().empty())
        throw Error(ErrorKind::invalid_argument, "aggregate_table: empty table");
    const std::size_t cols = input.cells.front().size();
    for (const auto& row : input.cells)
        if (row.size() != cols)
            throw Error(ErrorKind::invalid_argument, "aggregate_table: ragged table");

    TableSummary t;
    t.cell_saving.assign(rows, std::vector<double>(cols, 0.0));
    t.row_average.assign(rows, {});
    t.row_average_saving.assign(rows, 0.0);
    t.column_average.assign(cols, {});
    t.column_average_saving.assign(cols, 0.0);

    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const VariancePair& v = input.cells[r][c];
            t.cell_saving[r][c] = saving(v.lam, v.lfam);
            t.row_average[r].lam += v.lam / static_cast<double>(cols);
            t.row_average[r].lfam += v.lfam / static_cast<double>(cols);
            t.row_average_saving[r] += t.cell_saving[r][c] / static_cast<double>(cols);
            t.column_average[c].lam += v.lam / static_cast<double>(rows);
            t.column_average[c].lfam += v.lfam / static_cast<double>(rows);
        }
    }
    for (std::size_t c = 0; c < cols; ++c)
        t.column_average_saving[c] = saving(t.column_average[c].lam, t.column_average[c].lfam);
    for (std::size_t r = 0; r < rows; ++r) {
        t.grand_average.lam += t.row_average[r].lam / static_cast<double>(rows);
        t.grand_average.lfam += t.row_average[r].lfam / static_cast<double>(rows);
        t.grand_average_saving += t.row_average_saving[r] / static_cast<double>(rows);
    }
    return t;
}

} // namespace statmux::metrics
