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

#include <span>
#include <string>
#include <vector>

namespace statmux::metrics
{

/// 8-bit peak, 255^2.
inline constexpr double peak_squared = 65025.0;

double psnr_from_mse(Distortion mse);
Distortion mse_from_psnr(double psnr_db);

/// Population variance, (1/N) * sum (mse_i - mean)^2.
double variance_of_mse(std::span<const Distortion> mses);

/// Sum of absolute deviations from the mean.
double abs_deviation_sum(std::span<const Distortion> mses);

/// Percentage of the baseline variance removed by the candidate.
double saving(double variance_lam, double variance_lfam);

struct StreamGop
{
    RateBits allocated;
    FeedbackRecord achieved;
    double psnr_db = 0.0;

    Distortion mse() const { return achieved.achieved_distortion; }
};

struct GopReport
{
    SuperGopIndex k;
    std::vector<StreamGop> streams;
    double mean_mse = 0.0;
    double variance_mse = 0.0;
    double abs_dev_sum = 0.0;
    std::vector<std::string> warnings;
};

/// Fills psnr and the cross-stream statistics from allocations and feedback.
GopReport make_gop_report(SuperGopIndex k, std::span<const RateBits> allocated,
                          std::span<const FeedbackRecord> achieved);

struct RunSummary
{
    std::string allocator;
    std::vector<GopReport> gops;
    double average_variance = 0.0; ///< over super GOPs k >= 1
    double average_abs_dev = 0.0;
    std::vector<double> average_psnr; ///< per stream, over k >= 1
};

/// Builds the averages; the first super GOP (uniform initialization) is left out.
RunSummary summarize(std::string allocator, std::vector<GopReport> gops);

struct VariancePair
{
    double lam = 0.0;
    double lfam = 0.0;
};

/// Rows are complexity measures, columns are stream sets (classes).
struct TableInput
{
    std::vector<std::string> row_labels;
    std::vector<std::string> column_labels;
    std::vector<std::vector<VariancePair>> cells;
};

struct TableSummary
{
    std::vector<std::vector<double>> cell_saving;
    std::vector<VariancePair> row_average;   ///< mean variance over columns
    std::vector<double> row_average_saving;  ///< mean of the row's cell savings
    std::vector<VariancePair> column_average; ///< mean variance over rows
    std::vector<double> column_average_saving; ///< saving of the averaged variances
    VariancePair grand_average;              ///< mean of row averages
    double grand_average_saving = 0.0;       ///< mean of row average savings
};

/// Aggregation used by the LAM/LFAM comparison table. Note the asymmetry:
/// a row's Average saving is the mean of its per-column savings, while the
/// Average row's per-column saving is the saving of the averaged variances.
TableSummary aggregate_table(const TableInput& input);

} // namespace statmux::metrics
