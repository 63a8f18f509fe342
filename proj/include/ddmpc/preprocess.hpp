// Copyright 2026 The DDMPC Steering Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <ddmpc/signal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ddmpc {

/// A trajectory with explicit, possibly non-uniform, time stamps.
struct TimedTrajectory {
    std::vector<double> time;
    Signal inputs;
    Signal outputs;

    static TimedTrajectory fromUniform(const TrajectoryData& data) {
        TimedTrajectory out{std::vector<double>(static_cast<size_t>(data.length())),
                            data.inputs, data.outputs};
        for (size_t k = 0; k < out.time.size(); ++k)
            out.time[k] = static_cast<double>(k) * data.sample_time;
        return out;
    }
};

struct PreprocessReport {
    Eigen::Index input_length = 0;
    Eigen::Index output_length = 0;
    Eigen::Index outliers_replaced = 0;
};

namespace detail {

/**
 * Leave-one-out z-score per sample: the sample is compared against the mean and
 * standard deviation of the remaining samples, so a single spike cannot mask
 * itself by inflating the spread.
 */
inline std::vector<bool> flag_outliers(const Eigen::VectorXd& x, double outlier_z) {
    const auto n = x.size();
    std::vector<bool> flagged(static_cast<size_t>(n), false);
    if (!std::isfinite(outlier_z) || n < 3) return flagged;
    const double sum = x.sum();
    const double sum_sq = x.squaredNorm();
    const double m = static_cast<double>(n - 1);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double mean = (sum - x(k)) / m;
        const double var = std::max(0.0, (sum_sq - x(k) * x(k)) / m - mean * mean);
        const double dev = std::abs(x(k) - mean);
        const double sd = std::sqrt(var);
        // Relative floor so that roundoff on a constant channel never flags.
        const double floor = 1e-12 * std::max(1.0, std::abs(mean));
        if (dev <= floor) continue;
        if (sd <= floor || dev / sd > outlier_z) flagged[static_cast<size_t>(k)] = true;
    }
    return flagged;
}

inline int replace_outliers(Eigen::MatrixXd& channels, const std::vector<double>& time,
                            double outlier_z) {
    int replaced = 0;
    const auto n = channels.cols();
    for (Eigen::Index c = 0; c < channels.rows(); ++c) {
        const Eigen::VectorXd row = channels.row(c).transpose();
        const std::vector<bool> bad = flag_outliers(row, outlier_z);
        for (Eigen::Index k = 0; k < n; ++k) {
            if (!bad[static_cast<size_t>(k)]) continue;
            Eigen::Index lo = k - 1;
            while (lo >= 0 && bad[static_cast<size_t>(lo)]) --lo;
            Eigen::Index hi = k + 1;
            while (hi < n && bad[static_cast<size_t>(hi)]) ++hi;
            double value;
            if (lo >= 0 && hi < n) {
                const double w = (time[static_cast<size_t>(k)] - time[static_cast<size_t>(lo)]) /
                                 (time[static_cast<size_t>(hi)] - time[static_cast<size_t>(lo)]);
                value = (1.0 - w) * row(lo) + w * row(hi);
            } else if (lo >= 0) {
                value = row(lo);
            } else if (hi < n) {
                value = row(hi);
            } else {
                continue;
            }
            channels(c, k) = value;
            ++replaced;
        }
    }
    return replaced;
}

inline Eigen::MatrixXd resample(const Eigen::MatrixXd& channels, const std::vector<double>& time,
                                const std::vector<double>& grid) {
    Eigen::MatrixXd out(channels.rows(), static_cast<Eigen::Index>(grid.size()));
    size_t seg = 0;
    for (size_t g = 0; g < grid.size(); ++g) {
        const double t = grid[g];
        while (seg + 2 < time.size() && time[seg + 1] < t) ++seg;
        const double t0 = time[seg];
        const double t1 = time[seg + 1];
        const double w = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
        const auto col = static_cast<Eigen::Index>(g);
        if (w == 0.0)
            out.col(col) = channels.col(static_cast<Eigen::Index>(seg));
        else if (w == 1.0)
            out.col(col) = channels.col(static_cast<Eigen::Index>(seg + 1));
        else
            out.col(col) = (1.0 - w) * channels.col(static_cast<Eigen::Index>(seg)) +
                           w * channels.col(static_cast<Eigen::Index>(seg + 1));
    }
    return out;
}

}  // namespace detail

/**
 * @brief Clean a raw record and resample it onto a uniform grid.
 *
 * Outliers (leave-one-out z-score above `outlier_z`, per channel) are replaced by
 * linear interpolation between their nearest clean neighbours, then every channel
 * is linearly resampled at multiples of `target_sample_time` from the first stamp.
 * Pass an infinite `outlier_z` to disable outlier replacement.
 */
inline TrajectoryData preprocess(const TimedTrajectory& raw, double target_sample_time,
                                 double outlier_z, PreprocessReport* report = nullptr) {
    const size_t n = raw.time.size();
    if (n < 2 || raw.inputs.length() < 2)
        throw std::invalid_argument("preprocess: at least 2 samples are needed to interpolate");
    if (static_cast<Eigen::Index>(n) != raw.inputs.length() ||
        raw.inputs.length() != raw.outputs.length())
        throw std::invalid_argument("preprocess: time, input and output lengths differ");
    if (!(target_sample_time > 0.0))
        throw std::invalid_argument("preprocess: target_sample_time must be positive");
    for (size_t k = 1; k < n; ++k)
        if (!(raw.time[k] > raw.time[k - 1]))
            throw std::invalid_argument("preprocess: time stamps must be strictly increasing");

    Eigen::MatrixXd u = raw.inputs.matrix();
    Eigen::MatrixXd y = raw.outputs.matrix();
    int replaced = detail::replace_outliers(u, raw.time, outlier_z);
    replaced += detail::replace_outliers(y, raw.time, outlier_z);

    const double span = raw.time.back() - raw.time.front();
    const auto steps = static_cast<size_t>(std::floor(span / target_sample_time + 1e-9));
    std::vector<double> grid(steps + 1);
    for (size_t k = 0; k <= steps; ++k)
        grid[k] = raw.time.front() + static_cast<double>(k) * target_sample_time;

    TrajectoryData out(Signal(detail::resample(u, raw.time, grid)),
                       Signal(detail::resample(y, raw.time, grid)), target_sample_time);
    if (report) {
        report->input_length = static_cast<Eigen::Index>(n);
        report->output_length = out.length();
        report->outliers_replaced = replaced;
    }
    return out;
}

inline TrajectoryData preprocess(const TrajectoryData& raw, double target_sample_time,
                                 double outlier_z, PreprocessReport* report = nullptr) {
    return preprocess(TimedTrajectory::fromUniform(raw), target_sample_time, outlier_z, report);
}

}  // namespace ddmpc
