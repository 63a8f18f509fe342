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

#include "ddmpc/preprocess.hpp"

#include <cmath>
#include <limits>

#include "gtest/gtest.h"

namespace ddmpc {
namespace {

constexpr double kNoOutliers = std::numeric_limits<double>::infinity();

TrajectoryData smooth_data(Eigen::Index n, double dt) {
    Eigen::MatrixXd u(2, n), y(3, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        u(0, k) = 0.02 * std::sin(0.7 * t);
        u(1, k) = 0.02 * std::cos(0.3 * t);
        y(0, k) = 10.0 * t;
        y(1, k) = std::sin(0.2 * t);
        y(2, k) = 0.1 * std::cos(0.2 * t);
    }
    return TrajectoryData(Signal(u), Signal(y), dt);
}

TEST(PreprocessTest, UniformDataWithoutOutlierRuleIsIdentity) {
    const TrajectoryData raw = smooth_data(40, 0.05);
    const TrajectoryData out = preprocess(raw, 0.05, kNoOutliers);
    ASSERT_EQ(out.length(), raw.length());
    EXPECT_EQ(out.inputs, raw.inputs);
    EXPECT_EQ(out.outputs, raw.outputs);
}

TEST(PreprocessTest, CleanUniformDataIsIdempotentUnderDefaultRule) {
    const TrajectoryData raw = smooth_data(200, 0.05);
    const TrajectoryData once = preprocess(raw, 0.05, 3.0);
    const TrajectoryData twice = preprocess(once, 0.05, 3.0);
    EXPECT_LT((once.outputs.matrix() - raw.outputs.matrix()).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LT((twice.inputs.matrix() - once.inputs.matrix()).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LT((twice.outputs.matrix() - once.outputs.matrix()).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(PreprocessTest, SpikeReplacedByNeighbours) {
    const TrajectoryData raw(Signal::scalar({1, 1, 1, 1, 1}), Signal::scalar({0, 0, 100, 0, 0}),
                             1.0);
    PreprocessReport report;
    const TrajectoryData out = preprocess(raw, 1.0, 3.0, &report);
    EXPECT_EQ(out.outputs.matrix()(0, 2), 0.0);
    EXPECT_EQ(report.outliers_replaced, 1);
    EXPECT_EQ(report.output_length, 5);
}

TEST(PreprocessTest, SpikeOnSlopeInterpolatesLinearly) {
    const TrajectoryData raw(Signal::scalar({0, 0, 0, 0, 0, 0, 0}),
                             Signal::scalar({0, 1, 2, 50, 4, 5, 6}), 1.0);
    const TrajectoryData out = preprocess(raw, 1.0, 2.0);
    EXPECT_DOUBLE_EQ(out.outputs.matrix()(0, 3), 3.0);
}

TEST(PreprocessTest, ResamplesLinearly) {
    TimedTrajectory raw{{0.0, 1.0}, Signal::scalar({0, 2}), Signal::scalar({0, 2})};
    const TrajectoryData out = preprocess(raw, 0.5, kNoOutliers);
    ASSERT_EQ(out.length(), 3);
    EXPECT_DOUBLE_EQ(out.outputs.matrix()(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(out.outputs.matrix()(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(out.outputs.matrix()(0, 2), 2.0);
    EXPECT_DOUBLE_EQ(out.sample_time, 0.5);
}

TEST(PreprocessTest, FillsSparseSegments) {
    // Dense at the start, sparse later, as when a vehicle speeds up.
    TimedTrajectory raw{{0.0, 0.1, 0.2, 0.6, 1.0},
                        Signal::scalar({0, 1, 2, 6, 10}),
                        Signal::scalar({0, 1, 2, 6, 10})};
    const TrajectoryData out = preprocess(raw, 0.1, kNoOutliers);
    ASSERT_EQ(out.length(), 11);
    for (Eigen::Index k = 0; k < 11; ++k)
        EXPECT_NEAR(out.outputs.matrix()(0, k), static_cast<double>(k), 1e-12);
}

TEST(PreprocessTest, RejectsSingleSample) {
    const TrajectoryData raw(Signal::scalar({1}), Signal::scalar({1}), 1.0);
    EXPECT_THROW(preprocess(raw, 1.0, 3.0), std::invalid_argument);
}

TEST(PreprocessTest, RejectsNonIncreasingTime) {
    TimedTrajectory raw{{0.0, 0.0, 1.0}, Signal::scalar({0, 1, 2}), Signal::scalar({0, 1, 2})};
    EXPECT_THROW(preprocess(raw, 0.5, 3.0), std::invalid_argument);
}

TEST(PreprocessTest, ConstantChannelHasNoOutliers) {
    const TrajectoryData raw(Signal::scalar({0.3, 0.3, 0.3, 0.3}), Signal::scalar({1, 2, 3, 4}),
                             0.1);
    PreprocessReport report;
    preprocess(raw, 0.1, 3.0, &report);
    EXPECT_EQ(report.outliers_replaced, 0);
}

}  // namespace
}  // namespace ddmpc
