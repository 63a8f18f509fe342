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

#include "ddmpc/trajectory_io.hpp"

#include <filesystem>
#include <random>
#include <sstream>

#include "gtest/gtest.h"

namespace ddmpc {
namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::path(::testing::TempDir()) / name;
}

TEST(TrajectoryIoTest, SaveLoadRoundTrip) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd u(2, 57), y(3, 57);
    for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = normal(rng) * 1e-2;
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = normal(rng) * 1e2;
    const TrajectoryData data(Signal(u), Signal(y), 0.05);

    const auto path = temp_file("roundtrip.csv");
    save_trajectory(data, path);
    const TrajectoryData loaded = load_trajectory(path);
    ASSERT_EQ(loaded.length(), 57);
    ASSERT_EQ(loaded.inputDim(), 2);
    ASSERT_EQ(loaded.outputDim(), 3);
    EXPECT_LT((loaded.inputs.matrix() - u).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_LT((loaded.outputs.matrix() - y).lpNorm<Eigen::Infinity>(), 1e-12);
    EXPECT_NEAR(loaded.sample_time, 0.05, 1e-12);
}

TEST(TrajectoryIoTest, CommentsAndBlankLinesAreSkipped) {
    std::istringstream in("# collected open loop\n\nt,u1,y1,y2\n0,1,2,3\n# mid comment\n0.1,4,5,6\n");
    const TimedTrajectory t = read_trajectory_csv(in);
    ASSERT_EQ(t.time.size(), 2u);
    EXPECT_EQ(t.outputs.matrix()(1, 1), 6.0);
}

TEST(TrajectoryIoTest, WrongArityReportsLine) {
    std::istringstream in("t,u1,y1\n0,1,2\n0.1,1\n");
    try {
        read_trajectory_csv(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(TrajectoryIoTest, EmptyFileHasNoSamples) {
    std::istringstream in("");
    try {
        read_trajectory_csv(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("no samples"), std::string::npos);
    }
    std::istringstream header_only("t,u1,y1\n");
    EXPECT_THROW(read_trajectory_csv(header_only), ParseError);
}

TEST(TrajectoryIoTest, BadNumberReportsLine) {
    std::istringstream in("t,u1,y1\n0,abc,2\n");
    try {
        read_trajectory_csv(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
    }
}

TEST(TrajectoryIoTest, HeaderMustNameChannelsInOrder) {
    std::istringstream in("t,y1,u1\n0,1,2\n");
    EXPECT_THROW(read_trajectory_csv(in), ParseError);
    std::istringstream missing("t,u1\n0,1\n");
    EXPECT_THROW(read_trajectory_csv(missing), ParseError);
}

TEST(TrajectoryIoTest, NonUniformStampsNeedPreprocessing) {
    const auto path = temp_file("nonuniform.csv");
    {
        std::ofstream out(path);
        out << "t,u1,y1\n0,0,0\n0.1,0,0\n0.5,0,0\n";
    }
    EXPECT_THROW(load_trajectory(path), ParseError);
    EXPECT_EQ(load_timed_trajectory(path).time.size(), 3u);
}

}  // namespace
}  // namespace ddmpc
