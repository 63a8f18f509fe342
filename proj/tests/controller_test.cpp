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

#include "ddmpc/controller.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "gtest/gtest.h"
#include "lti_helpers.hpp"

namespace ddmpc {
namespace {

using testing::LtiSystem;
using testing::randn;
using testing::random_lti;
using testing::random_lti_data;

constexpr double kInf = std::numeric_limits<double>::infinity();

DdmpcConfig make_config(Eigen::Index m, Eigen::Index p, Eigen::Index L, Eigen::Index v,
                        double lambda = 1e-3, double q = 1.0, double r = 1e-2) {
    DdmpcConfig cfg;
    cfg.horizon = L;
    cfg.order_bound = v;
    cfg.output_weight = q * Eigen::MatrixXd::Identity(p, p);
    cfg.input_weight = r * Eigen::MatrixXd::Identity(m, m);
    cfg.lambda = lambda;
    cfg.u_min = Eigen::VectorXd::Constant(m, -kInf);
    cfg.u_max = Eigen::VectorXd::Constant(m, kInf);
    return cfg;
}

LtiSystem scalar_plant() {
    // y+ = 0.5 y + u
    LtiSystem sys;
    sys.A = Eigen::MatrixXd::Constant(1, 1, 0.5);
    sys.B = Eigen::MatrixXd::Ones(1, 1);
    sys.C = Eigen::MatrixXd::Ones(1, 1);
    return sys;
}

HistoryBuffer zero_history(const DataDictionary& dict) {
    HistoryBuffer h(dict.pastSteps(), dict.inputDim(), dict.outputDim());
    for (Eigen::Index k = 0; k < dict.pastSteps(); ++k)
        h.push(Eigen::VectorXd::Zero(dict.inputDim()), Eigen::VectorXd::Zero(dict.outputDim()));
    return h;
}

TEST(DictionaryTest, ShapesFollowHorizonAndOrderBound) {
    std::mt19937_64 rng(1);
    const auto sys = random_lti(rng, 2, 1, 1);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, sys, 40), make_config(1, 1, 4, 2));
    EXPECT_EQ(dict.inputHankel().order, 6);
    EXPECT_EQ(dict.outputHankel().order, 6);
    EXPECT_EQ(dict.columns(), 35);
    EXPECT_TRUE(dict.peVerified());
}

TEST(DictionaryTest, ConstantInputIsRejected) {
    const TrajectoryData data(Signal(Eigen::MatrixXd::Ones(1, 40)),
                              Signal(Eigen::MatrixXd::Ones(1, 40)), 1.0);
    try {
        build_dictionary(data, make_config(1, 1, 4, 2));
        FAIL() << "expected ExcitationError";
    } catch (const ExcitationError& e) {
        EXPECT_NE(std::string(e.what()).find("not persistently exciting"), std::string::npos);
        EXPECT_EQ(e.report().numerical_rank, 1);
        EXPECT_EQ(e.report().required_rank, 8);
    }
}

TEST(DictionaryTest, TooShortRecordNamesMinimumLength) {
    std::mt19937_64 rng(2);
    const auto sys = random_lti(rng, 2, 1, 1);
    // L + 2v = 8 samples: one Hankel column, but rank 8 needs 8 columns.
    const TrajectoryData data = random_lti_data(rng, sys, 8);
    EXPECT_EQ(minimum_data_length(1, 8), 15);
    try {
        build_dictionary(data, make_config(1, 1, 4, 2));
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("N = 15"), std::string::npos) << e.what();
    }
    // One sample short of the bound still fails, the bound itself passes.
    EXPECT_THROW(build_dictionary(random_lti_data(rng, sys, 14), make_config(1, 1, 4, 2)),
                 std::invalid_argument);
    EXPECT_NO_THROW(build_dictionary(random_lti_data(rng, sys, 15), make_config(1, 1, 4, 2)));
}

TEST(DictionaryTest, RejectsDimensionMismatch) {
    std::mt19937_64 rng(3);
    const auto sys = random_lti(rng, 2, 1, 2);
    EXPECT_THROW(build_dictionary(random_lti_data(rng, sys, 60), make_config(1, 1, 4, 2)),
                 std::invalid_argument);
}

TEST(PredictTest, ZeroAlphaGivesZeroTrajectory) {
    std::mt19937_64 rng(4);
    const auto sys = random_lti(rng, 2, 1, 2);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, sys, 50), make_config(1, 2, 4, 2));
    const PredictedTrajectory t = predict_trajectory(dict, Eigen::VectorXd::Zero(dict.columns()));
    EXPECT_EQ(t.inputs.cols(), 6);
    EXPECT_TRUE(t.inputs.isZero(0.0));
    EXPECT_TRUE(t.outputs.isZero(0.0));
}

TEST(PredictTest, UnitAlphaReturnsRecordedWindow) {
    std::mt19937_64 rng(5);
    const auto sys = random_lti(rng, 2, 1, 2);
    const TrajectoryData data = random_lti_data(rng, sys, 50);
    const DataDictionary dict = build_dictionary(data, make_config(1, 2, 4, 2));
    const Eigen::Index j = 7;
    const PredictedTrajectory t =
        predict_trajectory(dict, Eigen::VectorXd::Unit(dict.columns(), j));
    EXPECT_EQ(t.inputs, data.inputs.matrix().middleCols(j, 6));
    EXPECT_EQ(t.outputs, data.outputs.matrix().middleCols(j, 6));
}

TEST(PredictTest, AlphaLengthMismatchThrows) {
    std::mt19937_64 rng(6);
    const auto sys = random_lti(rng, 2, 1, 1);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, sys, 40), make_config(1, 1, 4, 2));
    EXPECT_THROW(predict_trajectory(dict, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST(PredictTest, AnyAlphaIsASystemTrajectory) {
    // Oracle: fit the initial state by least squares from the predicted
    // inputs/outputs, re-simulate the state-space model, compare.
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto sys = random_lti(rng, 3, 2, 2);
        const DataDictionary dict =
            build_dictionary(random_lti_data(rng, sys, 120), make_config(2, 2, 6, 3));
        const Eigen::VectorXd alpha = randn(rng, dict.columns(), 1) / 10.0;
        const PredictedTrajectory t = predict_trajectory(dict, alpha);
        const Eigen::Index T = dict.totalSteps();
        // y = O x0 + (forced response from u); subtract the forced part first.
        const Eigen::MatrixXd forced = sys.simulate(Eigen::VectorXd::Zero(3), t.inputs);
        const Eigen::VectorXd free = (t.outputs - forced).reshaped();
        const Eigen::MatrixXd O = sys.observability(T);
        const Eigen::VectorXd x0 = O.colPivHouseholderQr().solve(free);
        const Eigen::MatrixXd resim = sys.simulate(x0, t.inputs);
        EXPECT_LT((resim - t.outputs).lpNorm<Eigen::Infinity>(), 1e-8) << "trial " << trial;
    }
}

TEST(HistoryBufferTest, KeepsLastSamplesOldestFirst) {
    HistoryBuffer h(2, 1, 1);
    EXPECT_FALSE(h.warmedUp());
    h.push(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 10.0));
    h.push(Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, 20.0));
    h.push(Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Constant(1, 30.0));
    EXPECT_TRUE(h.warmedUp());
    EXPECT_EQ(h.stackedInputs(), Eigen::Vector2d(2.0, 3.0));
    EXPECT_EQ(h.stackedOutputs(), Eigen::Vector2d(20.0, 30.0));
    EXPECT_THROW(h.push(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(1)), std::invalid_argument);
}

TEST(AssembleTest, ZeroProblemHasZeroOptimum) {
    std::mt19937_64 rng(8);
    const auto sys = random_lti(rng, 2, 1, 2);
    const DdmpcConfig cfg = make_config(1, 2, 4, 2, 0.0, 1.0, 1.0);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, sys, 50), cfg);
    const HistoryBuffer hist = zero_history(dict);
    const DdmpcQp qp = assemble_qp(dict, cfg, hist, Eigen::MatrixXd::Zero(2, 4),
                                   Eigen::MatrixXd::Zero(1, 4));
    EXPECT_EQ(qp.problem.eq_matrix.rows(), (1 + 2) * 2);
    // Hessian in alpha = 2 M'M with M the stacked future blocks (Q = R = I).
    Eigen::MatrixXd M(4 * 3, dict.columns());
    M << dict.inputHankel().data.bottomRows(4), dict.outputHankel().data.bottomRows(8);
    EXPECT_LT((qp.hessianInAlpha() - 2.0 * M.transpose() * M).norm(), 1e-9);
    EXPECT_EQ(qp.cost(Eigen::VectorXd::Zero(dict.columns())), 0.0);
    EXPECT_EQ(qp.problem.constant, 0.0);
    EXPECT_TRUE(qp.problem.linear.isZero(0.0));
}

TEST(AssembleTest, ReducedObjectiveMatchesAlphaCost) {
    std::mt19937_64 rng(9);
    const auto sys = random_lti(rng, 3, 2, 2);
    const DdmpcConfig cfg = make_config(2, 2, 5, 3, 1e-2);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, sys, 100), cfg);
    HistoryBuffer hist(3, 2, 2);
    for (int k = 0; k < 3; ++k) hist.push(randn(rng, 2, 1), randn(rng, 2, 1));
    const DdmpcQp qp = assemble_qp(dict, cfg, hist, randn(rng, 2, 5), randn(rng, 2, 5));
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd z = randn(rng, qp.problem.variables(), 1);
        const double direct = qp.cost(qp.alphaFrom(z));
        EXPECT_NEAR(qp.problem.objective(z), direct, 1e-9 * (1.0 + direct));
    }
}

TEST(AssembleTest, GradientMatchesCentralDifferences) {
    std::mt19937_64 rng(10);
    const auto sys = random_lti(rng, 3, 2, 3);
    const DdmpcConfig cfg = make_config(2, 3, 5, 3, 1e-3);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, sys, 100), cfg);
    HistoryBuffer hist(3, 2, 3);
    for (int k = 0; k < 3; ++k) hist.push(randn(rng, 2, 1), randn(rng, 3, 1));
    const DdmpcQp qp = assemble_qp(dict, cfg, hist, randn(rng, 3, 5), Eigen::MatrixXd::Zero(2, 5));
    const Eigen::VectorXd alpha = randn(rng, dict.columns(), 1) * 0.1;
    const Eigen::VectorXd grad = qp.gradient(alpha);
    const double h = 1e-5;
    Eigen::VectorXd fd(alpha.size());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        Eigen::VectorXd ap = alpha, am = alpha;
        ap(i) += h;
        am(i) -= h;
        fd(i) = (qp.cost(ap) - qp.cost(am)) / (2.0 * h);
    }
    EXPECT_LT((fd - grad).norm() / grad.norm(), 1e-6);
}

TEST(AssembleTest, RejectsShortReferenceAndColdHistory) {
    std::mt19937_64 rng(11);
    const auto sys = random_lti(rng, 2, 1, 1);
    const DdmpcConfig cfg = make_config(1, 1, 4, 2);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, sys, 40), cfg);
    const HistoryBuffer warm = zero_history(dict);
    EXPECT_THROW(assemble_qp(dict, cfg, warm, Eigen::MatrixXd::Zero(1, 3), Eigen::MatrixXd::Zero(1, 4)),
                 std::invalid_argument);
    HistoryBuffer cold(2, 1, 1);
    cold.push(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
    EXPECT_THROW(assemble_qp(dict, cfg, cold, Eigen::MatrixXd::Zero(1, 4), Eigen::MatrixXd::Zero(1, 4)),
                 std::invalid_argument);
}

TEST(StepTest, EquilibriumGivesZeroInput) {
    std::mt19937_64 rng(12);
    const auto sys = random_lti(rng, 2, 1, 1);
    const DdmpcConfig cfg = make_config(1, 1, 4, 2);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, sys, 60), cfg);
    const DdmpcSolution sol = ddmpc_step(dict, cfg, zero_history(dict), Eigen::MatrixXd::Zero(1, 4),
                                         Eigen::MatrixXd::Zero(1, 4));
    ASSERT_EQ(sol.status, QpStatus::Converged);
    EXPECT_NEAR(sol.u_first(0), 0.0, 1e-12);
    EXPECT_NEAR(sol.cost, 0.0, 1e-20);
    EXPECT_GE(sol.solve_time, 0.0);
}

TEST(StepTest, ScalarPlantTracksStepReference) {
    std::mt19937_64 rng(13);
    const LtiSystem plant = scalar_plant();
    const DdmpcConfig cfg = make_config(1, 1, 10, 2, 1e-6, 1.0, 1e-4);
    auto dict = std::make_shared<const DataDictionary>(
        build_dictionary(random_lti_data(rng, plant, 80), cfg));
    DdmpcController ctl(dict, cfg);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    for (int k = 0; k < 2; ++k) ctl.record(Eigen::VectorXd::Zero(1), plant.C * x);
    const double r = 1.0;
    double u = 0.0, y = 0.0;
    for (int k = 0; k < 60; ++k) {
        y = (plant.C * x)(0);
        const DdmpcSolution sol = ctl.step(Eigen::MatrixXd::Constant(1, 10, r));
        ASSERT_EQ(sol.status, QpStatus::Converged);
        u = sol.u_first(0);
        ctl.record(sol.u_first, plant.C * x);
        x = plant.A * x + plant.B * sol.u_first;
    }
    // Steady state obeys the plant's d.c. gain y = u / (1 - 0.5).
    EXPECT_NEAR(u, 0.5 * y, 1e-8);
    EXPECT_NEAR(y, r, 1e-3);
}

TEST(StepTest, TightBoundClampsFirstInput) {
    std::mt19937_64 rng(14);
    const LtiSystem plant = scalar_plant();
    DdmpcConfig cfg = make_config(1, 1, 8, 2, 1e-4, 1.0, 1e-3);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, plant, 80), cfg);
    const HistoryBuffer hist = zero_history(dict);
    const Eigen::MatrixXd ref = Eigen::MatrixXd::Constant(1, 8, 2.0);
    const Eigen::MatrixXd uref = Eigen::MatrixXd::Zero(1, 8);

    const DdmpcSolution free = ddmpc_step(dict, cfg, hist, ref, uref);
    ASSERT_EQ(free.status, QpStatus::Converged);
    const double bound = 0.5 * free.u_first(0);
    ASSERT_GT(bound, 0.0);

    cfg.u_max(0) = bound;
    cfg.u_min(0) = -bound;
    const DdmpcQp qp = assemble_qp(dict, cfg, hist, ref, uref);
    const QpSolution raw = solve_qp(qp.problem, QpSettings{cfg.solver_tol, cfg.solver_max_iter});
    const DdmpcSolution clamped = solve_ddmpc_qp(qp, cfg);
    ASSERT_EQ(clamped.status, QpStatus::Converged);
    EXPECT_NEAR(clamped.u_first(0), bound, 1e-8);
    EXPECT_LT(kkt_residuals(qp.problem, raw).max(), 1e-8);
    for (Eigen::Index k = 0; k < 8; ++k) {
        EXPECT_LE(clamped.u_seq(0, k), bound + cfg.solver_tol);
        EXPECT_GE(clamped.u_seq(0, k), -bound - cfg.solver_tol);
    }
}

TEST(StepTest, PredictionStartsFromHistory) {
    std::mt19937_64 rng(15);
    const auto sys = random_lti(rng, 3, 2, 2);
    const DdmpcConfig cfg = make_config(2, 2, 6, 3);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, sys, 120), cfg);
    // Consistent history: a fresh simulated run of the same plant.
    const Eigen::MatrixXd u = randn(rng, 2, 3);
    const Eigen::MatrixXd y = sys.simulate(randn(rng, 3, 1), u);
    HistoryBuffer hist(3, 2, 2);
    for (int k = 0; k < 3; ++k) hist.push(u.col(k), y.col(k));

    const DdmpcSolution sol = ddmpc_step(dict, cfg, hist, randn(rng, 2, 6), Eigen::MatrixXd::Zero(2, 6));
    ASSERT_EQ(sol.status, QpStatus::Converged);
    EXPECT_FALSE(sol.initial_condition_relaxed);
    const PredictedTrajectory pred = predict_trajectory(dict, sol.alpha);
    EXPECT_LT((pred.inputs.leftCols(3) - u).lpNorm<Eigen::Infinity>(), cfg.solver_tol);
    EXPECT_LT((pred.outputs.leftCols(3) - y).lpNorm<Eigen::Infinity>(), cfg.solver_tol);
}

TEST(StepTest, InconsistentHistoryIsRelaxedAndFlagged) {
    std::mt19937_64 rng(16);
    const auto sys = random_lti(rng, 2, 1, 1);
    const DdmpcConfig cfg = make_config(1, 1, 6, 4);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, sys, 80), cfg);
    // With n = 2 < v = 4 the past outputs are determined by 2 numbers plus the
    // inputs, so random outputs cannot be matched.
    HistoryBuffer hist(4, 1, 1);
    for (int k = 0; k < 4; ++k) hist.push(randn(rng, 1, 1), randn(rng, 1, 1));
    const DdmpcSolution sol =
        ddmpc_step(dict, cfg, hist, Eigen::MatrixXd::Zero(1, 6), Eigen::MatrixXd::Zero(1, 6));
    EXPECT_TRUE(sol.initial_condition_relaxed);
    EXPECT_EQ(sol.status, QpStatus::Converged);
    EXPECT_TRUE(sol.u_first.allFinite());
}

TEST(StepTest, AlphaNormDecreasesWithLambda) {
    std::mt19937_64 rng(17);
    const auto sys = random_lti(rng, 3, 1, 2);
    const TrajectoryData data = random_lti_data(rng, sys, 120);
    HistoryBuffer hist(3, 1, 2);
    const Eigen::MatrixXd u = randn(rng, 1, 3);
    const Eigen::MatrixXd y = sys.simulate(randn(rng, 3, 1), u);
    for (int k = 0; k < 3; ++k) hist.push(u.col(k), y.col(k));
    const Eigen::MatrixXd ref = randn(rng, 2, 8);

    double previous = kInf;
    for (const double lambda : {1e-4, 1e-3, 1e-2}) {
        const DdmpcConfig cfg = make_config(1, 2, 8, 3, lambda);
        const DataDictionary dict = build_dictionary(data, cfg);
        const DdmpcSolution sol = ddmpc_step(dict, cfg, hist, ref, Eigen::MatrixXd::Zero(1, 8));
        ASSERT_EQ(sol.status, QpStatus::Converged);
        EXPECT_LE(sol.alpha.norm(), previous * (1.0 + 1e-9));
        previous = sol.alpha.norm();
    }
}

TEST(StepTest, AlphaBoundsUseFullCoordinates) {
    std::mt19937_64 rng(18);
    const auto sys = random_lti(rng, 2, 1, 1);
    DdmpcConfig cfg = make_config(1, 1, 4, 2);
    cfg.alpha_min = -0.05;
    cfg.alpha_max = 0.05;
    const DataDictionary dict = build_dictionary(random_lti_data(rng, sys, 60), cfg);
    const DdmpcQp qp = assemble_qp(dict, cfg, zero_history(dict), Eigen::MatrixXd::Constant(1, 4, 3.0),
                                   Eigen::MatrixXd::Zero(1, 4));
    EXPECT_FALSE(qp.reduced);
    EXPECT_EQ(qp.problem.variables(), dict.columns());
    const DdmpcSolution sol = solve_ddmpc_qp(qp, cfg);
    ASSERT_EQ(sol.status, QpStatus::Converged);
    EXPECT_LE(sol.alpha.maxCoeff(), 0.05 + 1e-8);
    EXPECT_GE(sol.alpha.minCoeff(), -0.05 - 1e-8);
}

TEST(StepTest, OutputBoundsAreRespected) {
    std::mt19937_64 rng(19);
    const LtiSystem plant = scalar_plant();
    DdmpcConfig cfg = make_config(1, 1, 6, 2, 1e-4);
    cfg.y_min = Eigen::VectorXd::Constant(1, -kInf);
    cfg.y_max = Eigen::VectorXd::Constant(1, 0.5);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, plant, 60), cfg);
    const DdmpcSolution sol = ddmpc_step(dict, cfg, zero_history(dict), Eigen::MatrixXd::Constant(1, 6, 1.0),
                                         Eigen::MatrixXd::Zero(1, 6));
    ASSERT_EQ(sol.status, QpStatus::Converged);
    EXPECT_LE(sol.y_seq.maxCoeff(), 0.5 + 1e-8);
}

TEST(StepTest, BitwiseDeterministic) {
    std::mt19937_64 rng(20);
    const auto sys = random_lti(rng, 3, 2, 2);
    DdmpcConfig cfg = make_config(2, 2, 6, 3);
    cfg.u_min.setConstant(-0.3);
    cfg.u_max.setConstant(0.3);
    const DataDictionary dict = build_dictionary(random_lti_data(rng, sys, 120), cfg);
    HistoryBuffer hist(3, 2, 2);
    const Eigen::MatrixXd u = randn(rng, 2, 3);
    const Eigen::MatrixXd y = sys.simulate(randn(rng, 3, 1), u);
    for (int k = 0; k < 3; ++k) hist.push(u.col(k), y.col(k));
    const Eigen::MatrixXd ref = randn(rng, 2, 6) * 5.0;
    const DdmpcSolution a = ddmpc_step(dict, cfg, hist, ref, Eigen::MatrixXd::Zero(2, 6));
    const DdmpcSolution b = ddmpc_step(dict, cfg, hist, ref, Eigen::MatrixXd::Zero(2, 6));
    EXPECT_EQ(a.alpha, b.alpha);
    EXPECT_EQ(a.u_seq, b.u_seq);
    EXPECT_EQ(a.cost, b.cost);
}

TEST(ConfigTest, ValidationRejectsBadWeightsAndBounds) {
    DdmpcConfig cfg = DdmpcConfig::steering_defaults();
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_NEAR(cfg.u_max(0), 5.0 * std::numbers::pi / 180.0, 1e-15);

    DdmpcConfig bad = cfg;
    bad.output_weight(0, 0) = -1.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.u_min = bad.u_max;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.horizon = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.lambda = -1.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.input_weight(0, 1) = 0.5;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace ddmpc
