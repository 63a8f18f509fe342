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

#include <ddmpc/baselines.hpp>
#include <ddmpc/controller.hpp>
#include <ddmpc/reference_path.hpp>
#include <ddmpc/vehicle.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddmpc {

struct ScenarioConfig {
    std::string name = "dual_lane_switch";
    DualLaneSwitchGeometry geometry;
    VehicleParams vehicle;
    double dt = 0.05;
    /// Runs abort once |lateral error| exceeds this.
    double max_lateral_error = 10.0;

    ReferencePath path() const { return make_dual_lane_switch(geometry, dt, vehicle.speed); }
};

/// What a controller returns for one step.
struct PolicyOutput {
    SteerCommand command;
    std::string status = "ok";
    /// False requests the fail-safe hold of the previous command.
    bool ok = true;
};

/**
 * @brief Controller interface seen by the closed loop.
 *
 * Per step the loop measures the state, calls control(), then observe() with
 * the command that was actually applied.
 */
class SteeringPolicy {
public:
    virtual ~SteeringPolicy() = default;
    virtual std::string name() const = 0;
    /// Called once before the first step; the vehicle will start at the origin.
    virtual void warmup(const ScenarioConfig&) {}
    virtual PolicyOutput control(const VehicleState& state, const PathProjection& proj,
                                 const ReferencePath& path) = 0;
    virtual void observe(const SteerCommand& /*applied*/, const VehicleState& /*measured*/) {}
};

class PidPolicy : public SteeringPolicy {
public:
    PidPolicy(PidConfig cfg, double dt) : pid_(cfg), dt_(dt) {}
    std::string name() const override { return "pid"; }
    PolicyOutput control(const VehicleState& state, const PathProjection& proj,
                         const ReferencePath& path) override {
        return {pid_.step(tracking_error(state, path.at(proj.s)), dt_), "ok", true};
    }

private:
    PidController pid_;
    double dt_;
};

class KinMpcPolicy : public SteeringPolicy {
public:
    KinMpcPolicy(KinMpcConfig cfg, VehicleParams params) : cfg_(cfg), params_(params) {
        cfg_.validate();
    }
    std::string name() const override { return "kin_mpc"; }
    PolicyOutput control(const VehicleState& state, const PathProjection& proj,
                         const ReferencePath& path) override {
        std::vector<PathPoint> window;
        window.reserve(static_cast<std::size_t>(cfg_.horizon));
        for (Eigen::Index k = 0; k < cfg_.horizon; ++k)
            window.push_back(path.at(proj.s + static_cast<double>(k) * path.spacing()));
        const KinMpcResult r = kin_mpc_step(cfg_, params_, state, window);
        return {r.command, to_string(r.status), r.status == QpStatus::Converged};
    }

private:
    KinMpcConfig cfg_;
    VehicleParams params_;
};

class DdmpcPolicy : public SteeringPolicy {
public:
    DdmpcPolicy(std::shared_ptr<const DataDictionary> dict, DdmpcConfig cfg)
        : controller_(std::move(dict), std::move(cfg)) {}
    std::string name() const override { return "ddmpc"; }

    /// Fills the history with v steps of straight driving that end at the origin.
    void warmup(const ScenarioConfig& scenario) override {
        const Eigen::Index v = controller_.dictionary().pastSteps();
        VehicleState s{-static_cast<double>(v) * scenario.vehicle.speed * scenario.dt, 0.0, 0.0};
        for (Eigen::Index k = 0; k < v; ++k) {
            controller_.record(Eigen::VectorXd::Zero(controller_.dictionary().inputDim()), s.output());
            s = step(s, SteerCommand{}, scenario.vehicle, scenario.dt);
        }
    }

    PolicyOutput control(const VehicleState&, const PathProjection& proj,
                         const ReferencePath& path) override {
        const Eigen::Index horizon = controller_.dictionary().futureSteps();
        Eigen::MatrixXd y_ref(3, horizon);
        for (Eigen::Index k = 0; k < horizon; ++k) {
            const PathPoint p = path.at(proj.s + static_cast<double>(k) * path.spacing());
            y_ref.col(k) << p.x, p.y, p.phi;
        }
        last_ = controller_.step(y_ref);
        std::string status = to_string(last_.status);
        if (last_.initial_condition_relaxed) status += "+relaxed";
        return {SteerCommand::fromVector(last_.u_first), status, last_.status == QpStatus::Converged};
    }

    void observe(const SteerCommand& applied, const VehicleState& measured) override {
        controller_.record(applied.vector(), measured.output());
    }

    const DdmpcSolution& lastSolution() const { return last_; }

private:
    DdmpcController controller_;
    DdmpcSolution last_;
};

struct StepRecord {
    int step = 0;
    double t = 0.0;
    double x_ref = 0.0, y_ref = 0.0, phi_ref = 0.0;
    double x = 0.0, y = 0.0, phi = 0.0;
    double delta_l = 0.0, delta_r = 0.0;
    double lat_err = 0.0;
    double solve_ms = 0.0;
    std::string status;
};

struct RunSummary {
    std::size_t steps = 0;
    double rms_error = 0.0;
    double max_abs_error = 0.0;
    double max_error = 0.0;  // signed extremes
    double min_error = 0.0;
    double mean_solve_ms = 0.0;
    double median_solve_ms = 0.0;
    double max_solve_ms = 0.0;
};

inline RunSummary summarize(const std::vector<StepRecord>& records) {
    RunSummary s;
    s.steps = records.size();
    if (records.empty()) return s;
    double sq = 0.0, solve = 0.0;
    s.max_error = -std::numeric_limits<double>::infinity();
    s.min_error = std::numeric_limits<double>::infinity();
    std::vector<double> times;
    times.reserve(records.size());
    for (const StepRecord& r : records) {
        sq += r.lat_err * r.lat_err;
        s.max_error = std::max(s.max_error, r.lat_err);
        s.min_error = std::min(s.min_error, r.lat_err);
        s.max_abs_error = std::max(s.max_abs_error, std::abs(r.lat_err));
        solve += r.solve_ms;
        s.max_solve_ms = std::max(s.max_solve_ms, r.solve_ms);
        times.push_back(r.solve_ms);
    }
    const auto n = static_cast<double>(records.size());
    s.rms_error = std::sqrt(sq / n);
    s.mean_solve_ms = solve / n;
    std::sort(times.begin(), times.end());
    const std::size_t mid = times.size() / 2;
    s.median_solve_ms = times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
    return s;
}

struct RunReport {
    std::string scenario;
    std::string controller;
    std::vector<StepRecord> records;
    bool aborted = false;
    std::string diagnostic;

    RunSummary summary() const { return summarize(records); }
    bool failed() const { return aborted; }
};

struct RunOptions {
    /// When false every solve time is logged as zero, making reports byte-reproducible.
    bool record_timing = true;
    /// Zero means one step per path point.
    int steps = 0;
};

/**
 * @brief Steps plant and controller in lockstep from the origin.
 *
 * Non-ok controller steps hold the previous command. A lateral error beyond
 * `scenario.max_lateral_error` ends the run with `aborted` set.
 */
inline RunReport run_closed_loop(SteeringPolicy& policy, const ScenarioConfig& scenario,
                                 const RunOptions& options = {}) {
    const ReferencePath path = scenario.path();
    RunReport report;
    report.scenario = scenario.name;
    report.controller = policy.name();
    const int steps = options.steps > 0 ? options.steps
                                        : static_cast<int>(std::lround(path.length() / path.spacing()));
    report.records.reserve(static_cast<std::size_t>(steps));

    policy.warmup(scenario);
    VehicleState state;
    SteerCommand held;
    std::size_t hint = 0;
    for (int k = 0; k < steps; ++k) {
        const PathProjection proj = path.project(state.x, state.y, hint, 40);
        hint = proj.segment;
        const PathPoint ref = path.at(proj.s);

        const auto start = std::chrono::steady_clock::now();
        const PolicyOutput out = policy.control(state, proj, path);
        const double elapsed =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

        const SteerCommand applied = out.ok ? out.command : held;
        StepRecord r;
        r.step = k;
        r.t = static_cast<double>(k) * scenario.dt;
        r.x_ref = ref.x;
        r.y_ref = ref.y;
        r.phi_ref = ref.phi;
        r.x = state.x;
        r.y = state.y;
        r.phi = state.phi;
        r.delta_l = applied.delta_l;
        r.delta_r = applied.delta_r;
        r.lat_err = proj.lateral;
        r.solve_ms = options.record_timing ? elapsed : 0.0;
        r.status = out.ok ? out.status : out.status + "+hold";
        report.records.push_back(r);

        if (std::abs(proj.lateral) > scenario.max_lateral_error) {
            std::ostringstream msg;
            msg << "diverged at step " << k << ": |lateral error| " << std::abs(proj.lateral)
                << " m exceeds " << scenario.max_lateral_error << " m";
            report.aborted = true;
            report.diagnostic = msg.str();
            break;
        }
        policy.observe(applied, state);
        held = applied;
        state = step(state, applied, scenario.vehicle, scenario.dt);
    }
    return report;
}

}  // namespace ddmpc
