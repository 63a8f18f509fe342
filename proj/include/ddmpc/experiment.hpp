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

#include <ddmpc/config.hpp>
#include <ddmpc/harness.hpp>
#include <ddmpc/preprocess.hpp>
#include <ddmpc/report.hpp>
#include <ddmpc/trajectory_io.hpp>

#include <algorithm>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace ddmpc {

inline const std::vector<std::string>& controller_names() {
    static const std::vector<std::string> names{"ddmpc", "kin_mpc", "pid"};
    return names;
}

/// Open-loop data for the dictionary: read from `data.file` or simulated.
inline TrajectoryData collect_data(const AppConfig& cfg) {
    if (!cfg.data.file.empty())
        return preprocess(load_timed_trajectory(cfg.data.file), cfg.scenario.dt, cfg.data.outlier_z);
    const Signal u = make_excitation(cfg.data.kind, cfg.data.length,
                                     cfg.data.amplitude_deg * std::numbers::pi / 180.0, cfg.data.seed);
    return collect_open_loop(cfg.scenario.vehicle, u, cfg.scenario.dt);
}

/// Throws std::invalid_argument for unknown names and ExcitationError for unusable data.
inline std::unique_ptr<SteeringPolicy> make_policy(const std::string& controller, const AppConfig& cfg,
                                                   std::shared_ptr<const DataDictionary> dict = nullptr) {
    if (controller == "pid") return std::make_unique<PidPolicy>(cfg.pid, cfg.scenario.dt);
    if (controller == "kin_mpc") return std::make_unique<KinMpcPolicy>(cfg.kin, cfg.scenario.vehicle);
    if (controller == "ddmpc") {
        if (!dict) dict = std::make_shared<const DataDictionary>(DataDictionary::build(collect_data(cfg), cfg.ddmpc));
        return std::make_unique<DdmpcPolicy>(std::move(dict), cfg.ddmpc);
    }
    throw std::invalid_argument("unknown controller '" + controller + "' (expected ddmpc, kin_mpc or pid)");
}

/// One run; setup failures come back as an aborted report rather than an exception.
inline RunReport run_controller(const std::string& controller, const AppConfig& cfg,
                                const RunOptions& options = {},
                                std::shared_ptr<const DataDictionary> dict = nullptr) {
    const auto& names = controller_names();
    if (std::find(names.begin(), names.end(), controller) == names.end())
        throw std::invalid_argument("unknown controller '" + controller + "' (expected ddmpc, kin_mpc or pid)");
    std::unique_ptr<SteeringPolicy> policy;
    try {
        policy = make_policy(controller, cfg, std::move(dict));
    } catch (const std::exception& e) {
        RunReport failed;
        failed.scenario = cfg.scenario.name;
        failed.controller = controller;
        failed.aborted = true;
        failed.diagnostic = std::string("setup failed: ") + e.what();
        return failed;
    }
    try {
        return run_closed_loop(*policy, cfg.scenario, options);
    } catch (const std::exception& e) {
        RunReport failed;
        failed.scenario = cfg.scenario.name;
        failed.controller = controller;
        failed.aborted = true;
        failed.diagnostic = std::string("run failed: ") + e.what();
        return failed;
    }
}

struct ComparisonResult {
    Comparison table;
    std::vector<RunReport> reports;
};

/// Runs each controller in turn on the same scenario; rows follow the given order.
inline ComparisonResult compare_controllers(const AppConfig& cfg, const RunOptions& options = {},
                                            const std::vector<std::string>& controllers = controller_names()) {
    ComparisonResult out;
    out.table.scenario = cfg.scenario.name;
    for (const std::string& name : controllers) {
        out.reports.push_back(run_controller(name, cfg, options));
        out.table.rows.push_back(make_row(out.reports.back()));
    }
    return out;
}

struct PidGridPoint {
    PidConfig gains;
    RunSummary summary;
    bool failed = false;
};

/// Exhaustive search over the gain grid; returns every point, best RMS first.
inline std::vector<PidGridPoint> tune_pid(const AppConfig& cfg, const std::vector<double>& kp,
                                          const std::vector<double>& ki, const std::vector<double>& kd,
                                          const std::vector<double>& k_heading) {
    std::vector<PidGridPoint> out;
    RunOptions options;
    options.record_timing = false;
    for (const double p : kp)
        for (const double i : ki)
            for (const double d : kd)
                for (const double h : k_heading) {
                    AppConfig c = cfg;
                    c.pid.kp = p;
                    c.pid.ki = i;
                    c.pid.kd = d;
                    c.pid.k_heading = h;
                    const RunReport r = run_controller("pid", c, options);
                    out.push_back({c.pid, r.summary(), r.failed()});
                }
    std::stable_sort(out.begin(), out.end(), [](const PidGridPoint& a, const PidGridPoint& b) {
        if (a.failed != b.failed) return !a.failed;
        return a.summary.rms_error < b.summary.rms_error;
    });
    return out;
}

}  // namespace ddmpc
