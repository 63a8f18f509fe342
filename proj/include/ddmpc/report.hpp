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

#include <ddmpc/harness.hpp>
#include <ddmpc/svg.hpp>
#include <ddmpc/trajectory_io.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ddmpc {

inline constexpr const char* kRunCsvHeader =
    "step,t,x_ref,y_ref,phi_ref,x,y,phi,delta_l,delta_r,lat_err,solve_ms,status";

namespace detail {

/// Shortest text that reads back to the same double.
inline std::string exact(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

inline void write_run_csv(const RunReport& report, std::ostream& out) {
    out << kRunCsvHeader << '\n';
    for (const StepRecord& r : report.records) {
        using detail::exact;
        out << r.step << ',' << exact(r.t) << ',' << exact(r.x_ref) << ',' << exact(r.y_ref) << ','
            << exact(r.phi_ref) << ',' << exact(r.x) << ',' << exact(r.y) << ',' << exact(r.phi) << ','
            << exact(r.delta_l) << ',' << exact(r.delta_r) << ',' << exact(r.lat_err) << ','
            << exact(r.solve_ms) << ',' << r.status << '\n';
    }
}

inline RunReport read_run_csv(std::istream& in) {
    RunReport report;
    std::string line;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != kRunCsvHeader) throw ParseError("unexpected run report header", line_no);
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 13) throw ParseError("expected 13 fields, got " + std::to_string(f.size()), line_no);
        auto num = [&](const std::string& s) {
            double v = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc() || res.ptr != s.data() + s.size())
                throw ParseError("bad number '" + s + "'", line_no);
            return v;
        };
        StepRecord r;
        r.step = static_cast<int>(num(f[0]));
        r.t = num(f[1]);
        r.x_ref = num(f[2]);
        r.y_ref = num(f[3]);
        r.phi_ref = num(f[4]);
        r.x = num(f[5]);
        r.y = num(f[6]);
        r.phi = num(f[7]);
        r.delta_l = num(f[8]);
        r.delta_r = num(f[9]);
        r.lat_err = num(f[10]);
        r.solve_ms = num(f[11]);
        r.status = f[12];
        report.records.push_back(std::move(r));
    }
    if (!header) throw ParseError("missing run report header", 0);
    return report;
}

inline void save_run_csv(const RunReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_run_csv(report, out);
}

inline RunReport load_run_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_run_csv(in);
}

// ---------------------------------------------------------------------------
// Comparison table

struct ComparisonRow {
    std::string controller;
    RunSummary summary;
    bool failed = false;
    std::string diagnostic;
};

struct Comparison {
    std::string scenario;
    std::vector<ComparisonRow> rows;

    const ComparisonRow* find(const std::string& controller) const {
        for (const ComparisonRow& r : rows)
            if (r.controller == controller) return &r;
        return nullptr;
    }

    /// Mean solve time of DDMPC over kinematic MPC; NaN if either is missing.
    double solveTimeRatio() const {
        const ComparisonRow* d = find("ddmpc");
        const ComparisonRow* k = find("kin_mpc");
        if (d == nullptr || k == nullptr || k->summary.mean_solve_ms <= 0.0)
            return std::numeric_limits<double>::quiet_NaN();
        return d->summary.mean_solve_ms / k->summary.mean_solve_ms;
    }
};

inline ComparisonRow make_row(const RunReport& report) {
    return {report.controller, report.summary(), report.aborted, report.diagnostic};
}

inline void write_comparison_csv(const Comparison& c, std::ostream& out) {
    out << "scenario,controller,status,steps,rms_err,max_abs_err,min_err,max_err,mean_solve_ms,"
           "median_solve_ms,max_solve_ms\n";
    for (const ComparisonRow& r : c.rows) {
        using detail::exact;
        const RunSummary& s = r.summary;
        out << c.scenario << ',' << r.controller << ',' << (r.failed ? "failed" : "ok") << ',' << s.steps
            << ',' << exact(s.rms_error) << ',' << exact(s.max_abs_error) << ',' << exact(s.min_error) << ','
            << exact(s.max_error) << ',' << exact(s.mean_solve_ms) << ',' << exact(s.median_solve_ms) << ','
            << exact(s.max_solve_ms) << '\n';
    }
}

inline std::string format_comparison(const Comparison& c) {
    std::ostringstream o;
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %-7s %6s %12s %12s %12s %12s %12s\n", "controller", "status",
                  "steps", "rms_err_m", "max_abs_m", "mean_ms", "median_ms", "max_ms");
    o << "scenario: " << c.scenario << '\n' << line;
    for (const ComparisonRow& r : c.rows) {
        const RunSummary& s = r.summary;
        std::snprintf(line, sizeof line, "%-10s %-7s %6zu %12.4e %12.4e %12.4f %12.4f %12.4f\n",
                      r.controller.c_str(), r.failed ? "failed" : "ok", s.steps, s.rms_error, s.max_abs_error,
                      s.mean_solve_ms, s.median_solve_ms, s.max_solve_ms);
        o << line;
        if (r.failed && !r.diagnostic.empty()) o << "  " << r.controller << ": " << r.diagnostic << '\n';
    }
    const double ratio = c.solveTimeRatio();
    if (std::isfinite(ratio)) {
        std::snprintf(line, sizeof line, "mean solve time ratio ddmpc/kin_mpc: %.3f\n", ratio);
        o << line;
    }
    return o.str();
}

// ---------------------------------------------------------------------------
// Plots

/// Writes `<scenario>_<controller>_{trajectory,lateral_error,solve_time}.svg`; returns the paths.
inline std::vector<std::filesystem::path> write_run_plots(const RunReport& report,
                                                          const std::filesystem::path& dir) {
    LineSeries ref{"reference", {}, {}}, veh{report.controller, {}, {}};
    LineSeries err{report.controller, {}, {}}, solve{report.controller, {}, {}};
    for (const StepRecord& r : report.records) {
        ref.x.push_back(r.x_ref);
        ref.y.push_back(r.y_ref);
        veh.x.push_back(r.x);
        veh.y.push_back(r.y);
        err.x.push_back(r.x_ref);
        err.y.push_back(r.lat_err);
        solve.x.push_back(r.step);
        solve.y.push_back(r.solve_ms);
    }
    const std::string stem = report.scenario + "_" + report.controller + "_";
    std::vector<std::pair<std::string, std::string>> charts{
        {"trajectory", render_line_chart({report.controller + " trajectory", "x [m]", "y [m]"}, {ref, veh})},
        {"lateral_error",
         render_line_chart({report.controller + " lateral error", "station x [m]", "lateral error [m]"}, {err})},
        {"solve_time", render_line_chart({report.controller + " solve time", "step", "solve time [ms]"}, {solve})},
    };
    std::vector<std::filesystem::path> written;
    for (const auto& [kind, svg] : charts) {
        const auto path = dir / (stem + kind + ".svg");
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << svg;
        written.push_back(path);
    }
    return written;
}

}  // namespace ddmpc
