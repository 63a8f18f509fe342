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

#include <ddmpc/preprocess.hpp>
#include <ddmpc/signal.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddmpc {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view field, int line) {
    double value = 0.0;
    // from_chars rejects a leading '+', which some writers emit.
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("cannot parse number '" + std::string(field) + "'", line);
    if (!std::isfinite(value)) throw ParseError("non-finite value", line);
    return value;
}

}  // namespace detail

/// Reads `t,u1..um,y1..yp` CSV; '#' lines and blank lines are skipped.
inline TimedTrajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    int line_no = 0;
    Eigen::Index m = -1, p = -1;
    std::vector<double> time;
    std::vector<std::vector<double>> us, ys;

    while (std::getline(in, line)) {
        ++line_no;
        const auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto fields = detail::split(body, ',');
        if (m < 0) {
            if (fields.empty() || fields[0] != "t")
                throw ParseError("header must start with column 't'", line_no);
            m = 0;
            p = 0;
            for (size_t i = 1; i < fields.size(); ++i) {
                const auto f = fields[i];
                const std::string expected_u = "u" + std::to_string(m + 1);
                const std::string expected_y = "y" + std::to_string(p + 1);
                if (p == 0 && f == expected_u)
                    ++m;
                else if (f == expected_y)
                    ++p;
                else
                    throw ParseError("unexpected header column '" + std::string(f) + "'",
                                     line_no);
            }
            if (m == 0 || p == 0)
                throw ParseError("header needs at least one input and one output column",
                                 line_no);
            continue;
        }
        if (static_cast<Eigen::Index>(fields.size()) != 1 + m + p) {
            throw ParseError("expected " + std::to_string(1 + m + p) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        time.push_back(detail::parse_double(fields[0], line_no));
        std::vector<double> u, y;
        for (Eigen::Index i = 0; i < m; ++i) u.push_back(detail::parse_double(fields[1 + i], line_no));
        for (Eigen::Index i = 0; i < p; ++i)
            y.push_back(detail::parse_double(fields[1 + m + i], line_no));
        us.push_back(std::move(u));
        ys.push_back(std::move(y));
    }
    if (time.empty()) throw ParseError("no samples", 0);
    return TimedTrajectory{std::move(time), Signal::fromRows(us), Signal::fromRows(ys)};
}

inline void write_trajectory_csv(std::ostream& out, const TimedTrajectory& data) {
    out << "t";
    for (Eigen::Index i = 0; i < data.inputs.dim(); ++i) out << ",u" << i + 1;
    for (Eigen::Index i = 0; i < data.outputs.dim(); ++i) out << ",y" << i + 1;
    out << "\n" << std::setprecision(17);
    for (Eigen::Index k = 0; k < data.inputs.length(); ++k) {
        out << data.time[static_cast<size_t>(k)];
        for (Eigen::Index i = 0; i < data.inputs.dim(); ++i) out << ',' << data.inputs.matrix()(i, k);
        for (Eigen::Index i = 0; i < data.outputs.dim(); ++i)
            out << ',' << data.outputs.matrix()(i, k);
        out << "\n";
    }
}

inline TimedTrajectory load_timed_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_trajectory_csv(in);
}

/**
 * Loads a uniformly sampled trajectory. The sample time is inferred from the
 * stamps; non-uniform files must go through `preprocess` instead.
 */
inline TrajectoryData load_trajectory(const std::filesystem::path& path) {
    const TimedTrajectory timed = load_timed_trajectory(path);
    const size_t n = timed.time.size();
    if (n < 2) throw ParseError("cannot infer sample time from a single sample", 0);
    const double dt = (timed.time.back() - timed.time.front()) / static_cast<double>(n - 1);
    for (size_t k = 1; k < n; ++k) {
        const double step = timed.time[k] - timed.time[k - 1];
        if (std::abs(step - dt) > 1e-6 * dt)
            throw ParseError("non-uniform time stamps; preprocess the data first",
                             0);
    }
    return TrajectoryData(timed.inputs, timed.outputs, dt);
}

inline void save_trajectory(const TrajectoryData& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_trajectory_csv(out, TimedTrajectory::fromUniform(data));
}

}  // namespace ddmpc
