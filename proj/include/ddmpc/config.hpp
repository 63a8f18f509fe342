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
#include <ddmpc/harness.hpp>
#include <ddmpc/vehicle.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddmpc {

/// Bad key, bad value or unreadable config file.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line)
        : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Where the DDMPC dictionary data comes from.
struct DataConfig {
    ExcitationKind kind = ExcitationKind::PrbsSine;
    double amplitude_deg = 4.0;
    Eigen::Index length = 646;
    std::uint64_t seed = 1;
    /// Optional CSV (t,u1,u2,y1,y2,y3); when set it replaces the simulated collection.
    std::string file;
    /// Outlier threshold applied to file data; infinite disables replacement.
    double outlier_z = std::numeric_limits<double>::infinity();
};

/// Everything a `run` or `compare` needs.
struct AppConfig {
    DdmpcConfig ddmpc = DdmpcConfig::steering_defaults();
    PidConfig pid = default_pid();
    KinMpcConfig kin;
    ScenarioConfig scenario;
    DataConfig data;

    /// Gains picked by the grid search in `ddmpc_cli tune-pid` on the default scenario.
    static PidConfig default_pid() {
        PidConfig p;
        p.kp = 25.6;
        p.ki = 0.0;
        p.kd = 0.2;
        p.k_heading = 8.0;
        p.integral_limit = 1.0 * std::numbers::pi / 180.0;
        p.output_limit = 5.0 * std::numbers::pi / 180.0;
        return p;
    }

    void validate() const {
        ddmpc.validate();
        pid.validate();
        kin.validate();
        scenario.geometry.validate();
        scenario.vehicle.validate();
        if (ddmpc.inputDim() != 2 || ddmpc.outputDim() != 3)
            throw ConfigError("q_diag needs 3 entries and r_diag 2 for the steering plant", 0);
        if (!(scenario.dt > 0.0)) throw ConfigError("scenario.dt must be positive", 0);
        if (!(scenario.max_lateral_error > 0.0))
            throw ConfigError("scenario.max_lateral_error must be positive", 0);
        if (data.length < 1) throw ConfigError("data.length must be positive", 0);
        if (!(data.amplitude_deg > 0.0)) throw ConfigError("data.amplitude_deg must be positive", 0);
    }
};

namespace detail {

inline double config_number(const std::string& key, const std::string& text, int line) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw ConfigError("key '" + key + "': '" + text + "' is not a number", line);
    return v;
}

inline std::vector<double> config_list(const std::string& key, const std::string& text, int line) {
    std::vector<double> out;
    std::string cleaned = text;
    for (char& c : cleaned)
        if (c == ',') c = ' ';
    std::istringstream in(cleaned);
    std::string item;
    while (in >> item) out.push_back(config_number(key, item, line));
    if (out.empty()) throw ConfigError("key '" + key + "' needs at least one value", line);
    return out;
}

inline Eigen::Index config_count(const std::string& key, const std::string& text, int line) {
    const double v = config_number(key, text, line);
    if (v != std::floor(v) || v < 0) throw ConfigError("key '" + key + "' must be a non-negative integer", line);
    return static_cast<Eigen::Index>(v);
}

inline std::string trim_copy(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/**
 * @brief Applies `key = value` lines on top of `base`.
 *
 * Blank lines and text after '#' are ignored. Angles are given in degrees in
 * keys ending `_deg` and stored in radians. Unknown keys are errors.
 */
inline AppConfig parse_config(std::istream& in, AppConfig base = {}) {
    constexpr double deg = std::numbers::pi / 180.0;
    AppConfig c = std::move(base);
    using Setter = std::function<void(const std::string&, const std::string&, int)>;
    auto num = [](double& target, double scale = 1.0) -> Setter {
        return [&target, scale](const std::string& k, const std::string& v, int line) {
            target = detail::config_number(k, v, line) * scale;
        };
    };
    auto count = [](Eigen::Index& target) -> Setter {
        return [&target](const std::string& k, const std::string& v, int line) {
            target = detail::config_count(k, v, line);
        };
    };
    auto diag = [](Eigen::MatrixXd& target) -> Setter {
        return [&target](const std::string& k, const std::string& v, int line) {
            const auto d = detail::config_list(k, v, line);
            target = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())).asDiagonal();
        };
    };
    auto bound = [deg](Eigen::VectorXd& target) -> Setter {
        return [&target, deg](const std::string& k, const std::string& v, int line) {
            const auto d = detail::config_list(k, v, line);
            // A single value applies to both wheels.
            target = d.size() == 1 ? Eigen::VectorXd::Constant(2, d[0] * deg)
                                   : Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
                                         d.data(), static_cast<Eigen::Index>(d.size())) * deg);
        };
    };
    int solver_iter = c.ddmpc.solver_max_iter;
    Eigen::Index kin_horizon = c.kin.horizon;
    Eigen::Index data_seed = static_cast<Eigen::Index>(c.data.seed);

    const std::map<std::string, Setter> keys{
        {"L", count(c.ddmpc.horizon)},
        {"v", count(c.ddmpc.order_bound)},
        {"q_diag", diag(c.ddmpc.output_weight)},
        {"r_diag", diag(c.ddmpc.input_weight)},
        {"lambda", num(c.ddmpc.lambda)},
        {"u_min_deg", bound(c.ddmpc.u_min)},
        {"u_max_deg", bound(c.ddmpc.u_max)},
        {"solver_tol", num(c.ddmpc.solver_tol)},
        {"solver_max_iter",
         [&](const std::string& k, const std::string& v, int line) {
             solver_iter = static_cast<int>(detail::config_count(k, v, line));
         }},
        {"relaxation_weight", num(c.ddmpc.relaxation_weight)},
        {"pid.kp", num(c.pid.kp)},
        {"pid.ki", num(c.pid.ki)},
        {"pid.kd", num(c.pid.kd)},
        {"pid.k_heading", num(c.pid.k_heading)},
        {"pid.integral_limit_deg", num(c.pid.integral_limit, deg)},
        {"pid.output_limit_deg", num(c.pid.output_limit, deg)},
        {"kin.horizon", count(kin_horizon)},
        {"kin.q_lateral", num(c.kin.q_lateral)},
        {"kin.q_heading", num(c.kin.q_heading)},
        {"kin.r", num(c.kin.r)},
        {"kin.u_min_deg", num(c.kin.u_min, deg)},
        {"kin.u_max_deg", num(c.kin.u_max, deg)},
        {"scenario.name",
         [&](const std::string&, const std::string& v, int) { c.scenario.name = v; }},
        {"scenario.lane_offset", num(c.scenario.geometry.lane_offset)},
        {"scenario.s1", num(c.scenario.geometry.s1)},
        {"scenario.s2", num(c.scenario.geometry.s2)},
        {"scenario.s3", num(c.scenario.geometry.s3)},
        {"scenario.s4", num(c.scenario.geometry.s4)},
        {"scenario.total_length", num(c.scenario.geometry.total_length)},
        {"scenario.dt", num(c.scenario.dt)},
        {"scenario.max_lateral_error", num(c.scenario.max_lateral_error)},
        {"vehicle.speed", num(c.scenario.vehicle.speed)},
        {"vehicle.wheelbase", num(c.scenario.vehicle.wheelbase)},
        {"vehicle.sprung_mass", num(c.scenario.vehicle.sprung_mass)},
        {"vehicle.yaw_inertia", num(c.scenario.vehicle.yaw_inertia)},
        {"vehicle.track_width", num(c.scenario.vehicle.track_width)},
        {"data.kind",
         [&](const std::string& k, const std::string& v, int line) {
             try {
                 c.data.kind = parse_excitation_kind(v);
             } catch (const std::invalid_argument& e) {
                 throw ConfigError("key '" + k + "': " + e.what(), line);
             }
         }},
        {"data.amplitude_deg", num(c.data.amplitude_deg)},
        {"data.length", count(c.data.length)},
        {"data.seed", count(data_seed)},
        {"data.file", [&](const std::string&, const std::string& v, int) { c.data.file = v; }},
        {"data.outlier_z", num(c.data.outlier_z)},
    };

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = detail::trim_copy(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
        const std::string key = detail::trim_copy(line.substr(0, eq));
        const std::string value = detail::trim_copy(line.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError("unknown key '" + key + "'", line_no);
        if (value.empty()) throw ConfigError("key '" + key + "' has no value", line_no);
        it->second(key, value, line_no);
    }
    c.ddmpc.solver_max_iter = solver_iter;
    c.kin.horizon = kin_horizon;
    c.kin.dt = c.scenario.dt;
    c.kin.solver_tol = c.ddmpc.solver_tol;
    c.kin.solver_max_iter = solver_iter;
    c.data.seed = static_cast<std::uint64_t>(data_seed);
    try {
        c.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), 0);
    }
    return c;
}

inline AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string(), 0);
    return parse_config(in);
}

}  // namespace ddmpc
