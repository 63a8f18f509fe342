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

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ddmpc {

/// Stations (global x, metres) of a lane shift out and back.
struct DualLaneSwitchGeometry {
    double lane_offset = 3.5;
    double s1 = 50.0;   // start of the first shift
    double s2 = 90.0;   // end of the first shift
    double s3 = 140.0;  // start of the return
    double s4 = 180.0;  // end of the return
    double total_length = 250.0;

    void validate() const {
        if (!(0.0 < s1 && s1 < s2 && s2 < s3 && s3 < s4 && s4 < total_length)) {
            std::ostringstream msg;
            msg << "dual lane switch: stations must satisfy 0 < s1 < s2 < s3 < s4 < total_length, got "
                << s1 << ", " << s2 << ", " << s3 << ", " << s4 << ", " << total_length;
            throw std::invalid_argument(msg.str());
        }
        if (!std::isfinite(lane_offset)) throw std::invalid_argument("dual lane switch: bad lane offset");
    }

    /// Lateral offset and its first two derivatives with respect to x.
    std::array<double, 3> lateral(double x) const {
        auto ramp = [](double t, double h, double w) -> std::array<double, 3> {
            // Quintic with zero slope and curvature at both ends.
            const double t2 = t * t, t3 = t2 * t;
            return {h * (10.0 * t3 - 15.0 * t3 * t + 6.0 * t3 * t2),
                    h / w * (30.0 * t2 - 60.0 * t3 + 30.0 * t2 * t2),
                    h / (w * w) * (60.0 * t - 180.0 * t2 + 120.0 * t3)};
        };
        if (x <= s1 || x >= s4) return {0.0, 0.0, 0.0};
        if (x < s2) return ramp((x - s1) / (s2 - s1), lane_offset, s2 - s1);
        if (x <= s3) return {lane_offset, 0.0, 0.0};
        const auto r = ramp((x - s3) / (s4 - s3), lane_offset, s4 - s3);
        return {lane_offset - r[0], -r[1], -r[2]};
    }
};

struct PathPoint {
    double x = 0.0;
    double y = 0.0;
    double phi = 0.0;
    double s = 0.0;        // arc length from the start
    double curvature = 0.0;
};

/// Foot of the perpendicular from a query point.
struct PathProjection {
    double s = 0.0;
    /// Signed distance, positive when the query point is left of the path.
    double lateral = 0.0;
    std::size_t segment = 0;
};

/**
 * @brief Centreline y(x) sampled every `spacing` metres of arc length.
 *
 * Beyond the last station the path continues as a straight line, so lookahead
 * windows near the end remain defined.
 */
class ReferencePath {
public:
    ReferencePath(DualLaneSwitchGeometry geometry, double spacing)
        : geo_(geometry), spacing_(spacing) {
        geo_.validate();
        if (!(spacing > 0.0)) throw std::invalid_argument("ReferencePath: spacing must be positive");
        buildArcLengthTable();
        const double length = arcLengthAt(geo_.total_length);
        const auto count = static_cast<std::size_t>(std::floor(length / spacing_ + 1e-9)) + 1;
        points_.reserve(count);
        for (std::size_t k = 0; k < count; ++k) points_.push_back(at(static_cast<double>(k) * spacing_));
    }

    const DualLaneSwitchGeometry& geometry() const { return geo_; }
    const std::vector<PathPoint>& points() const { return points_; }
    double spacing() const { return spacing_; }
    double length() const { return points_.back().s; }

    /// Exact point at arc length s (s < 0 or past the end extends straight).
    PathPoint at(double s) const {
        double x;
        if (s <= 0.0) {
            x = s;
        } else if (s >= table_s_.back()) {
            x = table_x_.back() + (s - table_s_.back());
        } else {
            const auto it = std::upper_bound(table_s_.begin(), table_s_.end(), s);
            const auto i = static_cast<std::size_t>(it - table_s_.begin()) - 1;
            x = table_x_[i];
            // Newton on s(x) = s with ds/dx = sqrt(1 + y'^2).
            for (int iter = 0; iter < 8; ++iter) {
                const double f = arcLengthAt(x) - s;
                const double slope = std::sqrt(1.0 + sq(geo_.lateral(x)[1]));
                x -= f / slope;
                if (std::abs(f) < 1e-13) break;
            }
        }
        const auto lat = geo_.lateral(x);
        PathPoint p;
        p.x = x;
        p.y = lat[0];
        p.phi = std::atan(lat[1]);
        p.s = s;
        p.curvature = lat[2] / std::pow(1.0 + lat[1] * lat[1], 1.5);
        return p;
    }

    /**
     * Perpendicular projection onto the sampled polyline (first minimum wins on
     * ties), refined on the exact curve with a few Newton steps.
     */
    PathProjection project(double px, double py, std::size_t hint = 0, std::size_t window = 0) const {
        std::size_t lo = 0, hi = points_.size() - 1;
        if (window > 0) {
            lo = hint > window ? hint - window : 0;
            hi = std::min(points_.size() - 1, hint + window);
        }
        double best = std::numeric_limits<double>::infinity();
        double best_s = 0.0;
        std::size_t best_seg = lo;
        for (std::size_t i = lo; i < hi; ++i) {
            const PathPoint& a = points_[i];
            const PathPoint& b = points_[i + 1];
            const double dx = b.x - a.x, dy = b.y - a.y;
            const double len2 = dx * dx + dy * dy;
            double t = ((px - a.x) * dx + (py - a.y) * dy) / len2;
            // The first and last segments extend to the straight continuations.
            if (i != 0) t = std::max(t, 0.0);
            if (i + 2 != points_.size()) t = std::min(t, 1.0);
            const double d2 = sq(px - (a.x + t * dx)) + sq(py - (a.y + t * dy));
            if (d2 < best) {
                best = d2;
                best_s = a.s + t * (b.s - a.s);
                best_seg = i;
            }
        }
        double s = best_s;
        for (int iter = 0; iter < 4; ++iter) {
            const PathPoint c = at(s);
            const double along = (px - c.x) * std::cos(c.phi) + (py - c.y) * std::sin(c.phi);
            s += along;
            if (std::abs(along) < 1e-12) break;
        }
        const PathPoint c = at(s);
        PathProjection proj;
        proj.s = s;
        proj.lateral = -(px - c.x) * std::sin(c.phi) + (py - c.y) * std::cos(c.phi);
        proj.segment = best_seg;
        return proj;
    }

private:
    static double sq(double v) { return v * v; }

    void buildArcLengthTable() {
        // Gauss-Legendre 5-point per 0.25 m cell: error far below 1e-12 for this curve.
        static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                                     0.5384693101056831, 0.9061798459386640};
        static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665,
                                                       0.5688888888888889, 0.4786286704993665,
                                                       0.2369268850561891};
        const double cell = 0.25;
        const auto cells = static_cast<std::size_t>(std::ceil(geo_.total_length / cell));
        table_x_.assign(1, 0.0);
        table_s_.assign(1, 0.0);
        for (std::size_t i = 0; i < cells; ++i) {
            const double a = table_x_.back();
            const double b = std::min(geo_.total_length, a + cell);
            double integral = 0.0;
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                const double x = 0.5 * (a + b) + 0.5 * (b - a) * nodes[q];
                integral += weights[q] * std::sqrt(1.0 + sq(geo_.lateral(x)[1]));
            }
            table_x_.push_back(b);
            table_s_.push_back(table_s_.back() + 0.5 * (b - a) * integral);
        }
    }

    /// s(x) by quadrature from the nearest table node.
    double arcLengthAt(double x) const {
        if (x <= 0.0) return x;
        if (x >= table_x_.back()) return table_s_.back() + (x - table_x_.back());
        const auto it = std::upper_bound(table_x_.begin(), table_x_.end(), x);
        const auto i = static_cast<std::size_t>(it - table_x_.begin()) - 1;
        const double a = table_x_[i];
        static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                                     0.5384693101056831, 0.9061798459386640};
        static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665,
                                                       0.5688888888888889, 0.4786286704993665,
                                                       0.2369268850561891};
        double integral = 0.0;
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const double xq = 0.5 * (a + x) + 0.5 * (x - a) * nodes[q];
            integral += weights[q] * std::sqrt(1.0 + sq(geo_.lateral(xq)[1]));
        }
        return table_s_[i] + 0.5 * (x - a) * integral;
    }

    DualLaneSwitchGeometry geo_;
    double spacing_;
    std::vector<double> table_x_, table_s_;
    std::vector<PathPoint> points_;
};

/// Reference on the plant's dt grid: points every speed * dt metres.
inline ReferencePath make_dual_lane_switch(const DualLaneSwitchGeometry& geometry, double dt,
                                           double speed) {
    if (!(dt > 0.0) || !(speed > 0.0))
        throw std::invalid_argument("make_dual_lane_switch: dt and speed must be positive");
    return ReferencePath(geometry, speed * dt);
}

}  // namespace ddmpc
