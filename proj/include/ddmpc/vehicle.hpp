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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddmpc {

/**
 * D-class sedan. Mass and inertia are carried for a dynamic plant; the
 * kinematic update only uses wheelbase and speed.
 */
struct VehicleParams {
    double wheelbase = 2.910;      // m
    double sprung_mass = 1370.0;   // kg
    double yaw_inertia = 2315.3;   // kg m^2
    double track_width = 1.600;    // m
    double speed = 10.0;           // m/s, held constant

    void validate() const {
        if (!(wheelbase > 0.0 && sprung_mass > 0.0 && yaw_inertia > 0.0 && track_width > 0.0 &&
              speed > 0.0))
            throw std::invalid_argument("VehicleParams: all parameters must be positive");
    }
};

inline constexpr double kSteerLimit = 0.6;  // rad, per wheel

inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);  // [-pi, pi]
    return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

struct VehicleState {
    double x = 0.0;    // m, global
    double y = 0.0;    // m, global
    double phi = 0.0;  // rad, heading in (-pi, pi]

    /// Measured output vector (x, y, phi).
    Eigen::Vector3d output() const { return {x, y, phi}; }
};

struct SteerCommand {
    double delta_l = 0.0;  // rad, left front wheel
    double delta_r = 0.0;  // rad, right front wheel

    static SteerCommand clamped(double left, double right) {
        return {std::clamp(left, -kSteerLimit, kSteerLimit),
                std::clamp(right, -kSteerLimit, kSteerLimit)};
    }
    static SteerCommand both(double delta) { return clamped(delta, delta); }
    static SteerCommand fromVector(const Eigen::VectorXd& u) { return clamped(u(0), u(1)); }

    Eigen::Vector2d vector() const { return {delta_l, delta_r}; }
};

/// The single-track model sees the mean of the two wheel angles.
inline double effective_steer(const SteerCommand& cmd) { return 0.5 * (cmd.delta_l + cmd.delta_r); }

/**
 * Kinematic bicycle advanced by one classical RK4 step:
 *   x' = V cos(phi),  y' = V sin(phi),  phi' = V tan(delta) / wheelbase.
 */
inline VehicleState step(const VehicleState& s, const SteerCommand& cmd, const VehicleParams& params,
                         double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const SteerCommand c = SteerCommand::clamped(cmd.delta_l, cmd.delta_r);
    const double v = params.speed;
    const double yaw_rate = v * std::tan(effective_steer(c)) / params.wheelbase;

    auto deriv = [&](double phi) { return Eigen::Vector3d(v * std::cos(phi), v * std::sin(phi), yaw_rate); };
    const Eigen::Vector3d k1 = deriv(s.phi);
    const Eigen::Vector3d k2 = deriv(s.phi + 0.5 * dt * k1(2));
    const Eigen::Vector3d k3 = deriv(s.phi + 0.5 * dt * k2(2));
    const Eigen::Vector3d k4 = deriv(s.phi + dt * k3(2));
    const Eigen::Vector3d inc = dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return VehicleState{s.x + inc(0), s.y + inc(1), wrap_angle(s.phi + inc(2))};
}

enum class ExcitationKind { Prbs, Multisine, Chirp, PrbsSine };

inline ExcitationKind parse_excitation_kind(const std::string& name) {
    if (name == "prbs") return ExcitationKind::Prbs;
    if (name == "multisine") return ExcitationKind::Multisine;
    if (name == "chirp") return ExcitationKind::Chirp;
    if (name == "prbs-sine") return ExcitationKind::PrbsSine;
    throw std::invalid_argument("unknown excitation kind '" + name + "'");
}

inline const char* to_string(ExcitationKind k) {
    switch (k) {
        case ExcitationKind::Prbs: return "prbs";
        case ExcitationKind::Multisine: return "multisine";
        case ExcitationKind::Chirp: return "chirp";
        case ExcitationKind::PrbsSine: return "prbs-sine";
    }
    return "unknown";
}

namespace detail {

inline Eigen::RowVectorXd prbs(std::mt19937_64& rng, Eigen::Index n, double amplitude) {
    std::bernoulli_distribution coin(0.5);
    Eigen::RowVectorXd out(n);
    for (Eigen::Index k = 0; k < n; ++k) out(k) = coin(rng) ? amplitude : -amplitude;
    return out;
}

/// Sum of sinusoids at `freqs` (cycles/sample) with random phases, peak-normalized.
inline Eigen::RowVectorXd multisine(std::mt19937_64& rng, Eigen::Index n, double amplitude,
                                    const std::vector<double>& freqs) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(n);
    for (const double f : freqs) {
        const double w = 2.0 * std::numbers::pi * f;
        const double ph = phase(rng);
        for (Eigen::Index k = 0; k < n; ++k) out(k) += std::sin(w * static_cast<double>(k) + ph);
    }
    const double peak = out.cwiseAbs().maxCoeff();
    return peak > 0.0 ? Eigen::RowVectorXd(out * (amplitude / peak)) : out;
}

inline Eigen::RowVectorXd chirp(Eigen::Index n, double amplitude, double f0, double f1, double phase) {
    Eigen::RowVectorXd out(n);
    const double span = static_cast<double>(std::max<Eigen::Index>(n - 1, 1));
    for (Eigen::Index k = 0; k < n; ++k) {
        const double t = static_cast<double>(k);
        // Instantaneous frequency (cycles/sample) sweeps linearly from f0 to f1.
        const double cycles = f0 * t + 0.5 * (f1 - f0) * t * t / span;
        out(k) = amplitude * std::sin(2.0 * std::numbers::pi * cycles + phase);
    }
    return out;
}

}  // namespace detail

/**
 * @brief Open-loop steering excitation, one row per wheel.
 *
 * The two wheel channels are generated independently so that the two-input
 * Hankel matrix can reach full row rank; the plant only responds to their mean.
 * Every sample satisfies |u| <= amplitude.
 */
inline Signal make_excitation(ExcitationKind kind, Eigen::Index length, double amplitude,
                              std::uint64_t seed) {
    if (length < 1) throw std::invalid_argument("make_excitation: length must be >= 1");
    if (!(amplitude > 0.0) || amplitude > kSteerLimit)
        throw std::invalid_argument("make_excitation: amplitude must be in (0, steer limit]");
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd u(2, length);
    switch (kind) {
        case ExcitationKind::Prbs:
            u.row(0) = detail::prbs(rng, length, amplitude);
            u.row(1) = detail::prbs(rng, length, amplitude);
            break;
        case ExcitationKind::Multisine: {
            // Interleaved grids spanning (0, 0.5) keep the channels linearly independent.
            const int comps = 40;
            for (Eigen::Index c = 0; c < 2; ++c) {
                std::vector<double> freqs;
                for (int j = 0; j < comps; ++j)
                    freqs.push_back((2.0 * j + 1.0 + static_cast<double>(c)) / (4.0 * comps + 2.0));
                u.row(c) = detail::multisine(rng, length, amplitude, freqs);
            }
            break;
        }
        case ExcitationKind::Chirp:
            u.row(0) = detail::chirp(length, amplitude, 0.001, 0.45, 0.0);
            u.row(1) = detail::chirp(length, amplitude, 0.45, 0.001, 0.5 * std::numbers::pi);
            break;
        case ExcitationKind::PrbsSine:
            for (Eigen::Index c = 0; c < 2; ++c) {
                const double ph = std::uniform_real_distribution<double>(0.0, 6.28)(rng);
                Eigen::RowVectorXd sine(length);
                for (Eigen::Index k = 0; k < length; ++k)
                    sine(k) = 0.5 * amplitude * std::sin(0.05 * static_cast<double>(k) + ph);
                u.row(c) = detail::prbs(rng, length, 0.5 * amplitude) + sine;
            }
            break;
    }
    return Signal(u);
}

/// Drives the plant from the origin and records (u(k), y(k)) with y(k) measured before u(k) acts.
inline TrajectoryData collect_open_loop(const VehicleParams& params, const Signal& excitation,
                                        double dt) {
    params.validate();
    if (excitation.dim() != 2)
        throw std::invalid_argument("collect_open_loop: excitation must have two wheel channels");
    const Eigen::Index n = excitation.length();
    Eigen::MatrixXd y(3, n);
    VehicleState s;
    for (Eigen::Index k = 0; k < n; ++k) {
        y.col(k) = s.output();
        s = step(s, SteerCommand::fromVector(excitation.sample(k)), params, dt);
    }
    return TrajectoryData(excitation, Signal(y), dt);
}

}  // namespace ddmpc
