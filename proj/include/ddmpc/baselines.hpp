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

#include <ddmpc/qp_solver.hpp>
#include <ddmpc/reference_path.hpp>
#include <ddmpc/vehicle.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddmpc {

/// Tracking errors of a pose against the reference point it projects onto.
struct TrackingError {
    double lateral = 0.0;  // m, positive when the vehicle is left of the path
    double heading = 0.0;  // rad, vehicle heading minus path heading
};

inline TrackingError tracking_error(const VehicleState& s, const PathPoint& ref) {
    const double dx = s.x - ref.x, dy = s.y - ref.y;
    return {-dx * std::sin(ref.phi) + dy * std::cos(ref.phi), wrap_angle(s.phi - ref.phi)};
}

// ---------------------------------------------------------------------------
// PID

struct PidConfig {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double k_heading = 0.0;
    double integral_limit = 0.1;  // rad, bound on ki * integral
    double output_limit = kSteerLimit;

    void validate() const {
        for (const double g : {kp, ki, kd, k_heading})
            if (!std::isfinite(g)) throw std::invalid_argument("PidConfig: gains must be finite");
        if (!(integral_limit >= 0.0)) throw std::invalid_argument("PidConfig: integral_limit must be >= 0");
        if (!(output_limit > 0.0) || output_limit > kSteerLimit)
            throw std::invalid_argument("PidConfig: output_limit must be in (0, steer limit]");
    }
};

/// Integral and previous error; the only state a PID loop carries.
struct PidState {
    double integral = 0.0;
    double previous_error = 0.0;
    bool has_previous = false;
};

/**
 * @brief One PID update.
 *
 * `error` is the offset of the path from the vehicle (positive when the path is
 * to the left, i.e. minus the signed lateral error) and `heading_error` is path
 * heading minus vehicle heading, so positive gains steer toward the path.
 *
 *   delta = clamp(kp e + ki I + kd de/dt + k_heading e_phi)
 *
 * The integral contribution ki I is clamped to +-integral_limit.
 */
inline SteerCommand pid_step(const PidConfig& cfg, PidState& state, double error,
                             double heading_error, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("pid_step: dt must be positive");
    state.integral += error * dt;
    if (cfg.ki != 0.0) {
        const double cap = cfg.integral_limit / std::abs(cfg.ki);
        state.integral = std::clamp(state.integral, -cap, cap);
    }
    const double derivative = state.has_previous ? (error - state.previous_error) / dt : 0.0;
    state.previous_error = error;
    state.has_previous = true;
    const double delta = cfg.kp * error + cfg.ki * state.integral + cfg.kd * derivative +
                         cfg.k_heading * heading_error;
    return SteerCommand::both(std::clamp(delta, -cfg.output_limit, cfg.output_limit));
}

class PidController {
public:
    explicit PidController(PidConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    SteerCommand step(const TrackingError& e, double dt) {
        return pid_step(cfg_, state_, -e.lateral, -e.heading, dt);
    }

    const PidConfig& config() const { return cfg_; }
    const PidState& state() const { return state_; }

private:
    PidConfig cfg_;
    PidState state_;
};

// ---------------------------------------------------------------------------
// Kinematic MPC

struct KinMpcConfig {
    Eigen::Index horizon = 30;
    double q_lateral = 1.0;
    double q_heading = 1.0;
    double r = 1e-2;
    double u_min = -5.0 * std::numbers::pi / 180.0;
    double u_max = 5.0 * std::numbers::pi / 180.0;
    double dt = 0.05;
    double solver_tol = 1e-8;
    int solver_max_iter = 200;

    void validate() const {
        auto fail = [](const std::string& what) {
            throw std::invalid_argument("KinMpcConfig: " + what);
        };
        if (horizon < 1) fail("horizon must be >= 1");
        if (!(q_lateral >= 0.0 && q_heading >= 0.0)) fail("state weights must be >= 0");
        if (!(r > 0.0)) fail("r must be positive");
        if (!(u_min < u_max)) fail("u_min must be below u_max");
        if (u_min < -kSteerLimit || u_max > kSteerLimit) fail("bounds exceed the steer limit");
        if (!(dt > 0.0)) fail("dt must be positive");
        if (!(solver_tol > 0.0) || solver_max_iter < 1) fail("bad solver settings");
    }
};

struct KinMpcResult {
    SteerCommand command;
    Eigen::VectorXd steer_sequence;  // absolute steer over the horizon
    QpStatus status = QpStatus::Infeasible;
    int iterations = 0;
    QpProblem problem;   // condensed program over the steer deviations
    QpSolution solution;
};

/**
 * Condensed program in the steer deviation w_k = delta_k - atan(l kappa_k) for
 * the error dynamics
 *
 *   e_y+   = e_y + V dt e_phi
 *   e_phi+ = e_phi + V dt (1 + (l kappa_k)^2) / l * w_k
 *
 * with cost sum_{k=1..N} q_y e_y^2 + q_phi e_phi^2 + sum_{k=0..N-1} r w_k^2.
 * `window[k]` is the path point k steps ahead of the current projection.
 */
inline QpProblem assemble_kin_mpc_qp(const KinMpcConfig& cfg, const VehicleParams& params,
                                     const TrackingError& e0, const std::vector<PathPoint>& window,
                                     Eigen::VectorXd* feedforward = nullptr) {
    const Eigen::Index n = cfg.horizon;
    if (static_cast<Eigen::Index>(window.size()) != n)
        throw std::invalid_argument("kin_mpc: reference window length " + std::to_string(window.size()) +
                                    " != horizon " + std::to_string(n));
    const double vdt = params.speed * cfg.dt;
    const double l = params.wheelbase;

    Eigen::Matrix2d a;
    a << 1.0, vdt, 0.0, 1.0;
    Eigen::VectorXd ff(n);
    std::vector<Eigen::Vector2d> b(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        const double t = l * window[static_cast<std::size_t>(k)].curvature;
        ff(k) = std::atan(t);
        b[static_cast<std::size_t>(k)] = Eigen::Vector2d(0.0, vdt * (1.0 + t * t) / l);
    }

    // Stacked prediction x_{1..N} = Phi x0 + Gamma w.
    Eigen::MatrixXd phi(2 * n, 2);
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(2 * n, n);
    std::vector<Eigen::Matrix2d> powers(static_cast<std::size_t>(n) + 1, Eigen::Matrix2d::Identity());
    for (std::size_t i = 1; i < powers.size(); ++i) powers[i] = a * powers[i - 1];
    for (Eigen::Index k = 0; k < n; ++k) {
        phi.middleRows(2 * k, 2) = powers[static_cast<std::size_t>(k) + 1];
        for (Eigen::Index j = 0; j <= k; ++j)
            gamma.block(2 * k, j, 2, 1) = powers[static_cast<std::size_t>(k - j)] * b[static_cast<std::size_t>(j)];
    }
    Eigen::VectorXd qdiag(2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        qdiag(2 * k) = cfg.q_lateral;
        qdiag(2 * k + 1) = cfg.q_heading;
    }
    const Eigen::Vector2d x0(e0.lateral, e0.heading);
    const Eigen::VectorXd free = phi * x0;

    QpProblem qp;
    qp.hessian = 2.0 * gamma.transpose() * qdiag.asDiagonal() * gamma;
    qp.hessian.diagonal().array() += 2.0 * cfg.r;
    qp.linear = 2.0 * gamma.transpose() * qdiag.asDiagonal() * free;
    qp.constant = free.dot(qdiag.asDiagonal() * free);
    qp.ineq_matrix = Eigen::MatrixXd::Identity(n, n);
    qp.ineq_lower = (cfg.u_min - ff.array()).matrix();
    qp.ineq_upper = (cfg.u_max - ff.array()).matrix();
    qp.normalize();
    if (feedforward != nullptr) *feedforward = ff;
    return qp;
}

inline KinMpcResult kin_mpc_step(const KinMpcConfig& cfg, const VehicleParams& params,
                                 const VehicleState& state, const std::vector<PathPoint>& window) {
    cfg.validate();
    if (window.empty()) throw std::invalid_argument("kin_mpc: empty reference window");
    const TrackingError e0 = tracking_error(state, window.front());
    Eigen::VectorXd ff;
    KinMpcResult out;
    out.problem = assemble_kin_mpc_qp(cfg, params, e0, window, &ff);
    out.solution = solve_qp(out.problem, QpSettings{cfg.solver_tol, cfg.solver_max_iter});
    out.status = out.solution.status;
    out.iterations = out.solution.iterations;
    out.steer_sequence = ff + out.solution.x;
    out.command = SteerCommand::both(std::clamp(out.steer_sequence(0), cfg.u_min, cfg.u_max));
    return out;
}

}  // namespace ddmpc
