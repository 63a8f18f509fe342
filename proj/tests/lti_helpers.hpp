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

// Random discrete-time LTI systems for exercising the data-driven predictor.

#pragma once

#include <ddmpc/signal.hpp>

#include <Eigen/Dense>

#include <random>

namespace ddmpc::testing {

struct LtiSystem {
    Eigen::MatrixXd A, B, C;

    Eigen::Index states() const { return A.rows(); }
    Eigen::Index inputs() const { return B.cols(); }
    Eigen::Index outputs() const { return C.rows(); }

    /// Column k of the result is y_k = C x_k, with x_{k+1} = A x_k + B u_k.
    Eigen::MatrixXd simulate(Eigen::VectorXd x, const Eigen::MatrixXd& u,
                             Eigen::VectorXd* final_state = nullptr) const {
        Eigen::MatrixXd y(outputs(), u.cols());
        for (Eigen::Index k = 0; k < u.cols(); ++k) {
            y.col(k) = C * x;
            x = A * x + B * u.col(k);
        }
        if (final_state) *final_state = x;
        return y;
    }

    /// Stacked [C; CA; ...; CA^{L-1}].
    Eigen::MatrixXd observability(Eigen::Index L) const {
        Eigen::MatrixXd O(outputs() * L, states());
        Eigen::MatrixXd Ak = Eigen::MatrixXd::Identity(states(), states());
        for (Eigen::Index k = 0; k < L; ++k) {
            O.middleRows(k * outputs(), outputs()) = C * Ak;
            Ak = A * Ak;
        }
        return O;
    }
};

inline Eigen::MatrixXd randn(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
}

/// Random system scaled to spectral radius `radius`, observable and controllable with probability one.
inline LtiSystem random_lti(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m, Eigen::Index p,
                            double radius = 0.9) {
    LtiSystem sys;
    sys.A = randn(rng, n, n);
    const double rho = sys.A.eigenvalues().cwiseAbs().maxCoeff();
    sys.A *= radius / rho;
    sys.B = randn(rng, n, m);
    sys.C = randn(rng, p, n);
    return sys;
}

inline TrajectoryData random_lti_data(std::mt19937_64& rng, const LtiSystem& sys, Eigen::Index N) {
    const Eigen::MatrixXd u = randn(rng, sys.inputs(), N);
    const Eigen::VectorXd x0 = randn(rng, sys.states(), 1);
    return TrajectoryData(Signal(u), Signal(sys.simulate(x0, u)), 1.0);
}

}  // namespace ddmpc::testing
