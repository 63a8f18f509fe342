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

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ddmpc {

/**
 * @brief A uniformly indexed sequence of d-dimensional samples.
 *
 * Samples are stored column-wise: column k is sample k. This is the layout the
 * Hankel construction slides over, so no transposition is needed downstream.
 */
class Signal {
public:
    Signal() = default;

    /// Takes ownership of a d x T matrix (one column per sample).
    explicit Signal(Eigen::MatrixXd samples) : samples_(std::move(samples)) { validate(); }

    static Signal fromRows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) throw std::invalid_argument("Signal: no samples");
        const auto d = static_cast<Eigen::Index>(rows.front().size());
        Eigen::MatrixXd m(d, static_cast<Eigen::Index>(rows.size()));
        for (size_t k = 0; k < rows.size(); ++k) {
            if (static_cast<Eigen::Index>(rows[k].size()) != d) {
                std::ostringstream msg;
                msg << "Signal: sample " << k << " has dimension " << rows[k].size()
                    << ", expected " << d;
                throw std::invalid_argument(msg.str());
            }
            for (Eigen::Index i = 0; i < d; ++i) m(i, static_cast<Eigen::Index>(k)) = rows[k][i];
        }
        return Signal(std::move(m));
    }

    /// Scalar convenience constructor.
    static Signal scalar(const std::vector<double>& values) {
        Eigen::MatrixXd m(1, static_cast<Eigen::Index>(values.size()));
        for (size_t k = 0; k < values.size(); ++k) m(0, static_cast<Eigen::Index>(k)) = values[k];
        return Signal(std::move(m));
    }

    Eigen::Index dim() const { return samples_.rows(); }
    Eigen::Index length() const { return samples_.cols(); }

    auto sample(Eigen::Index k) const { return samples_.col(k); }
    const Eigen::MatrixXd& matrix() const { return samples_; }

    bool operator==(const Signal& other) const = default;

private:
    void validate() const {
        if (samples_.cols() < 1 || samples_.rows() < 1)
            throw std::invalid_argument("Signal: no samples");
        if (!samples_.allFinite())
            throw std::invalid_argument("Signal: non-finite sample value");
    }

    Eigen::MatrixXd samples_;
};

/// Input/output record of one system run, sampled every `sample_time` seconds.
struct TrajectoryData {
    Signal inputs;
    Signal outputs;
    double sample_time = 0.0;

    TrajectoryData() = default;
    TrajectoryData(Signal u, Signal y, double dt)
        : inputs(std::move(u)), outputs(std::move(y)), sample_time(dt) {
        if (inputs.length() != outputs.length()) {
            std::ostringstream msg;
            msg << "TrajectoryData: input length " << inputs.length()
                << " differs from output length " << outputs.length();
            throw std::invalid_argument(msg.str());
        }
        if (!(sample_time > 0.0) || !std::isfinite(sample_time))
            throw std::invalid_argument("TrajectoryData: sample_time must be positive");
    }

    Eigen::Index length() const { return inputs.length(); }
    Eigen::Index inputDim() const { return inputs.dim(); }
    Eigen::Index outputDim() const { return outputs.dim(); }
};

}  // namespace ddmpc
