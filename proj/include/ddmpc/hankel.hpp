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

#include <Eigen/SVD>

#include <sstream>
#include <stdexcept>
#include <string>

namespace ddmpc {

/**
 * @brief Block-Hankel expansion of a signal.
 *
 * Block row i, column j holds sample i + j, so every column is a length-`order`
 * window of the source signal and neighbouring columns are shifted by one step.
 */
struct HankelMatrix {
    Eigen::MatrixXd data;
    Eigen::Index block_dim = 0;
    Eigen::Index order = 0;

    Eigen::Index columns() const { return data.cols(); }
    auto blockRow(Eigen::Index i) const { return data.middleRows(i * block_dim, block_dim); }
};

inline HankelMatrix build_hankel(const Signal& signal, Eigen::Index order) {
    const Eigen::Index n = signal.length();
    if (order < 1) throw std::invalid_argument("build_hankel: order must be positive");
    if (order > n) {
        std::ostringstream msg;
        msg << "build_hankel: order " << order << " exceeds signal length " << n;
        throw std::invalid_argument(msg.str());
    }
    const Eigen::Index d = signal.dim();
    const Eigen::Index cols = n - order + 1;
    HankelMatrix h{Eigen::MatrixXd(d * order, cols), d, order};
    for (Eigen::Index i = 0; i < order; ++i)
        h.data.middleRows(i * d, d) = signal.matrix().middleCols(i, cols);
    return h;
}

/// Row partition of an order-(past + L) Hankel matrix; views into the source.
struct HankelPartition {
    Eigen::Block<const Eigen::MatrixXd> past;
    Eigen::Block<const Eigen::MatrixXd> future;
    Eigen::Index past_order;
    Eigen::Index future_order;
};

inline HankelPartition split_past_future(const HankelMatrix& h, Eigen::Index past) {
    if (past < 1) throw std::invalid_argument("split_past_future: past must be positive");
    if (past >= h.order) {
        std::ostringstream msg;
        msg << "split_past_future: past " << past << " must be smaller than order " << h.order;
        throw std::invalid_argument(msg.str());
    }
    const Eigen::Index split = past * h.block_dim;
    const Eigen::MatrixXd& m = h.data;
    return HankelPartition{m.topRows(split), m.bottomRows(m.rows() - split), past,
                           h.order - past};
}

inline Eigen::MatrixXd restack(const HankelPartition& p) {
    Eigen::MatrixXd out(p.past.rows() + p.future.rows(), p.past.cols());
    out << p.past, p.future;
    return out;
}

inline constexpr double kDefaultRankTolerance = 1e-8;

struct ExcitationReport {
    bool persistently_exciting = false;
    Eigen::Index numerical_rank = 0;
    Eigen::Index required_rank = 0;
    /// Smallest singular value counted towards the rank (0 when the rank is 0).
    double smallest_retained_singular_value = 0.0;
    double largest_singular_value = 0.0;
    std::string diagnostic;
};

/**
 * Numerical persistency-of-excitation test: the order-`order` Hankel matrix of
 * `signal` must have full row rank dim * order. Singular values at or below
 * tol * sigma_max are treated as zero.
 */
inline ExcitationReport check_persistent_excitation(const Signal& signal, Eigen::Index order,
                                                    double tol = kDefaultRankTolerance) {
    if (tol < 0.0) throw std::invalid_argument("check_persistent_excitation: tol must be >= 0");
    ExcitationReport report;
    report.required_rank = signal.dim() * order;
    const HankelMatrix h = build_hankel(signal, order);

    const Eigen::BDCSVD<Eigen::MatrixXd> svd(h.data);
    const Eigen::VectorXd& sv = svd.singularValues();
    report.largest_singular_value = sv.size() > 0 ? sv(0) : 0.0;
    const double threshold = tol * report.largest_singular_value;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > threshold && sv(i) > 0.0) {
            ++report.numerical_rank;
            report.smallest_retained_singular_value = sv(i);
        }
    }

    std::ostringstream msg;
    if (h.columns() < report.required_rank) {
        msg << "insufficient columns: " << h.columns() << " Hankel columns cannot reach rank "
            << report.required_rank;
    } else if (report.numerical_rank == report.required_rank) {
        report.persistently_exciting = true;
        msg << "persistently exciting of order " << order << " (rank " << report.numerical_rank
            << ")";
    } else {
        msg << "not persistently exciting of order " << order << ": rank "
            << report.numerical_rank << " < " << report.required_rank;
    }
    report.diagnostic = msg.str();
    return report;
}

}  // namespace ddmpc
