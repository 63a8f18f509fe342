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

#include <ddmpc/hankel.hpp>
#include <ddmpc/qp_solver.hpp>
#include <ddmpc/signal.hpp>

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ddmpc {

/**
 * @brief Hyperparameters of the data-driven predictive controller.
 *
 * `horizon` is the number of predicted steps that enter the cost; `order_bound`
 * is an upper bound on the plant's state dimension and sets the length of the
 * measured history that pins the prediction to the current plant state.
 */
struct DdmpcConfig {
    Eigen::Index horizon = 24;
    Eigen::Index order_bound = 6;
    Eigen::MatrixXd output_weight;  // p x p
    Eigen::MatrixXd input_weight;   // m x m
    double lambda = 1e-3;
    Eigen::VectorXd u_min;
    Eigen::VectorXd u_max;
    /// Optional output bounds; empty means unbounded.
    Eigen::VectorXd y_min;
    Eigen::VectorXd y_max;
    /// Optional scalar bounds on every coefficient of alpha.
    double alpha_min = -std::numeric_limits<double>::infinity();
    double alpha_max = std::numeric_limits<double>::infinity();
    double solver_tol = 1e-8;
    int solver_max_iter = 200;
    /// Penalty used when the history cannot be matched exactly.
    double relaxation_weight = 1e6;

    /// L = 24, v = 6, Q = I, R = 1e-2 I, lambda = 1e-3, inputs bounded to +-bound_deg.
    static DdmpcConfig steering_defaults(Eigen::Index m = 2, Eigen::Index p = 3,
                                         double bound_deg = 5.0) {
        DdmpcConfig cfg;
        cfg.output_weight = Eigen::MatrixXd::Identity(p, p);
        cfg.input_weight = 1e-2 * Eigen::MatrixXd::Identity(m, m);
        cfg.u_max = Eigen::VectorXd::Constant(m, bound_deg * std::numbers::pi / 180.0);
        cfg.u_min = -cfg.u_max;
        return cfg;
    }

    Eigen::Index inputDim() const { return input_weight.rows(); }
    Eigen::Index outputDim() const { return output_weight.rows(); }
    bool boundsAlpha() const { return std::isfinite(alpha_min) || std::isfinite(alpha_max); }

    void validate() const {
        auto fail = [](const std::string& what) {
            throw std::invalid_argument("DdmpcConfig: " + what);
        };
        if (horizon < 1) fail("horizon L must be >= 1");
        if (order_bound < 1) fail("order bound v must be >= 1");
        auto check_spd = [&](const Eigen::MatrixXd& w, const char* name) {
            if (w.rows() < 1 || w.rows() != w.cols()) fail(std::string(name) + " must be square");
            if (!w.isApprox(w.transpose(), 1e-12)) fail(std::string(name) + " must be symmetric");
            const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
            if (es.eigenvalues().minCoeff() <= 0.0)
                fail(std::string(name) + " must be positive definite");
        };
        check_spd(output_weight, "Q");
        check_spd(input_weight, "R");
        const auto m = inputDim();
        if (u_min.size() != m || u_max.size() != m) fail("u_min/u_max must have dimension m");
        for (Eigen::Index i = 0; i < m; ++i)
            if (!(u_min(i) < u_max(i))) fail("u_min must be below u_max");
        if (y_min.size() != y_max.size() || (y_min.size() != 0 && y_min.size() != outputDim()))
            fail("y_min/y_max must be empty or have dimension p");
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be >= 0");
        if (!(alpha_min < alpha_max)) fail("alpha_min must be below alpha_max");
        if (!(solver_tol > 0.0)) fail("solver_tol must be positive");
        if (solver_max_iter < 1) fail("solver_max_iter must be >= 1");
    }
};

class ExcitationError : public std::runtime_error {
public:
    explicit ExcitationError(ExcitationReport report)
        : std::runtime_error(report.diagnostic), report_(std::move(report)) {}
    const ExcitationReport& report() const { return report_; }

private:
    ExcitationReport report_;
};

/// Smallest record length whose order-K input Hankel has enough columns for rank m K.
inline Eigen::Index minimum_data_length(Eigen::Index m, Eigen::Index order) {
    return (m + 1) * order - 1;
}

/**
 * @brief Order-(L+v) input/output Hankel matrices of one persistently exciting run.
 *
 * On construction the stacked data matrix D = [Hu; Hy] is also compressed onto
 * an orthonormal basis B of a subspace containing its row space. Every alpha
 * that matters to the controller lies in that subspace (components orthogonal to
 * it only add lambda |alpha|^2), so the per-step QP runs over z with alpha = B z.
 */
class DataDictionary {
public:
    static DataDictionary build(const TrajectoryData& data, const DdmpcConfig& cfg) {
        cfg.validate();
        const Eigen::Index m = data.inputDim();
        const Eigen::Index p = data.outputDim();
        if (m != cfg.inputDim() || p != cfg.outputDim()) {
            std::ostringstream msg;
            msg << "build_dictionary: data has m=" << m << ", p=" << p << " but config expects m="
                << cfg.inputDim() << ", p=" << cfg.outputDim();
            throw std::invalid_argument(msg.str());
        }
        const Eigen::Index n = data.length();
        const Eigen::Index pe_order = cfg.horizon + 2 * cfg.order_bound;
        const Eigen::Index n_min = minimum_data_length(m, pe_order);
        if (n < n_min) {
            std::ostringstream msg;
            msg << "build_dictionary: insufficient data, N = " << n << " but at least N = " << n_min
                << " samples are needed for rank " << m * pe_order << " at order " << pe_order;
            throw std::invalid_argument(msg.str());
        }
        ExcitationReport pe = check_persistent_excitation(data.inputs, pe_order);
        if (!pe.persistently_exciting) throw ExcitationError(std::move(pe));

        DataDictionary dict;
        dict.m_ = m;
        dict.p_ = p;
        dict.n_ = n;
        dict.past_ = cfg.order_bound;
        dict.future_ = cfg.horizon;
        dict.pe_ = std::move(pe);
        dict.hu_ = build_hankel(data.inputs, cfg.horizon + cfg.order_bound);
        dict.hy_ = build_hankel(data.outputs, cfg.horizon + cfg.order_bound);

        Eigen::MatrixXd stacked(dict.hu_.data.rows() + dict.hy_.data.rows(), dict.columns());
        stacked << dict.hu_.data, dict.hy_.data;
        const Eigen::Index k = std::min(stacked.rows(), stacked.cols());
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked.transpose());
        dict.basis_ = qr.householderQ() * Eigen::MatrixXd::Identity(stacked.cols(), k);
        dict.reduced_ = stacked * dict.basis_;
        return dict;
    }

    Eigen::Index inputDim() const { return m_; }
    Eigen::Index outputDim() const { return p_; }
    Eigen::Index dataLength() const { return n_; }
    Eigen::Index columns() const { return hu_.columns(); }
    Eigen::Index pastSteps() const { return past_; }
    Eigen::Index futureSteps() const { return future_; }
    Eigen::Index totalSteps() const { return past_ + future_; }
    bool peVerified() const { return pe_.persistently_exciting; }
    const ExcitationReport& excitation() const { return pe_; }

    const HankelMatrix& inputHankel() const { return hu_; }
    const HankelMatrix& outputHankel() const { return hy_; }
    const Eigen::MatrixXd& basis() const { return basis_; }
    /// [Hu; Hy] * basis().
    const Eigen::MatrixXd& reduced() const { return reduced_; }

    // Row ranges inside [Hu; Hy].
    Eigen::Index pastInputRow() const { return 0; }
    Eigen::Index futureInputRow() const { return m_ * past_; }
    Eigen::Index pastOutputRow() const { return m_ * (past_ + future_); }
    Eigen::Index futureOutputRow() const { return m_ * (past_ + future_) + p_ * past_; }

private:
    Eigen::Index m_ = 0, p_ = 0, n_ = 0, past_ = 0, future_ = 0;
    ExcitationReport pe_;
    HankelMatrix hu_, hy_;
    Eigen::MatrixXd basis_, reduced_;
};

inline DataDictionary build_dictionary(const TrajectoryData& data, const DdmpcConfig& cfg) {
    return DataDictionary::build(data, cfg);
}

/// Column k holds step k of the predicted window (past steps first).
struct PredictedTrajectory {
    Eigen::MatrixXd inputs;   // m x (v + L)
    Eigen::MatrixXd outputs;  // p x (v + L)
};

inline PredictedTrajectory predict_trajectory(const DataDictionary& dict,
                                              const Eigen::VectorXd& alpha) {
    if (alpha.size() != dict.columns()) {
        std::ostringstream msg;
        msg << "predict_trajectory: alpha has length " << alpha.size() << ", dictionary has "
            << dict.columns() << " columns";
        throw std::invalid_argument(msg.str());
    }
    const Eigen::VectorXd u = dict.inputHankel().data * alpha;
    const Eigen::VectorXd y = dict.outputHankel().data * alpha;
    const auto steps = dict.totalSteps();
    return PredictedTrajectory{u.reshaped(dict.inputDim(), steps),
                               y.reshaped(dict.outputDim(), steps)};
}

/// The last v measured (input, output) pairs, oldest first.
class HistoryBuffer {
public:
    HistoryBuffer(Eigen::Index length, Eigen::Index m, Eigen::Index p)
        : length_(length), m_(m), p_(p) {
        if (length < 1) throw std::invalid_argument("HistoryBuffer: length must be >= 1");
    }

    void push(const Eigen::VectorXd& u, const Eigen::VectorXd& y) {
        if (u.size() != m_ || y.size() != p_)
            throw std::invalid_argument("HistoryBuffer: sample dimension mismatch");
        inputs_.push_back(u);
        outputs_.push_back(y);
        if (static_cast<Eigen::Index>(inputs_.size()) > length_) {
            inputs_.pop_front();
            outputs_.pop_front();
        }
    }

    bool warmedUp() const { return static_cast<Eigen::Index>(inputs_.size()) == length_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(inputs_.size()); }
    Eigen::Index length() const { return length_; }

    Eigen::VectorXd stackedInputs() const { return stack(inputs_, m_); }
    Eigen::VectorXd stackedOutputs() const { return stack(outputs_, p_); }
    const Eigen::VectorXd& lastInput() const { return inputs_.back(); }

private:
    static Eigen::VectorXd stack(const std::deque<Eigen::VectorXd>& q, Eigen::Index dim) {
        Eigen::VectorXd out(dim * static_cast<Eigen::Index>(q.size()));
        for (size_t k = 0; k < q.size(); ++k) out.segment(static_cast<Eigen::Index>(k) * dim, dim) = q[k];
        return out;
    }

    Eigen::Index length_, m_, p_;
    std::deque<Eigen::VectorXd> inputs_, outputs_;
};

/**
 * @brief One step's quadratic program, in the reduced coordinates alpha = B z.
 *
 * The cost is the sum over the L future steps of |y - y_ref|_Q^2 + |u - u_ref|_R^2
 * plus lambda |alpha|^2, with the predictions substituted from the Hankel span.
 * Equalities pin the first v steps to the measured history; inequalities bound
 * the future inputs (and optionally outputs and alpha).
 */
struct DdmpcQp {
    QpProblem problem;
    const DataDictionary* dictionary = nullptr;
    /// Identity when alpha bounds forbid the reduction.
    bool reduced = true;
    Eigen::VectorXd y_ref;  // stacked p L
    Eigen::VectorXd u_ref;  // stacked m L
    Eigen::MatrixXd output_weight, input_weight;
    double lambda = 0.0;

    Eigen::VectorXd alphaFrom(const Eigen::VectorXd& z) const {
        return reduced ? Eigen::VectorXd(dictionary->basis() * z) : z;
    }

    /// Cost evaluated directly on alpha from the Hankel matrices.
    double cost(const Eigen::VectorXd& alpha) const {
        const auto& d = *dictionary;
        const Eigen::Index L = d.futureSteps();
        const Eigen::VectorXd u =
            d.inputHankel().data.bottomRows(d.inputDim() * L) * alpha - u_ref;
        const Eigen::VectorXd y =
            d.outputHankel().data.bottomRows(d.outputDim() * L) * alpha - y_ref;
        double j = lambda * alpha.squaredNorm();
        for (Eigen::Index k = 0; k < L; ++k) {
            const auto yk = y.segment(k * d.outputDim(), d.outputDim());
            const auto uk = u.segment(k * d.inputDim(), d.inputDim());
            j += yk.dot(output_weight * yk) + uk.dot(input_weight * uk);
        }
        return j;
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& alpha) const {
        const auto& d = *dictionary;
        const Eigen::Index L = d.futureSteps();
        const auto hu = d.inputHankel().data.bottomRows(d.inputDim() * L);
        const auto hy = d.outputHankel().data.bottomRows(d.outputDim() * L);
        const Eigen::VectorXd ru = weighted(hu * alpha - u_ref, input_weight);
        const Eigen::VectorXd ry = weighted(hy * alpha - y_ref, output_weight);
        return 2.0 * (hy.transpose() * ry + hu.transpose() * ru + lambda * alpha);
    }

    /// Hessian of `cost` with respect to alpha.
    Eigen::MatrixXd hessianInAlpha() const {
        const auto& d = *dictionary;
        const Eigen::Index L = d.futureSteps();
        const Eigen::MatrixXd hu = d.inputHankel().data.bottomRows(d.inputDim() * L);
        const Eigen::MatrixXd hy = d.outputHankel().data.bottomRows(d.outputDim() * L);
        Eigen::MatrixXd wu(hu.rows(), hu.cols()), wy(hy.rows(), hy.cols());
        for (Eigen::Index c = 0; c < hu.cols(); ++c) wu.col(c) = weighted(hu.col(c), input_weight);
        for (Eigen::Index c = 0; c < hy.cols(); ++c) wy.col(c) = weighted(hy.col(c), output_weight);
        return 2.0 * (hy.transpose() * wy + hu.transpose() * wu +
                      lambda * Eigen::MatrixXd::Identity(hu.cols(), hu.cols()));
    }

    static Eigen::VectorXd weighted(const Eigen::VectorXd& v, const Eigen::MatrixXd& w) {
        const Eigen::Index b = w.rows();
        Eigen::VectorXd out(v.size());
        for (Eigen::Index k = 0; k < v.size() / b; ++k) out.segment(k * b, b) = w * v.segment(k * b, b);
        return out;
    }
};

namespace detail {

inline Eigen::MatrixXd block_diag(const Eigen::MatrixXd& w, Eigen::Index copies) {
    const Eigen::Index b = w.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(b * copies, b * copies);
    for (Eigen::Index k = 0; k < copies; ++k) out.block(k * b, k * b, b, b) = w;
    return out;
}

}  // namespace detail

/**
 * @param y_ref p x L reference outputs, column k for predicted step k.
 * @param u_ref m x L reference inputs (usually zero).
 */
inline DdmpcQp assemble_qp(const DataDictionary& dict, const DdmpcConfig& cfg,
                           const HistoryBuffer& hist, const Eigen::MatrixXd& y_ref,
                           const Eigen::MatrixXd& u_ref) {
    const Eigen::Index m = dict.inputDim();
    const Eigen::Index p = dict.outputDim();
    const Eigen::Index L = dict.futureSteps();
    const Eigen::Index v = dict.pastSteps();
    if (y_ref.rows() != p || y_ref.cols() != L || u_ref.rows() != m || u_ref.cols() != L) {
        std::ostringstream msg;
        msg << "assemble_qp: references must be " << p << "x" << L << " and " << m << "x" << L
            << ", got " << y_ref.rows() << "x" << y_ref.cols() << " and " << u_ref.rows() << "x"
            << u_ref.cols();
        throw std::invalid_argument(msg.str());
    }
    if (!hist.warmedUp() || hist.length() != v)
        throw std::invalid_argument("assemble_qp: history buffer not warmed up with v samples");

    DdmpcQp out;
    out.dictionary = &dict;
    out.reduced = !cfg.boundsAlpha();
    out.y_ref = y_ref.reshaped();
    out.u_ref = u_ref.reshaped();
    out.output_weight = cfg.output_weight;
    out.input_weight = cfg.input_weight;
    out.lambda = cfg.lambda;

    // Rows of [Hu; Hy] expressed in the decision coordinates.
    Eigen::MatrixXd coords;
    if (out.reduced) {
        coords = dict.reduced();
    } else {
        coords.resize(dict.inputHankel().data.rows() + dict.outputHankel().data.rows(),
                      dict.columns());
        coords << dict.inputHankel().data, dict.outputHankel().data;
    }
    const Eigen::Index nz = coords.cols();
    const auto mu = coords.middleRows(dict.futureInputRow(), m * L);
    const auto my = coords.middleRows(dict.futureOutputRow(), p * L);
    const Eigen::MatrixXd wu = detail::block_diag(cfg.input_weight, L);
    const Eigen::MatrixXd wy = detail::block_diag(cfg.output_weight, L);

    QpProblem& qp = out.problem;
    qp.hessian = 2.0 * (my.transpose() * wy * my + mu.transpose() * wu * mu);
    qp.hessian.diagonal().array() += 2.0 * cfg.lambda;
    qp.linear = -2.0 * (my.transpose() * (wy * out.y_ref) + mu.transpose() * (wu * out.u_ref));
    qp.constant = out.y_ref.dot(wy * out.y_ref) + out.u_ref.dot(wu * out.u_ref);

    qp.eq_matrix.resize((m + p) * v, nz);
    qp.eq_matrix << coords.middleRows(dict.pastInputRow(), m * v),
        coords.middleRows(dict.pastOutputRow(), p * v);
    qp.eq_rhs.resize((m + p) * v);
    qp.eq_rhs << hist.stackedInputs(), hist.stackedOutputs();

    const bool bound_y = cfg.y_min.size() > 0;
    const Eigen::Index rows = m * L + (bound_y ? p * L : 0) + (out.reduced ? 0 : nz);
    qp.ineq_matrix.resize(rows, nz);
    qp.ineq_lower.resize(rows);
    qp.ineq_upper.resize(rows);
    qp.ineq_matrix.topRows(m * L) = mu;
    qp.ineq_lower.head(m * L) = cfg.u_min.replicate(L, 1);
    qp.ineq_upper.head(m * L) = cfg.u_max.replicate(L, 1);
    Eigen::Index row = m * L;
    if (bound_y) {
        qp.ineq_matrix.middleRows(row, p * L) = my;
        qp.ineq_lower.segment(row, p * L) = cfg.y_min.replicate(L, 1);
        qp.ineq_upper.segment(row, p * L) = cfg.y_max.replicate(L, 1);
        row += p * L;
    }
    if (!out.reduced) {
        qp.ineq_matrix.middleRows(row, nz).setIdentity();
        qp.ineq_lower.segment(row, nz).setConstant(cfg.alpha_min);
        qp.ineq_upper.segment(row, nz).setConstant(cfg.alpha_max);
    }
    return out;
}

struct DdmpcSolution {
    Eigen::VectorXd u_first;
    Eigen::MatrixXd u_seq;  // m x L, column k = predicted input at step k
    Eigen::MatrixXd y_seq;  // p x L
    Eigen::VectorXd alpha;
    double cost = 0.0;
    QpStatus status = QpStatus::Infeasible;
    int iterations = 0;
    /// Set when the history constraint was replaced by its least-squares penalty.
    bool initial_condition_relaxed = false;
    double solve_time = 0.0;  // seconds
};

/**
 * Solves the assembled program. If the history equalities are inconsistent with
 * the data span, they are moved into the cost with `cfg.relaxation_weight` and
 * the solution is flagged.
 */
inline DdmpcSolution solve_ddmpc_qp(const DdmpcQp& ddqp, const DdmpcConfig& cfg) {
    const QpSettings settings{cfg.solver_tol, cfg.solver_max_iter};
    QpSolution qs = solve_qp(ddqp.problem, settings);
    DdmpcSolution sol;
    if (qs.status == QpStatus::Infeasible && qs.eq_inconsistency > 0.0) {
        QpProblem relaxed = ddqp.problem;
        const double w = cfg.relaxation_weight;
        relaxed.hessian += 2.0 * w * relaxed.eq_matrix.transpose() * relaxed.eq_matrix;
        relaxed.linear -= 2.0 * w * relaxed.eq_matrix.transpose() * relaxed.eq_rhs;
        relaxed.constant += w * relaxed.eq_rhs.squaredNorm();
        relaxed.eq_matrix.resize(0, relaxed.variables());
        relaxed.eq_rhs.resize(0);
        qs = solve_qp(std::move(relaxed), settings);
        sol.initial_condition_relaxed = true;
    }

    const DataDictionary& d = *ddqp.dictionary;
    const Eigen::Index L = d.futureSteps();
    sol.status = qs.status;
    sol.iterations = qs.iterations;
    sol.alpha = ddqp.alphaFrom(qs.x);
    const PredictedTrajectory pred = predict_trajectory(d, sol.alpha);
    sol.u_seq = pred.inputs.rightCols(L);
    sol.y_seq = pred.outputs.rightCols(L);
    sol.u_first = sol.u_seq.col(0);
    sol.cost = ddqp.cost(sol.alpha);
    return sol;
}

/// assemble_qp followed by solve_ddmpc_qp, timed with a steady clock.
inline DdmpcSolution ddmpc_step(const DataDictionary& dict, const DdmpcConfig& cfg,
                                const HistoryBuffer& hist, const Eigen::MatrixXd& y_ref,
                                const Eigen::MatrixXd& u_ref) {
    const auto start = std::chrono::steady_clock::now();
    const DdmpcQp qp = assemble_qp(dict, cfg, hist, y_ref, u_ref);
    DdmpcSolution sol = solve_ddmpc_qp(qp, cfg);
    sol.solve_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sol;
}

/**
 * Receding-horizon wrapper: one instance per plant loop.
 *
 *   measure y_t -> step(y_ref) -> apply u_first -> record(u_first, y_t)
 */
class DdmpcController {
public:
    DdmpcController(std::shared_ptr<const DataDictionary> dict, DdmpcConfig cfg)
        : dict_(std::move(dict)),
          cfg_(std::move(cfg)),
          history_(dict_->pastSteps(), dict_->inputDim(), dict_->outputDim()) {
        cfg_.validate();
    }

    DdmpcSolution step(const Eigen::MatrixXd& y_ref) const {
        return ddmpc_step(*dict_, cfg_, history_, y_ref,
                          Eigen::MatrixXd::Zero(dict_->inputDim(), dict_->futureSteps()));
    }
    DdmpcSolution step(const Eigen::MatrixXd& y_ref, const Eigen::MatrixXd& u_ref) const {
        return ddmpc_step(*dict_, cfg_, history_, y_ref, u_ref);
    }

    void record(const Eigen::VectorXd& u, const Eigen::VectorXd& y) { history_.push(u, y); }

    const HistoryBuffer& history() const { return history_; }
    const DdmpcConfig& config() const { return cfg_; }
    const DataDictionary& dictionary() const { return *dict_; }

private:
    std::shared_ptr<const DataDictionary> dict_;
    DdmpcConfig cfg_;
    HistoryBuffer history_;
};

}  // namespace ddmpc
