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
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddmpc {

enum class QpStatus { Converged, MaxIterations, Infeasible };

inline const char* to_string(QpStatus s) {
    switch (s) {
        case QpStatus::Converged: return "converged";
        case QpStatus::MaxIterations: return "max-iter";
        case QpStatus::Infeasible: return "infeasible";
    }
    return "unknown";
}

/**
 * @brief Dense convex quadratic program
 *
 *   minimize    0.5 x' H x + g' x + c
 *   subject to  A_eq x = b_eq
 *               lower <= C x <= upper     (entries may be +-infinity)
 */
struct QpProblem {
    Eigen::MatrixXd hessian;
    Eigen::VectorXd linear;
    double constant = 0.0;
    Eigen::MatrixXd eq_matrix;
    Eigen::VectorXd eq_rhs;
    Eigen::MatrixXd ineq_matrix;
    Eigen::VectorXd ineq_lower;
    Eigen::VectorXd ineq_upper;

    Eigen::Index variables() const { return hessian.rows(); }

    double objective(const Eigen::VectorXd& x) const {
        return 0.5 * x.dot(hessian * x) + linear.dot(x) + constant;
    }

    /// Fills empty constraint blocks with correctly shaped zero-row matrices.
    void normalize() {
        const auto n = variables();
        if (eq_matrix.size() == 0) {
            eq_matrix.resize(0, n);
            eq_rhs.resize(0);
        }
        if (ineq_matrix.size() == 0) {
            ineq_matrix.resize(0, n);
            ineq_lower.resize(0);
            ineq_upper.resize(0);
        }
    }

    void validate() const {
        const auto n = variables();
        if (hessian.cols() != n || linear.size() != n)
            throw std::invalid_argument("QpProblem: hessian/linear shape mismatch");
        if (eq_matrix.rows() != eq_rhs.size() || (eq_matrix.rows() > 0 && eq_matrix.cols() != n))
            throw std::invalid_argument("QpProblem: equality shape mismatch");
        if (ineq_matrix.rows() != ineq_lower.size() || ineq_matrix.rows() != ineq_upper.size() ||
            (ineq_matrix.rows() > 0 && ineq_matrix.cols() != n))
            throw std::invalid_argument("QpProblem: inequality shape mismatch");
        for (Eigen::Index i = 0; i < ineq_lower.size(); ++i)
            if (ineq_lower(i) > ineq_upper(i))
                throw std::invalid_argument("QpProblem: lower bound above upper bound in row " +
                                            std::to_string(i));
    }
};

struct QpSettings {
    double tolerance = 1e-8;
    int max_iterations = 200;
};

struct QpSolution {
    Eigen::VectorXd x;
    double objective = 0.0;
    QpStatus status = QpStatus::Infeasible;
    int iterations = 0;
    /// Stationarity: H x + g = A_eq' eq_multipliers + C' ineq_multipliers.
    Eigen::VectorXd eq_multipliers;
    /// Positive on an active lower bound, negative on an active upper bound.
    Eigen::VectorXd ineq_multipliers;
    /// Equality rows found linearly dependent on earlier rows and left implicit.
    std::vector<Eigen::Index> dependent_eq_rows;
    /// Least-squares residual of the equality system; nonzero only when infeasible.
    double eq_inconsistency = 0.0;
};

/// Scaled first-order optimality residuals, computed from the solution alone.
struct KktResiduals {
    double stationarity = 0.0;
    double equality = 0.0;
    double inequality = 0.0;
    double complementarity = 0.0;
    double dual_sign = 0.0;

    double max() const {
        return std::max({stationarity, equality, inequality, complementarity, dual_sign});
    }
};

inline KktResiduals kkt_residuals(const QpProblem& qp, const QpSolution& sol) {
    KktResiduals r;
    const Eigen::VectorXd& x = sol.x;
    Eigen::VectorXd grad = qp.hessian * x + qp.linear;
    const double grad_scale = 1.0 + std::max(grad.lpNorm<Eigen::Infinity>(),
                                             qp.linear.lpNorm<Eigen::Infinity>());
    if (qp.eq_matrix.rows() > 0) grad -= qp.eq_matrix.transpose() * sol.eq_multipliers;
    if (qp.ineq_matrix.rows() > 0) grad -= qp.ineq_matrix.transpose() * sol.ineq_multipliers;
    r.stationarity = grad.lpNorm<Eigen::Infinity>() / grad_scale;

    for (Eigen::Index i = 0; i < qp.eq_matrix.rows(); ++i) {
        const double res = qp.eq_matrix.row(i).dot(x) - qp.eq_rhs(i);
        r.equality = std::max(r.equality, std::abs(res) / (1.0 + std::abs(qp.eq_rhs(i))));
    }
    for (Eigen::Index i = 0; i < qp.ineq_matrix.rows(); ++i) {
        const double cx = qp.ineq_matrix.row(i).dot(x);
        const double lo = qp.ineq_lower(i);
        const double hi = qp.ineq_upper(i);
        const double mu = sol.ineq_multipliers(i);
        if (std::isfinite(lo))
            r.inequality = std::max(r.inequality, (lo - cx) / (1.0 + std::abs(lo)));
        if (std::isfinite(hi))
            r.inequality = std::max(r.inequality, (cx - hi) / (1.0 + std::abs(hi)));
        if (mu > 0.0) {
            if (!std::isfinite(lo))
                r.dual_sign = std::max(r.dual_sign, mu);
            else
                r.complementarity =
                    std::max(r.complementarity, mu * std::abs(cx - lo) / grad_scale);
        } else if (mu < 0.0) {
            if (!std::isfinite(hi))
                r.dual_sign = std::max(r.dual_sign, -mu);
            else
                r.complementarity =
                    std::max(r.complementarity, -mu * std::abs(hi - cx) / grad_scale);
        }
    }
    return r;
}

namespace detail {

/**
 * Goldfarb-Idnani dual active-set method for strictly convex QPs.
 *
 * Works on the factor J = L^-T Q of the Cholesky factor of H and keeps the
 * upper-triangular R of the active constraint normals up to date with Givens
 * rotations, so every add/drop costs O(n^2).
 */
class DualActiveSet {
public:
    struct Constraint {
        Eigen::Index row;  // row into eq or ineq matrix
        bool upper;        // inequality side; unused for equalities
    };

    DualActiveSet(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& linear)
        : n_(hessian.rows()) {
        Eigen::LLT<Eigen::MatrixXd> llt(hessian);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("solve_qp: hessian is not positive definite");
        const Eigen::MatrixXd lower = llt.matrixL();
        J_ = lower.transpose().triangularView<Eigen::Upper>().solve(
            Eigen::MatrixXd::Identity(n_, n_));
        R_ = Eigen::MatrixXd::Zero(n_, n_);
        u_ = Eigen::VectorXd::Zero(n_ + 1);
        active_.resize(static_cast<size_t>(n_ + 1));
        x_ = -llt.solve(linear);
        d_.resize(n_);
        z_.resize(n_);
        r_.resize(n_ + 1);
    }

    /// Constrains normal' x = rhs; returns false on a degenerate (dependent) row.
    bool addEquality(const Eigen::VectorXd& normal, double rhs, Eigen::Index row) {
        computeDirections(normal);
        double step = 0.0;
        if (z_.squaredNorm() > kEps) step = (rhs - normal.dot(x_)) / z_.dot(normal);
        x_ += step * z_;
        u_(iq_) = step;
        u_.head(iq_) -= step * r_.head(iq_);
        active_[static_cast<size_t>(iq_)] = Constraint{row, false};
        if (!appendConstraint()) return false;
        ++equalities_;
        return true;
    }

    /**
     * Adds violated inequalities (normal' x + offset >= 0) until none is left.
     * `normals` is row-major: one constraint per row.
     */
    QpStatus solveInequalities(const Eigen::MatrixXd& normals, const Eigen::VectorXd& offsets,
                               const std::vector<Constraint>& tags, int max_iterations) {
        const Eigen::Index mi = normals.rows();
        if (mi == 0) return QpStatus::Converged;
        Eigen::VectorXd row_norm(mi);
        for (Eigen::Index i = 0; i < mi; ++i) row_norm(i) = std::max(normals.row(i).norm(), 1e-300);
        std::vector<bool> is_active(static_cast<size_t>(mi), false);

        while (true) {
            // Pick the most violated constraint, measured as distance to its hyperplane.
            Eigen::Index p = -1;
            double worst = 0.0;
            const double x_scale = x_.lpNorm<Eigen::Infinity>();
            for (Eigen::Index i = 0; i < mi; ++i) {
                if (is_active[static_cast<size_t>(i)]) continue;
                const double s = normals.row(i).dot(x_) + offsets(i);
                const double tol = 1e-12 * (row_norm(i) * x_scale + std::abs(offsets(i)) + 1.0);
                if (s < -tol && s / row_norm(i) < worst) {
                    worst = s / row_norm(i);
                    p = i;
                }
            }
            if (p < 0) return QpStatus::Converged;
            if (++iterations_ > max_iterations) return QpStatus::MaxIterations;

            const Eigen::VectorXd np = normals.row(p).transpose();
            double slack = np.dot(x_) + offsets(p);
            u_(iq_) = 0.0;
            active_[static_cast<size_t>(iq_)] = Constraint{p, tags[static_cast<size_t>(p)].upper};

            while (true) {
                computeDirections(np);
                // Largest dual step keeping active inequality multipliers nonnegative.
                double t_partial = kInf;
                Eigen::Index drop = -1;
                for (Eigen::Index k = equalities_; k < iq_; ++k) {
                    if (r_(k) > 0.0 && u_(k) / r_(k) < t_partial) {
                        t_partial = u_(k) / r_(k);
                        drop = k;
                    }
                }
                const double t_full =
                    z_.squaredNorm() > kEps ? -slack / z_.dot(np) : kInf;
                const double t = std::min(t_partial, t_full);
                if (!std::isfinite(t)) return QpStatus::Infeasible;

                if (!std::isfinite(t_full)) {
                    u_.head(iq_) -= t * r_.head(iq_);
                    u_(iq_) += t;
                    is_active[static_cast<size_t>(active_[static_cast<size_t>(drop)].row)] = false;
                    removeConstraint(drop);
                    continue;
                }
                x_ += t * z_;
                u_.head(iq_) -= t * r_.head(iq_);
                u_(iq_) += t;
                if (t == t_full) {
                    if (!appendConstraint()) return QpStatus::Infeasible;
                    is_active[static_cast<size_t>(p)] = true;
                    break;
                }
                is_active[static_cast<size_t>(active_[static_cast<size_t>(drop)].row)] = false;
                removeConstraint(drop);
                slack = np.dot(x_) + offsets(p);
                if (++iterations_ > max_iterations) return QpStatus::MaxIterations;
            }
        }
    }

    const Eigen::VectorXd& x() const { return x_; }
    int iterations() const { return iterations_; }
    Eigen::Index activeCount() const { return iq_; }
    Eigen::Index equalityCount() const { return equalities_; }
    const Constraint& active(Eigen::Index k) const { return active_[static_cast<size_t>(k)]; }
    double multiplier(Eigen::Index k) const { return u_(k); }

private:
    static constexpr double kEps = std::numeric_limits<double>::epsilon();
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    void computeDirections(const Eigen::VectorXd& normal) {
        d_.noalias() = J_.transpose() * normal;
        z_.noalias() = J_.rightCols(n_ - iq_) * d_.tail(n_ - iq_);
        if (iq_ > 0)
            r_.head(iq_) = R_.topLeftCorner(iq_, iq_).triangularView<Eigen::Upper>().solve(
                d_.head(iq_));
    }

    bool appendConstraint() {
        for (Eigen::Index j = n_ - 1; j >= iq_ + 1; --j) {
            double cc = d_(j - 1);
            double ss = d_(j);
            const double h = std::hypot(cc, ss);
            if (h == 0.0) continue;
            d_(j) = 0.0;
            ss /= h;
            cc /= h;
            if (cc < 0.0) {
                cc = -cc;
                ss = -ss;
                d_(j - 1) = -h;
            } else {
                d_(j - 1) = h;
            }
            const double xny = ss / (1.0 + cc);
            for (Eigen::Index k = 0; k < n_; ++k) {
                const double t1 = J_(k, j - 1);
                const double t2 = J_(k, j);
                J_(k, j - 1) = t1 * cc + t2 * ss;
                J_(k, j) = xny * (t1 + J_(k, j - 1)) - t2;
            }
        }
        ++iq_;
        R_.col(iq_ - 1).head(iq_) = d_.head(iq_);
        if (std::abs(d_(iq_ - 1)) <= kEps * r_norm_) {
            // Dependent normal: undo the append, the caller treats it as degenerate.
            R_.col(iq_ - 1).setZero();
            --iq_;
            return false;
        }
        r_norm_ = std::max(r_norm_, std::abs(d_(iq_ - 1)));
        return true;
    }

    void removeConstraint(Eigen::Index pos) {
        for (Eigen::Index i = pos; i < iq_ - 1; ++i) {
            active_[static_cast<size_t>(i)] = active_[static_cast<size_t>(i + 1)];
            u_(i) = u_(i + 1);
            R_.col(i) = R_.col(i + 1);
        }
        // Slot iq holds the candidate constraint and its multiplier.
        active_[static_cast<size_t>(iq_ - 1)] = active_[static_cast<size_t>(iq_)];
        u_(iq_ - 1) = u_(iq_);
        u_(iq_) = 0.0;
        R_.col(iq_ - 1).setZero();
        --iq_;
        for (Eigen::Index j = pos; j < iq_; ++j) {
            double cc = R_(j, j);
            double ss = R_(j + 1, j);
            const double h = std::hypot(cc, ss);
            if (h == 0.0) continue;
            cc /= h;
            ss /= h;
            R_(j + 1, j) = 0.0;
            if (cc < 0.0) {
                R_(j, j) = -h;
                cc = -cc;
                ss = -ss;
            } else {
                R_(j, j) = h;
            }
            const double xny = ss / (1.0 + cc);
            for (Eigen::Index k = j + 1; k < iq_; ++k) {
                const double t1 = R_(j, k);
                const double t2 = R_(j + 1, k);
                R_(j, k) = t1 * cc + t2 * ss;
                R_(j + 1, k) = xny * (t1 + R_(j, k)) - t2;
            }
            for (Eigen::Index k = 0; k < n_; ++k) {
                const double t1 = J_(k, j);
                const double t2 = J_(k, j + 1);
                J_(k, j) = t1 * cc + t2 * ss;
                J_(k, j + 1) = xny * (J_(k, j) + t1) - t2;
            }
        }
    }

    Eigen::Index n_;
    Eigen::MatrixXd J_;
    Eigen::MatrixXd R_;
    Eigen::VectorXd u_;
    Eigen::VectorXd x_;
    Eigen::VectorXd d_, z_, r_;
    std::vector<Constraint> active_;
    Eigen::Index iq_ = 0;
    Eigen::Index equalities_ = 0;
    double r_norm_ = 1.0;
    int iterations_ = 0;
};

}  // namespace detail

/**
 * @brief Solve a strictly convex dense QP.
 *
 * Equality rows are screened first with a rank-revealing QR: dependent rows are
 * dropped when consistent, and an inconsistent system reports `Infeasible` with
 * the least-squares point as the returned iterate. Throws std::invalid_argument
 * for malformed problems or a Hessian that is not positive definite.
 */
inline QpSolution solve_qp(QpProblem qp, const QpSettings& settings = {}) {
    qp.normalize();
    qp.validate();
    const Eigen::Index n = qp.variables();
    const Eigen::Index me = qp.eq_matrix.rows();
    const Eigen::Index mi = qp.ineq_matrix.rows();

    QpSolution sol;
    sol.eq_multipliers = Eigen::VectorXd::Zero(me);
    sol.ineq_multipliers = Eigen::VectorXd::Zero(mi);

    std::vector<Eigen::Index> eq_rows;
    if (me > 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(qp.eq_matrix.transpose());
        qr.setThreshold(1e-10);
        const Eigen::Index rank = qr.rank();
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = 0; k < me; ++k) {
            if (k < rank)
                eq_rows.push_back(perm(k));
            else
                sol.dependent_eq_rows.push_back(perm(k));
        }
        std::sort(eq_rows.begin(), eq_rows.end());
        std::sort(sol.dependent_eq_rows.begin(), sol.dependent_eq_rows.end());
        if (!sol.dependent_eq_rows.empty()) {
            // Consistency: the system is solvable iff the least-squares residual vanishes.
            const Eigen::VectorXd ls =
                qp.eq_matrix.completeOrthogonalDecomposition().solve(qp.eq_rhs);
            const Eigen::VectorXd res = qp.eq_matrix * ls - qp.eq_rhs;
            const double scale = 1.0 + qp.eq_rhs.lpNorm<Eigen::Infinity>();
            sol.eq_inconsistency = res.lpNorm<Eigen::Infinity>();
            if (sol.eq_inconsistency > settings.tolerance * scale) {
                sol.x = ls;
                sol.objective = qp.objective(ls);
                sol.status = QpStatus::Infeasible;
                return sol;
            }
        }
    }

    detail::DualActiveSet solver(qp.hessian, qp.linear);
    for (const Eigen::Index row : eq_rows) {
        if (!solver.addEquality(qp.eq_matrix.row(row).transpose(), qp.eq_rhs(row), row)) {
            sol.x = solver.x();
            sol.objective = qp.objective(sol.x);
            sol.status = QpStatus::Infeasible;
            return sol;
        }
    }

    // Two one-sided rows per finite bound: c'x - lo >= 0 and -c'x + hi >= 0.
    std::vector<detail::DualActiveSet::Constraint> tags;
    std::vector<Eigen::Index> source;
    for (Eigen::Index i = 0; i < mi; ++i) {
        if (std::isfinite(qp.ineq_lower(i))) tags.push_back({i, false});
        if (std::isfinite(qp.ineq_upper(i))) tags.push_back({i, true});
    }
    Eigen::MatrixXd normals(static_cast<Eigen::Index>(tags.size()), n);
    Eigen::VectorXd offsets(static_cast<Eigen::Index>(tags.size()));
    for (size_t k = 0; k < tags.size(); ++k) {
        const auto i = tags[k].row;
        const auto kk = static_cast<Eigen::Index>(k);
        if (tags[k].upper) {
            normals.row(kk) = -qp.ineq_matrix.row(i);
            offsets(kk) = qp.ineq_upper(i);
        } else {
            normals.row(kk) = qp.ineq_matrix.row(i);
            offsets(kk) = -qp.ineq_lower(i);
        }
    }

    sol.status = solver.solveInequalities(normals, offsets, tags, settings.max_iterations);
    sol.iterations = solver.iterations();
    sol.x = solver.x();
    sol.objective = qp.objective(sol.x);

    for (Eigen::Index k = 0; k < solver.activeCount(); ++k) {
        const auto& c = solver.active(k);
        const double u = solver.multiplier(k);
        if (k < solver.equalityCount()) {
            sol.eq_multipliers(c.row) = u;
        } else {
            const auto& tag = tags[static_cast<size_t>(c.row)];
            sol.ineq_multipliers(tag.row) += tag.upper ? -u : u;
        }
    }
    return sol;
}

}  // namespace ddmpc
