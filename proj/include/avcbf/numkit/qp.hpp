#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "avcbf/errors.hpp"
#include "avcbf/numkit/linalg.hpp"

namespace avcbf::numkit {

// minimize 0.5 w'Hw + c'w + constant_cost  subject to  G w >= h.
struct QpProblem {
    Matrix hessian;
    Vector linear_cost;
    Matrix ineq_matrix;
    Vector ineq_rhs;
    double constant_cost = 0.0;
    std::vector<std::string> var_names;

    int dim() const { return static_cast<int>(linear_cost.size()); }
    int rows() const { return static_cast<int>(ineq_rhs.size()); }

    void validate() const {
        const int n = dim();
        if (hessian.rows() != n || hessian.cols() != n)
            throw DimensionError("QpProblem: hessian must be n x n with n = len(linear_cost)");
        if (ineq_matrix.rows() != ineq_rhs.size())
            throw DimensionError("QpProblem: ineq_matrix rows differ from ineq_rhs length");
        if (ineq_matrix.rows() > 0 && ineq_matrix.cols() != n)
            throw DimensionError("QpProblem: ineq_matrix has wrong column count");
        if (!var_names.empty() && static_cast<int>(var_names.size()) != n)
            throw DimensionError("QpProblem: var_names length differs from dimension");
        if (!hessian.allFinite() || !linear_cost.allFinite() || !ineq_matrix.allFinite() ||
            !ineq_rhs.allFinite() || !std::isfinite(constant_cost))
            throw NumericError("QpProblem: non-finite data");
        if (n == 0) return;
        const double scale = std::max(1.0, hessian.cwiseAbs().maxCoeff());
        if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw std::invalid_argument("QpProblem: hessian is not symmetric");
        Eigen::SelfAdjointEigenSolver<Matrix> es(hessian, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw std::invalid_argument("QpProblem: hessian is not positive semidefinite");
    }
};

enum class QpStatus { Optimal, Infeasible, MaxIterations };

inline const char* to_string(QpStatus s) {
    switch (s) {
        case QpStatus::Optimal: return "Optimal";
        case QpStatus::Infeasible: return "Infeasible";
        case QpStatus::MaxIterations: return "MaxIterations";
    }
    return "?";
}

struct QpOptions {
    int max_iterations = 200;
    double regularization = 1e-10;
    double infeasibility_threshold = 1e-7;
};

struct QpSolution {
    QpStatus status = QpStatus::MaxIterations;
    std::optional<Vector> w_star;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double kkt_residual = std::numeric_limits<double>::quiet_NaN();
    std::vector<int> active_set;
    Vector multipliers;                 // one per row, original row scaling
    std::optional<Vector> certificate;  // y >= 0, G'y = 0, h'y > 0
    double infeasibility = 0.0;         // Phase-1 minimum (row-normalized max violation)
    int iterations = 0;
};

// KKT residual for a given multiplier vector. Stationarity is scaled by the
// magnitude of its terms; primal violation is absolute; complementarity is
// measured as |min(lambda_i, slack_i)|.
inline double qp_kkt_residual(const QpProblem& p, const Vector& w, const Vector& lambda,
                              double regularization = 0.0) {
    if (w.size() != p.dim()) throw DimensionError("qp_kkt_residual: w has wrong length");
    if (lambda.size() != p.rows()) throw DimensionError("qp_kkt_residual: lambda has wrong length");
    const Vector hw = p.hessian * w + regularization * w;
    Vector gtl = Vector::Zero(p.dim());
    if (p.rows() > 0) gtl = p.ineq_matrix.transpose() * lambda;
    double res = 0.0;
    if (p.dim() > 0) {
        const double scale = 1.0 + std::max({hw.cwiseAbs().maxCoeff(), p.linear_cost.cwiseAbs().maxCoeff(),
                                             gtl.cwiseAbs().maxCoeff()});
        res = (hw + p.linear_cost - gtl).cwiseAbs().maxCoeff() / scale;
    }
    const double lscale = 1.0 + (p.rows() > 0 ? lambda.cwiseAbs().maxCoeff() : 0.0);
    for (int i = 0; i < p.rows(); ++i) {
        const double slack = p.ineq_matrix.row(i).dot(w) - p.ineq_rhs(i);
        res = std::max(res, std::max(0.0, -slack));
        res = std::max(res, std::max(0.0, -lambda(i)) / lscale);
        res = std::max(res, std::abs(std::min(lambda(i), std::max(slack, 0.0))));
    }
    return res;
}

// KKT residual with multipliers estimated by nonnegative least squares over
// the rows that are active at w.
inline double qp_kkt_residual(const QpProblem& p, const Vector& w) {
    if (w.size() != p.dim()) throw DimensionError("qp_kkt_residual: w has wrong length");
    const Vector g = p.hessian * w + p.linear_cost;
    std::vector<int> active;
    for (int i = 0; i < p.rows(); ++i) {
        const double slack = p.ineq_matrix.row(i).dot(w) - p.ineq_rhs(i);
        if (std::abs(slack) <= 1e-9 * (1.0 + std::abs(p.ineq_rhs(i)))) active.push_back(i);
    }
    Vector lambda = Vector::Zero(p.rows());
    while (!active.empty()) {
        Matrix at(p.dim(), static_cast<int>(active.size()));
        for (size_t j = 0; j < active.size(); ++j) at.col(j) = p.ineq_matrix.row(active[j]).transpose();
        const Vector l = at.colPivHouseholderQr().solve(g);
        int worst = -1;
        for (size_t j = 0; j < active.size(); ++j) {
            if (l(j) < 0.0 && (worst < 0 || l(j) < l(worst))) worst = static_cast<int>(j);
        }
        if (worst < 0) {
            for (size_t j = 0; j < active.size(); ++j) lambda(active[j]) = l(j);
            break;
        }
        active.erase(active.begin() + worst);
    }
    return qp_kkt_residual(p, w, lambda, 0.0);
}

namespace detail {

// Orthonormal basis of the null space of the rows of a (full row rank).
inline Matrix null_space(const Matrix& a, int d) {
    if (a.rows() == 0) return Matrix::Identity(d, d);
    Eigen::HouseholderQR<Matrix> qr(a.transpose());
    const Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    return q.rightCols(d - a.rows());
}

inline Matrix gather_rows(const Matrix& g, const std::vector<int>& idx) {
    Matrix out(static_cast<int>(idx.size()), g.cols());
    for (size_t j = 0; j < idx.size(); ++j) out.row(j) = g.row(idx[j]);
    return out;
}

// Least-squares multipliers for a' lambda = grad.
inline Vector working_multipliers(const Matrix& a, const Vector& grad) {
    if (a.rows() == 0) return Vector(0);
    return a.transpose().colPivHouseholderQr().solve(grad);
}

// Index (into the working set) of the most negative multiplier below -tol,
// lowest index on ties; -1 when none.
inline int most_negative(const Vector& lambda, const std::vector<int>& work, double tol) {
    int pick = -1;
    for (int j = 0; j < lambda.size(); ++j) {
        if (lambda(j) >= -tol) continue;
        if (pick < 0 || lambda(j) < lambda(pick) || (lambda(j) == lambda(pick) && work[j] < work[pick]))
            pick = j;
    }
    return pick;
}

struct Blocking {
    int row = -1;
    double alpha = 0.0;
};

// Ratio test along p: the row reaching its bound first; ties go to the row
// whose value decreases fastest, then to the lowest index.
inline Blocking ratio_test(const Matrix& g, const Vector& h, const Vector& y, const Vector& p,
                           const std::vector<char>& in_work, double alpha_max) {
    Blocking best;
    best.alpha = alpha_max;
    double best_rate = 0.0;
    const double pnorm = p.norm();
    for (int i = 0; i < g.rows(); ++i) {
        if (in_work[i]) continue;
        const double rate = g.row(i).dot(p);
        if (rate >= -1e-14 * pnorm) continue;
        const double alpha = std::max(0.0, g.row(i).dot(y) - h(i)) / -rate;
        if (alpha > alpha_max) continue;
        if (best.row < 0) {
            best = {i, alpha};
            best_rate = rate;
            continue;
        }
        const double tie = 1e-14 * (1.0 + best.alpha);
        if (alpha < best.alpha - tie || (alpha <= best.alpha + tie && rate < best_rate)) {
            best = {i, alpha};
            best_rate = rate;
        }
    }
    return best;
}

// Solves (Z'HZ) y = r with symmetric diagonal equilibration.
inline Vector reduced_newton(const Matrix& m, const Vector& r) {
    const int k = static_cast<int>(m.rows());
    Vector s(k);
    for (int i = 0; i < k; ++i) s(i) = 1.0 / std::sqrt(std::max(m(i, i), std::numeric_limits<double>::min()));
    const Matrix ms = s.asDiagonal() * m * s.asDiagonal();
    const Vector ys = solve_linear_system(ms, s.cwiseProduct(r));
    return s.cwiseProduct(ys);
}

}  // namespace detail

inline QpSolution qp_solve(const QpProblem& problem, const std::optional<Vector>& warm_start = std::nullopt,
                           const QpOptions& options = {}) {
    problem.validate();
    const int n = problem.dim();
    const int m = problem.rows();
    if (warm_start && warm_start->size() != n) throw DimensionError("qp_solve: warm start has wrong length");

    QpSolution sol;
    sol.multipliers = Vector::Zero(m);

    // Row normalization; zero rows are decided immediately.
    Vector norms = Vector::Ones(m);
    std::vector<int> kept;
    for (int i = 0; i < m; ++i) {
        const double nr = n > 0 ? problem.ineq_matrix.row(i).norm() : 0.0;
        if (nr > 0.0) {
            norms(i) = nr;
            kept.push_back(i);
        } else if (problem.ineq_rhs(i) > options.infeasibility_threshold) {
            sol.status = QpStatus::Infeasible;
            Vector y = Vector::Zero(m);
            y(i) = 1.0;
            sol.certificate = y;
            sol.infeasibility = problem.ineq_rhs(i);
            return sol;
        }
    }
    const int mk = static_cast<int>(kept.size());
    Matrix g(mk, n);
    Vector h(mk);
    for (int j = 0; j < mk; ++j) {
        g.row(j) = problem.ineq_matrix.row(kept[j]) / norms(kept[j]);
        h(j) = problem.ineq_rhs(kept[j]) / norms(kept[j]);
    }

    Vector w = warm_start ? *warm_start : Vector::Zero(n);
    int iterations = 0;

    // Phase 1: minimize t subject to g w + t >= h, t >= 0.
    double t0 = 0.0;
    for (int j = 0; j < mk; ++j) t0 = std::max(t0, h(j) - g.row(j).dot(w));
    if (t0 > 0.0) {
        const int d = n + 1;
        Matrix ga(mk + 1, d);
        Vector ha(mk + 1);
        ga.setZero();
        ga.topLeftCorner(mk, n) = g;
        ga.col(n).head(mk).setOnes();
        ha.head(mk) = h;
        ga(mk, n) = 1.0;
        ha(mk) = 0.0;
        Vector y(d);
        y.head(n) = w;
        y(n) = t0;
        Vector grad = Vector::Zero(d);
        grad(n) = 1.0;
        std::vector<int> work;
        std::vector<char> in_work(mk + 1, 0);
        while (true) {
            if (++iterations > options.max_iterations) {
                sol.status = QpStatus::MaxIterations;
                sol.iterations = iterations;
                return sol;
            }
            const Matrix aw = detail::gather_rows(ga, work);
            const Matrix z = detail::null_space(aw, d);
            const Vector zg = z.transpose() * grad;
            if (zg.norm() <= 1e-13) {
                const Vector lambda = detail::working_multipliers(aw, grad);
                const int drop = detail::most_negative(lambda, work, 1e-12);
                if (drop >= 0) {
                    in_work[work[drop]] = 0;
                    work.erase(work.begin() + drop);
                    continue;
                }
                sol.infeasibility = y(n);
                if (y(n) > options.infeasibility_threshold) {
                    Vector cert = Vector::Zero(m);
                    for (size_t j = 0; j < work.size(); ++j) {
                        if (work[j] < mk) cert(kept[work[j]]) = std::max(0.0, lambda(j)) / norms(kept[work[j]]);
                    }
                    sol.status = QpStatus::Infeasible;
                    sol.certificate = cert;
                    sol.iterations = iterations;
                    return sol;
                }
                break;
            }
            const Vector p = -z * zg;
            const detail::Blocking blk = detail::ratio_test(ga, ha, y, p, in_work, INFINITY);
            if (blk.row < 0) throw NumericError("qp_solve: phase-1 direction unbounded");
            y += blk.alpha * p;
            if (blk.row == mk) {
                y(n) = 0.0;
                break;
            }
            work.push_back(blk.row);
            in_work[blk.row] = 1;
        }
        w = y.head(n);
    }

    // Phase 2: primal active set on the regularized problem.
    const Matrix hr = problem.hessian + options.regularization * Matrix::Identity(n, n);
    const Vector& c = problem.linear_cost;
    std::vector<int> work;
    std::vector<char> in_work(mk, 0);
    bool subproblem_solved = false;
    Vector lambda_w;
    while (true) {
        if (++iterations > options.max_iterations) {
            sol.status = QpStatus::MaxIterations;
            sol.iterations = iterations;
            return sol;
        }
        const Vector grad = hr * w + c;
        const Matrix aw = detail::gather_rows(g, work);
        Vector p = Vector::Zero(n);
        if (!subproblem_solved && static_cast<int>(work.size()) < n) {
            const Matrix z = detail::null_space(aw, n);
            const Matrix rm = z.transpose() * hr * z;
            Vector yz;
            try {
                yz = detail::reduced_newton(rm, -(z.transpose() * grad));
            } catch (const SingularMatrixError&) {
                sol.status = QpStatus::MaxIterations;
                sol.iterations = iterations;
                return sol;
            }
            p = z * yz;
        }
        const bool tiny = p.cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + w.cwiseAbs().maxCoeff());
        if (subproblem_solved || tiny || n == 0) {
            lambda_w = detail::working_multipliers(aw, grad);
            const double tol = 1e-11 * (1.0 + (n > 0 ? grad.cwiseAbs().maxCoeff() : 0.0));
            const int drop = detail::most_negative(lambda_w, work, tol);
            if (drop >= 0) {
                in_work[work[drop]] = 0;
                work.erase(work.begin() + drop);
                subproblem_solved = false;
                continue;
            }
            break;
        }
        const detail::Blocking blk = detail::ratio_test(g, h, w, p, in_work, 1.0);
        w += blk.alpha * p;
        if (blk.row >= 0) {
            work.push_back(blk.row);
            in_work[blk.row] = 1;
            subproblem_solved = false;
        } else {
            subproblem_solved = true;
        }
    }

    sol.status = QpStatus::Optimal;
    sol.iterations = iterations;
    for (size_t j = 0; j < work.size(); ++j) {
        sol.multipliers(kept[work[j]]) = std::max(0.0, lambda_w(j)) / norms(kept[work[j]]);
        sol.active_set.push_back(kept[work[j]]);
    }
    std::sort(sol.active_set.begin(), sol.active_set.end());
    sol.objective = 0.5 * w.dot(problem.hessian * w) + c.dot(w) + problem.constant_cost;
    sol.kkt_residual = qp_kkt_residual(problem, w, sol.multipliers, options.regularization);
    sol.w_star = w;
    return sol;
}

}  // namespace avcbf::numkit
