#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "avcbf/errors.hpp"

namespace avcbf::numkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class SingularMatrixError : public NumericError {
public:
    explicit SingularMatrixError(const std::string& what) : NumericError(what) {}
};

inline constexpr double kMaxConditionEstimate = 1e12;

namespace detail {

// In-place LU with partial pivoting on a row-equilibrated copy.
struct LuFactor {
    Matrix lu;
    std::vector<int> perm;
    Vector row_scale;
    bool singular = false;

    explicit LuFactor(const Matrix& a) : lu(a), perm(a.rows()), row_scale(a.rows()) {
        const int n = static_cast<int>(a.rows());
        for (int i = 0; i < n; ++i) {
            perm[i] = i;
            double s = lu.row(i).cwiseAbs().maxCoeff();
            if (s == 0.0 || !std::isfinite(s)) {
                singular = true;
                s = 1.0;
            }
            row_scale(i) = 1.0 / s;
            lu.row(i) *= row_scale(i);
        }
        for (int k = 0; k < n && !singular; ++k) {
            int p = k;
            for (int i = k + 1; i < n; ++i) {
                if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
            }
            if (lu(p, k) == 0.0) {
                singular = true;
                break;
            }
            if (p != k) {
                lu.row(p).swap(lu.row(k));
                std::swap(perm[p], perm[k]);
            }
            for (int i = k + 1; i < n; ++i) {
                lu(i, k) /= lu(k, k);
                for (int j = k + 1; j < n; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
            }
        }
    }

    // Solves the equilibrated system for an already scaled and permuted rhs.
    Vector solve_scaled(const Vector& b) const {
        const int n = static_cast<int>(lu.rows());
        Vector y(n);
        for (int i = 0; i < n; ++i) y(i) = b(perm[i]) * row_scale(perm[i]);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < i; ++j) y(i) -= lu(i, j) * y(j);
        }
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) y(i) -= lu(i, j) * y(j);
            y(i) /= lu(i, i);
        }
        return y;
    }
};

}  // namespace detail

// Infinity-norm condition number of the row-equilibrated matrix.
inline double condition_estimate(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("condition_estimate: matrix is not square");
    const int n = static_cast<int>(a.rows());
    if (n == 0) return 1.0;
    detail::LuFactor f(a);
    if (f.singular) return INFINITY;
    Matrix eq = f.row_scale.asDiagonal() * a;
    double inv_norm = 0.0;
    Matrix inv(n, n);
    for (int j = 0; j < n; ++j) {
        // Columns of the inverse of the equilibrated matrix.
        Vector e = Vector::Zero(n);
        e(j) = 1.0;
        Vector unscaled(n);
        for (int i = 0; i < n; ++i) unscaled(i) = e(i) / f.row_scale(i);
        inv.col(j) = f.solve_scaled(unscaled);
    }
    inv_norm = inv.cwiseAbs().rowwise().sum().maxCoeff();
    const double a_norm = eq.cwiseAbs().rowwise().sum().maxCoeff();
    const double c = a_norm * inv_norm;
    return std::isfinite(c) ? c : INFINITY;
}

inline Vector solve_linear_system(const Matrix& a, const Vector& b) {
    if (a.rows() != a.cols()) throw DimensionError("solve_linear_system: matrix is not square");
    if (a.rows() != b.size()) throw DimensionError("solve_linear_system: rhs length mismatch");
    const int n = static_cast<int>(a.rows());
    if (n == 0) return Vector(0);
    detail::LuFactor f(a);
    if (f.singular) throw SingularMatrixError("solve_linear_system: matrix is singular");
    const double cond = condition_estimate(a);
    if (!(cond <= kMaxConditionEstimate)) {
        throw SingularMatrixError("solve_linear_system: condition estimate " + std::to_string(cond) +
                                  " exceeds limit");
    }
    Vector x = f.solve_scaled(b);
    // One step of iterative refinement.
    Vector r = b - a * x;
    x += f.solve_scaled(r);
    if (!x.allFinite()) throw SingularMatrixError("solve_linear_system: non-finite solution");
    return x;
}

}  // namespace avcbf::numkit
