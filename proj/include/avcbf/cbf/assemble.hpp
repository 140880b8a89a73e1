#pragma once

#include <vector>

#include "avcbf/cbf/types.hpp"
#include "avcbf/numkit/qp.hpp"

namespace avcbf::cbf {

// weight * (w[index] - target)^2
struct QuadraticTerm {
    int index = 0;
    double weight = 0.0;
    double target = 0.0;
};

// weight * w[index]
struct LinearTerm {
    int index = 0;
    double weight = 0.0;
};

struct CostSpec {
    std::vector<QuadraticTerm> quadratic;
    std::vector<LinearTerm> linear;

    CostSpec& add(int index, double weight, double target = 0.0) {
        quadratic.push_back({index, weight, target});
        return *this;
    }
    CostSpec& add_linear(int index, double weight) {
        linear.push_back({index, weight});
        return *this;
    }

    double evaluate(const Vector& w) const {
        double f = 0.0;
        for (const auto& q : quadratic) f += q.weight * (w(q.index) - q.target) * (w(q.index) - q.target);
        for (const auto& l : linear) f += l.weight * w(l.index);
        return f;
    }
};

inline numkit::QpProblem assemble_qp(const std::vector<ConstraintRow>& rows, const CostSpec& cost,
                                     const DecisionLayout& layout) {
    const int n = layout.dim();
    numkit::QpProblem p;
    p.hessian = numkit::Matrix::Zero(n, n);
    p.linear_cost = numkit::Vector::Zero(n);
    p.var_names = layout.names();
    for (const auto& q : cost.quadratic) {
        if (q.index < 0 || q.index >= n) throw DimensionError("assemble_qp: cost term index out of range");
        if (q.weight < 0.0) throw std::invalid_argument("assemble_qp: negative quadratic weight");
        p.hessian(q.index, q.index) += 2.0 * q.weight;
        p.linear_cost(q.index) -= 2.0 * q.weight * q.target;
        p.constant_cost += q.weight * q.target * q.target;
    }
    for (const auto& l : cost.linear) {
        if (l.index < 0 || l.index >= n) throw DimensionError("assemble_qp: cost term index out of range");
        p.linear_cost(l.index) += l.weight;
    }
    p.ineq_matrix = numkit::Matrix::Zero(static_cast<int>(rows.size()), n);
    p.ineq_rhs = numkit::Vector::Zero(static_cast<int>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].coeffs.size() != n) throw DimensionError("assemble_qp: row width differs from decision dimension");
        p.ineq_matrix.row(static_cast<int>(i)) = rows[i].coeffs.transpose();
        p.ineq_rhs(static_cast<int>(i)) = rows[i].rhs;
    }
    return p;
}

}  // namespace avcbf::cbf
