#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "avcbf/errors.hpp"

namespace avcbf::dynamics {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// x' = f(x) + g(x) u
struct AffineDynamics {
    int dim_x = 0;
    int dim_u = 0;
    std::function<Vector(const Vector&)> drift;
    std::function<Matrix(const Vector&)> input_map;

    Vector field(const Vector& x, const Vector& u) const {
        Vector dx = drift(x) + input_map(x) * u;
        if (!dx.allFinite()) throw NumericError("dynamics: non-finite derivative");
        return dx;
    }
};

inline Vector rk4_step(const AffineDynamics& dyn, const Vector& x, const Vector& u_held, double dt, int substeps = 10) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
    if (substeps < 1) throw std::invalid_argument("rk4_step: substeps must be at least one");
    if (x.size() != dyn.dim_x || u_held.size() != dyn.dim_u) throw DimensionError("rk4_step: dimension mismatch");
    const double h = dt / substeps;
    Vector y = x;
    for (int s = 0; s < substeps; ++s) {
        const Vector k1 = dyn.field(y, u_held);
        const Vector k2 = dyn.field(y + 0.5 * h * k1, u_held);
        const Vector k3 = dyn.field(y + 0.5 * h * k2, u_held);
        const Vector k4 = dyn.field(y + h * k3, u_held);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

// Physical state plus the integrator-chain states of each auxiliary variable.
struct AugmentedState {
    Vector x;
    std::vector<Vector> chains;
    double t = 0.0;
};

// Exact update of pi_0' = pi_1, ..., pi_{L-1}' = nu under held nu.
inline Vector advance_chain(const Vector& pi, double nu, double dt) {
    const int len = static_cast<int>(pi.size());
    Vector out(len);
    for (int j = 0; j < len; ++j) {
        double acc = 0.0;
        double term = 1.0;  // dt^(k-j)/(k-j)!
        for (int k = j; k < len; ++k) {
            acc += pi(k) * term;
            term *= dt / (k - j + 1);
        }
        out(j) = acc + nu * term;
    }
    return out;
}

inline AugmentedState step_augmented(const AugmentedState& state, const Vector& u, const Vector& nus, double dt,
                                     const AffineDynamics& dyn, int substeps = 10) {
    if (nus.size() != static_cast<int>(state.chains.size()))
        throw DimensionError("step_augmented: one auxiliary input per chain required");
    AugmentedState next;
    next.x = rk4_step(dyn, state.x, u, dt, substeps);
    next.chains.reserve(state.chains.size());
    for (size_t i = 0; i < state.chains.size(); ++i) {
        next.chains.push_back(advance_chain(state.chains[i], nus(static_cast<int>(i)), dt));
        if (!next.chains.back().allFinite()) throw NumericError("step_augmented: non-finite auxiliary state");
    }
    next.t = state.t + dt;
    return next;
}

}  // namespace avcbf::dynamics
