#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "avcbf/dynamics/dynamics.hpp"

using namespace avcbf::dynamics;

namespace {

AffineDynamics scalar_linear(double a) {
    AffineDynamics d;
    d.dim_x = 1;
    d.dim_u = 1;
    d.drift = [a](const Vector& x) { return Vector{{a * x(0)}}; };
    d.input_map = [](const Vector&) { return Matrix::Ones(1, 1); };
    return d;
}

double error_at_one(int steps) {
    const AffineDynamics d = scalar_linear(-1.0);
    Vector x{{1.0}};
    for (int i = 0; i < steps; ++i) x = rk4_step(d, x, Vector::Zero(1), 1.0 / steps, 1);
    return std::abs(x(0) - std::exp(-1.0));
}

}  // namespace

TEST(Rk4, ExponentialDecay) {
    const Vector x = rk4_step(scalar_linear(-1.0), Vector{{1.0}}, Vector::Zero(1), 0.1, 1);
    EXPECT_NEAR(x(0), 0.90483742, 1e-7);
    EXPECT_NEAR(x(0), std::exp(-0.1), 1e-7);
}

TEST(Rk4, ZeroFieldLeavesStateUnchanged) {
    const Vector x0{{1.25}};
    EXPECT_EQ(rk4_step(scalar_linear(0.0), x0, Vector::Zero(1), 0.1, 10), x0);
}

TEST(Rk4, ConstantInputIntegratedExactly) {
    EXPECT_DOUBLE_EQ(rk4_step(scalar_linear(0.0), Vector{{0.0}}, Vector{{2.0}}, 0.1, 1)(0), 0.2);
}

TEST(Rk4, ConvergenceOrder) {
    for (int n : {4, 8, 16, 32}) {
        const double order = std::log2(error_at_one(n) / error_at_one(2 * n));
        EXPECT_GE(order, 3.8) << "steps " << n;
    }
}

TEST(Rk4, HeldInputIsBitIdentical) {
    AffineDynamics d;
    d.dim_x = 2;
    d.dim_u = 1;
    d.drift = [](const Vector& x) { return Vector{{x(1), -std::sin(x(0))}}; };
    d.input_map = [](const Vector& x) { return Matrix{{0.0}, {1.0 + 0.1 * x(0) * x(0)}}; };
    const Vector x0{{0.3, -0.2}}, u{{0.7}};
    const Vector a = rk4_step(d, x0, u, 0.1, 10);
    const Vector b = rk4_step(d, x0, u, 0.1, 10);
    EXPECT_EQ(a, b);
}

TEST(Rk4, RejectsBadArguments) {
    const AffineDynamics d = scalar_linear(-1.0);
    EXPECT_THROW(rk4_step(d, Vector{{1.0}}, Vector::Zero(1), 0.0, 1), std::invalid_argument);
    EXPECT_THROW(rk4_step(d, Vector{{1.0}}, Vector::Zero(1), 0.1, 0), std::invalid_argument);
    EXPECT_THROW(rk4_step(d, Vector{{1.0, 2.0}}, Vector::Zero(1), 0.1, 1), avcbf::DimensionError);
}

TEST(Rk4, NonFiniteFieldAborts) {
    AffineDynamics d = scalar_linear(0.0);
    d.drift = [](const Vector& x) { return Vector{{1.0 / x(0)}}; };
    EXPECT_THROW(rk4_step(d, Vector{{0.0}}, Vector::Zero(1), 0.1, 1), avcbf::NumericError);
}

TEST(Chain, DoubleIntegratorZeroInput) {
    const Vector next = advance_chain(Vector{{1.0, 1.0}}, 0.0, 0.1);
    EXPECT_DOUBLE_EQ(next(0), 1.1);
    EXPECT_DOUBLE_EQ(next(1), 1.0);
}

TEST(Chain, DoubleIntegratorHeldInput) {
    const Vector next = advance_chain(Vector{{1.0, 1.0}}, 2.0, 0.1);
    EXPECT_NEAR(next(0), 1.11, 1e-15);
    EXPECT_NEAR(next(1), 1.2, 1e-15);
}

TEST(Chain, SingleState) { EXPECT_DOUBLE_EQ(advance_chain(Vector{{50.0}}, -10.0, 0.1)(0), 49.0); }

TEST(Chain, MatchesPolynomialSolution) {
    // Triple integrator: a(t) = a0 + a1 t + a2 t^2/2 + nu t^3/6
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> d(-5.0, 5.0), h(1e-3, 1.0);
    for (int i = 0; i < 500; ++i) {
        const Vector pi{{d(rng), d(rng), d(rng)}};
        const double nu = d(rng), t = h(rng);
        const Vector next = advance_chain(pi, nu, t);
        const double scale = 1.0 + pi.cwiseAbs().maxCoeff() + std::abs(nu);
        EXPECT_NEAR(next(0), pi(0) + pi(1) * t + pi(2) * t * t / 2 + nu * t * t * t / 6, 1e-14 * scale);
        EXPECT_NEAR(next(1), pi(1) + pi(2) * t + nu * t * t / 2, 1e-14 * scale);
        EXPECT_NEAR(next(2), pi(2) + nu * t, 1e-14 * scale);
    }
}

TEST(Chain, SplitStepsCompose) {
    // Two half steps with the same held input equal one full step.
    const Vector pi{{0.4, -1.3, 2.2}};
    const Vector full = advance_chain(pi, 0.9, 0.2);
    const Vector half = advance_chain(advance_chain(pi, 0.9, 0.1), 0.9, 0.1);
    EXPECT_LE((full - half).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Augmented, AdvancesStateChainsAndTime) {
    AugmentedState s;
    s.x = Vector{{1.0}};
    s.chains = {Vector{{1.0, 1.0}}, Vector{{50.0}}};
    s.t = 0.3;
    const AugmentedState n = step_augmented(s, Vector{{0.0}}, Vector{{2.0, -10.0}}, 0.1, scalar_linear(-1.0), 10);
    EXPECT_NEAR(n.x(0), std::exp(-0.1), 1e-10);  // RK4 truncation at h = 0.01
    EXPECT_NEAR(n.chains[0](0), 1.11, 1e-15);
    EXPECT_NEAR(n.chains[0](1), 1.2, 1e-15);
    EXPECT_DOUBLE_EQ(n.chains[1](0), 49.0);
    EXPECT_DOUBLE_EQ(n.t, 0.4);
}

TEST(Augmented, ChainCountMismatchThrows) {
    AugmentedState s;
    s.x = Vector{{1.0}};
    s.chains = {Vector{{1.0}}};
    EXPECT_THROW(step_augmented(s, Vector{{0.0}}, Vector{{1.0, 2.0}}, 0.1, scalar_linear(-1.0)),
                 avcbf::DimensionError);
}

TEST(Augmented, NonFiniteChainAborts) {
    AugmentedState s;
    s.x = Vector{{1.0}};
    s.chains = {Vector{{1.0}}};
    EXPECT_THROW(step_augmented(s, Vector{{0.0}}, Vector{{INFINITY}}, 0.1, scalar_linear(-1.0)), avcbf::NumericError);
}
