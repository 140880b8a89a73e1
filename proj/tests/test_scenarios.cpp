#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "avcbf/scenarios/registry.hpp"
#include "avcbf/sim/engine.hpp"
#include "support/scenario_checks.hpp"

using namespace avcbf;
using namespace avcbf::scenarios;

namespace {

AugmentedState acc_state(double z, double v, std::vector<Vector> chains) {
    AugmentedState s;
    s.x = Vector{{z, v}};
    s.chains = std::move(chains);
    return s;
}

AugmentedState unicycle_state(double x, double y, double th, double v, std::vector<Vector> chains) {
    AugmentedState s;
    s.x = Vector{{x, y, th, v}};
    s.chains = std::move(chains);
    return s;
}

}  // namespace

TEST(Registry, ListsEveryVariant) {
    const auto ids = scenario_ids();
    EXPECT_EQ(ids.size(), 9u);
    for (const auto& id : ids) EXPECT_EQ(make_scenario(id)->id(), id);
}

TEST(Registry, RejectsUnknownIdsAndKeys) {
    EXPECT_THROW(make_scenario("acc/nope"), ConfigError);
    EXPECT_THROW(make_scenario("unicycle/avcbf_m"), ConfigError);
    EXPECT_THROW(make_scenario("unicycle_mixed/hocbf"), ConfigError);
    EXPECT_THROW(make_scenario("acc/avcbf", {{"bogus", 1.0}}), ConfigError);
    EXPECT_THROW(make_scenario("acc/hocbf", {{"p1_0", 1.0}}), ConfigError);
    EXPECT_THROW(make_scenario("acc/avcbf", {{"c_d", 0.3}, {"c_d_end", 0.2}}), ConfigError);
}

TEST(Registry, AppliesOverridesAndTiming) {
    const auto sc = make_scenario("acc/avcbf", {{"v0", 20.0}, {"dt", 0.05}, {"T", 3.0}, {"c_d", 0.23}});
    EXPECT_EQ(sc->initial_state().x(1), 20.0);
    EXPECT_EQ(sc->dt(), 0.05);
    EXPECT_EQ(sc->horizon(), 3.0);
    const auto& acc = dynamic_cast<const AccAvcbf&>(*sc);
    EXPECT_EQ(acc.params().c_d(1.0), 0.23);
}

TEST(Registry, RejectsInvalidParameters) {
    EXPECT_THROW(make_scenario("acc/avcbf", {{"M", -1.0}}), ConfigError);
    EXPECT_THROW(make_scenario("acc/avcbf", {{"dt", 0.0}}), ConfigError);
    EXPECT_THROW(make_scenario("unicycle/hocbf", {{"x0", 0.2}}), ConfigError);
    EXPECT_THROW(make_scenario("unicycle/hocbf", {{"r_o", 0.0}}), ConfigError);
}

TEST(AccResistance, Values) {
    const AccParams p;
    EXPECT_NEAR(acc_resistance(6.0, p), 39.1, 1e-12);
    EXPECT_NEAR(acc_resistance(13.89, p), 0.1 + 69.45 + 0.25 * 13.89 * 13.89, 1e-12);
    EXPECT_NEAR(acc_resistance(1e-12, p), 0.1, 1e-9);
    EXPECT_THROW(acc_resistance(0.0, p), NumericError);
}

TEST(AccAvcbf, InitialLevelsAndRowCoefficients) {
    const AccAvcbf sc{AccParams{}};
    const AugmentedState s = sc.initial_state();
    const auto psi = sc.psi_levels(s);
    EXPECT_NEAR(psi[0], 90.0, 1e-12);
    EXPECT_NEAR(psi[1], 106.89, 1e-12);
    const auto rows = sc.rows(s);
    EXPECT_EQ(rows[0].tag.kind, cbf::RowKind::HighestAvcbf);
    EXPECT_NEAR(rows[0].coeffs(sc.layout().nu(0)), 90.0, 1e-12);
    EXPECT_NEAR(rows[0].coeffs(sc.layout().u(0)), -1.0 / 1650.0, 1e-18);
    EXPECT_NO_THROW(sc.check_initial(s));
}

TEST(AccAvcbf, BarrierBoundaryGivesZeroLevel) {
    const AccAvcbf sc{AccParams{}};
    for (double a : {0.1, 1.0, 7.0}) EXPECT_EQ(sc.psi_levels(acc_state(10.0, 8.0, {Vector{{a, 0.3}}}))[0], 0.0);
}

TEST(AccAvcbf, AdaptiveRewriteIdentity) {
    // psi_1 = a (b' + k1 (1 + a'/(k1 a)) b)
    const AccParams p;
    const AccAvcbf sc{p};
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> z(11.0, 200.0), v(0.5, 30.0), a(0.05, 5.0), ad(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const double zz = z(rng), vv = v(rng), aa = a(rng), aad = ad(rng);
        const double b = zz - p.l_p, bd = p.v_p - vv;
        const double expect = aa * (bd + p.k1 * (1.0 + aad / (p.k1 * aa)) * b);
        const double psi1 = sc.psi_levels(acc_state(zz, vv, {Vector{{aa, aad}}}))[1];
        EXPECT_NEAR(psi1, expect, 1e-10 * std::max(1.0, std::abs(expect)));
    }
}

TEST(AccAvcbf, PositivityLink) {
    const AccAvcbf sc{AccParams{}};
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> z(-50.0, 200.0), a(1e-6, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double zz = z(rng);
        const double psi0 = sc.psi_levels(acc_state(zz, 10.0, {Vector{{a(rng), 0.0}}}))[0];
        const double b = zz - 10.0;
        EXPECT_EQ(std::signbit(psi0), std::signbit(b));
        EXPECT_EQ(psi0 == 0.0, b == 0.0);
    }
}

TEST(AccAvcbf, InitialCheckRejectsNegativeLevels) {
    AccParams p;
    p.z0 = 5.0;
    EXPECT_THROW(AccAvcbf(p).check_initial(AccAvcbf(p).initial_state()), ConfigError);
    AccParams q;
    q.pi12_0 = -5.0;
    EXPECT_THROW(AccAvcbf(q).check_initial(AccAvcbf(q).initial_state()), ConfigError);
}

TEST(AccPacbf, InitialLevel) {
    const AccPacbf sc{AccParams{}, PacbfParams{}};
    const auto psi = sc.psi_levels(sc.initial_state());
    EXPECT_NEAR(psi[0], 90.0, 1e-12);
    EXPECT_NEAR(psi[1], 842.19, 1e-9);
}

TEST(AccPacbf, UpperBoxRowForcesNonPositiveRate) {
    const AccPacbf sc{AccParams{}, PacbfParams{}};
    const AugmentedState s = acc_state(100.0, 6.0, {Vector{{3.0}}});
    Vector w = Vector::Zero(sc.layout().dim());
    const auto rows = sc.rows(s);
    bool found = false;
    for (const auto& r : rows) {
        if (r.tag.kind != cbf::RowKind::PacbfAux || !r.tag.upper) continue;
        found = true;
        w(sc.layout().nu(0)) = 1e-6;
        EXPECT_LT(r.slack(w), 0.0);
        w(sc.layout().nu(0)) = 0.0;
        EXPECT_GE(r.slack(w), 0.0);
    }
    EXPECT_TRUE(found);
}

TEST(AccPacbf, BoxHoldsAlongRun) {
    const auto sc = make_scenario("acc/pacbf");
    const auto tr = sim::simulate(*sc);
    EXPECT_EQ(tr.termination, sim::Termination::Horizon);
    for (const auto& r : tr.rows) {
        EXPECT_GE(r.state.chains[0](0), -1e-9);
        EXPECT_LE(r.state.chains[0](0), 3.0 + 1e-9);
    }
    EXPECT_GE(tr.min_b, -1e-6);
}

TEST(AccReduced, ExponentialAuxiliary) {
    AccParams p;
    p.a1_0 = -30.0;
    p.v0 = 20.0;
    const AccReduced sc{p, ReducedWeights{}};
    EXPECT_NEAR(sc.aux_value(sc.initial_state()), std::exp(1.5), 1e-12);
    EXPECT_NEAR(std::exp(1.5), 4.48169, 1e-5);
    EXPECT_EQ(sc.psi_levels(acc_state(10.0, 20.0, {Vector{{-30.0}}}))[0], 0.0);
    for (const auto& r : sc.rows(sc.initial_state())) EXPECT_NE(r.tag.kind, cbf::RowKind::AuxChain);
}

TEST(AccReduced, FrozenAuxiliaryRate) {
    // a and v constant: psi_0' = A b'
    AccParams p;
    p.a1_0 = -30.0;
    const AccReduced sc{p, ReducedWeights{}};
    const AugmentedState s = acc_state(60.0, 20.0, {Vector{{-30.0}}});
    Vector w = Vector::Zero(sc.layout().dim());
    w(sc.layout().u(0)) = acc_resistance(20.0, p);
    const double rate = sc.tracked_rates(s, w)[0];
    EXPECT_NEAR(rate, std::exp(1.5) * (p.v_p - 20.0), 1e-10);
}

TEST(Unicycle, InitialGeometryAndHocbfLevel) {
    const auto sc = make_scenario("unicycle/hocbf");
    const AugmentedState s = sc->initial_state();
    EXPECT_EQ(sc->barrier(s), 8.0);
    const auto psi = sc->psi_levels(s);
    EXPECT_EQ(psi[0], 8.0);
    EXPECT_NEAR(psi[1], 68.0, 1e-12);
}

TEST(Unicycle, TargetReached) {
    UnicycleParams p;
    EXPECT_TRUE(target_reached(1.5, 0.0, p));
    EXPECT_FALSE(target_reached(1.39, 0.0, p));
    EXPECT_TRUE(target_reached(1.4, 0.0, p));
}

TEST(Unicycle, ControlBoundRows) {
    const auto sc = make_scenario("unicycle/avcbf2");
    int bounds = 0;
    for (const auto& r : sc->rows(sc->initial_state()))
        if (r.tag.kind == cbf::RowKind::ControlBound) ++bounds;
    EXPECT_EQ(bounds, 4);
}

TEST(Unicycle, InitialCheckRejectsNonPositiveAuxiliary) {
    EXPECT_THROW(make_scenario("unicycle/avcbf2", {{"a2_0", -0.1}})->check_initial(
                     make_scenario("unicycle/avcbf2", {{"a2_0", -0.1}})->initial_state()),
                 ConfigError);
}

TEST(Unicycle, MixedCoverage) {
    const auto sc = make_scenario("unicycle_mixed/avcbf_m");
    const auto& lay = sc->layout();
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> pos(-6.0, 6.0), ang(-3.0, 3.0), v(0.5, 5.0), phi(-1.0, 1.0),
        a(-1.0, 2.0);
    int checked = 0;
    while (checked < 1000) {
        AugmentedState s;
        s.x = Vector{{pos(rng), pos(rng), ang(rng), phi(rng), v(rng)}};
        s.chains = {Vector{{a(rng)}}};
        if (std::abs(sc->barrier(s)) < 1e-3) continue;
        const auto top = sc->rows(s)[0];
        EXPECT_GT(std::abs(top.coeffs(lay.u(0))), 1e-9);
        EXPECT_GT(std::abs(top.coeffs(lay.u(1))), 1e-9);
        ++checked;
    }
}

TEST(Derivatives, AnalyticRatesMatchFiniteDifferences) {
    unsigned seed = 100;
    for (const auto& id : scenario_ids()) {
        const auto sc = make_scenario(id);
        const auto points = checks::sample_trajectory_points(id, 10, 5, seed++);
        ASSERT_FALSE(points.empty()) << id;
        for (const auto& pt : points) {
            for (const auto& m : checks::derivative_errors(*sc, pt.state, pt.w))
                EXPECT_LE(m.rel_error, 1e-5) << id << " " << m.quantity << " analytic " << m.analytic << " fd "
                                             << m.numeric << " t=" << pt.state.t;
        }
    }
}

TEST(Degeneration, AccAvcbfMatchesHocbf) {
    const AccParams p;
    const AccAvcbf av{p};
    const AccHocbf ho{p};
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> z(-20.0, 200.0), v(0.5, 30.0), t(0.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        AugmentedState s = acc_state(z(rng), v(rng), {Vector{{0.0, 0.0}}});
        s.t = t(rng);
        EXPECT_LE(checks::degeneration_gap(av, ho, s), 1e-12);
    }
}

TEST(Degeneration, UnicycleAvcbfMatchesHocbf) {
    const auto ho = make_scenario("unicycle/hocbf");
    std::mt19937 rng(32);
    std::uniform_real_distribution<double> pos(-5.0, 5.0), ang(-3.0, 3.0), v(0.1, 5.0);
    for (const char* id : {"unicycle/avcbf1", "unicycle/avcbf2"}) {
        const auto av = make_scenario(id);
        for (int i = 0; i < 1000; ++i) {
            AugmentedState s = unicycle_state(pos(rng), pos(rng), ang(rng), v(rng), av->initial_state().chains);
            EXPECT_LE(checks::degeneration_gap(*av, *ho, s), 1e-12) << id;
        }
    }
}

TEST(Rows, LevelValuesFiniteAndWidthsMatch) {
    for (const auto& id : scenario_ids()) {
        const auto sc = make_scenario(id);
        for (const auto& r : sc->rows(sc->initial_state())) {
            EXPECT_EQ(r.coeffs.size(), sc->layout().dim()) << id;
            for (double v : r.level_values) EXPECT_TRUE(std::isfinite(v)) << id;
        }
    }
}
