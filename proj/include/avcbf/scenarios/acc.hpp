#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "avcbf/scenarios/scenario.hpp"

namespace avcbf::scenarios {

// Adaptive cruise control: x = (z, v), z' = v_p - v, v' = (u - F_r(v)) / M.
struct AccParams {
    double v_p = 13.89, v_d = 24.0, M = 1650.0, g = 9.81;
    double z0 = 100.0, l_p = 10.0, v0 = 6.0;
    double f0 = 0.1, f1 = 5.0, f2 = 0.25;
    double c_a = 0.4, c_d_start = 0.4, c_d_end = 0.4;
    double c3 = 2.0, Q = 1000.0, W1 = 1000.0, a1w = 1.0;
    double k1 = 0.1, k2 = 0.1, l1 = 0.1, l2 = 0.1, eps = 1e-10;
    double a1_0 = 1.0, pi12_0 = 1.0;
    double dt = 0.1, T = 50.0;

    // Linear in t between c_d_start at t = 0 and c_d_end at t = T.
    double c_d(double t) const {
        if (T <= 0.0) return c_d_start;
        const double s = std::clamp(t / T, 0.0, 1.0);
        return c_d_start + (c_d_end - c_d_start) * s;
    }

    void validate() const {
        if (!(M > 0.0) || !(l_p > 0.0) || !(v_p > 0.0) || !(c_a > 0.0) || !(g > 0.0))
            throw ConfigError("acc: M, l_p, v_p, c_a and g must be positive");
        if (!(c_d_start > 0.0) || !(c_d_end > 0.0)) throw ConfigError("acc: c_d must stay positive");
        if (!(c3 > 0.0)) throw ConfigError("acc: c3 must be positive");
        if (!(k1 > 0.0) || !(k2 > 0.0) || !(l1 > 0.0) || !(l2 > 0.0)) throw ConfigError("acc: gains must be positive");
        if (!(eps > 0.0)) throw ConfigError("acc: eps must be positive");
        if (Q < 0.0 || W1 < 0.0) throw ConfigError("acc: weights must be nonnegative");
        if (!(v0 > 0.0)) throw ConfigError("acc: v0 must be positive");
    }

    std::vector<ParamRef> fields() {
        return {{"v_p", &v_p}, {"v_d", &v_d}, {"M", &M}, {"g", &g}, {"z0", &z0}, {"l_p", &l_p}, {"v0", &v0},
                {"f0", &f0}, {"f1", &f1}, {"f2", &f2}, {"c_a", &c_a}, {"c_d_start", &c_d_start},
                {"c_d_end", &c_d_end}, {"c3", &c3}, {"Q", &Q}, {"W1", &W1}, {"a1w", &a1w}, {"k1", &k1},
                {"k2", &k2}, {"l1", &l1}, {"l2", &l2}, {"eps", &eps}, {"a1_0", &a1_0}, {"pi12_0", &pi12_0}};
    }
};

// Extra parameters of the penalty-parameter baseline.
struct PacbfParams {
    double p1_0 = 0.103, p2_0 = 1.0, p1_star = 0.103, p1_max = 3.0, rho = 10.0;
    double W1 = 2e12, W2 = 2e12, Q = 1.0, Q_p = 1.0, c3 = 10.0;

    void validate() const {
        if (!(p1_0 >= 0.0 && p1_0 <= p1_max)) throw ConfigError("pacbf: p1_0 must lie in [0, p1_max]");
        if (!(rho > 0.0) || !(c3 > 0.0)) throw ConfigError("pacbf: rho and c3 must be positive");
    }

    std::vector<ParamRef> fields() {
        return {{"p1_0", &p1_0}, {"p2_0", &p2_0}, {"p1_star", &p1_star}, {"p1_max", &p1_max}, {"rho", &rho},
                {"pacbf_W1", &W1}, {"pacbf_W2", &W2}, {"pacbf_Q", &Q}, {"Q_p", &Q_p}, {"pacbf_c3", &c3}};
    }
};

// Speed-dependent weights of the reduced-degree variant.
struct ReducedWeights {
    double W1_fast = 1e5, Q_fast = 2e4, W1_slow = 1.0 / 30.0, Q_slow = 1.0 / 150.0;

    std::vector<ParamRef> fields() {
        return {{"W1_fast", &W1_fast}, {"Q_fast", &Q_fast}, {"W1_slow", &W1_slow}, {"Q_slow", &Q_slow}};
    }
};

inline double acc_resistance(double v, const AccParams& p) {
    if (!(v > 0.0)) throw NumericError("acc_resistance: speed must stay positive (v = " + std::to_string(v) + ")");
    return p.f0 + p.f1 * v + p.f2 * v * v;
}

inline AffineDynamics acc_dynamics(const AccParams& p) {
    AffineDynamics d;
    d.dim_x = 2;
    d.dim_u = 1;
    d.drift = [p](const Vector& x) {
        Vector f(2);
        f << p.v_p - x(1), -acc_resistance(x(1), p) / p.M;
        return f;
    };
    d.input_map = [p](const Vector&) {
        Matrix g(2, 1);
        g << 0.0, 1.0 / p.M;
        return g;
    };
    return d;
}

class AccBase : public Scenario {
public:
    explicit AccBase(const AccParams& p) : p_(p), dyn_(acc_dynamics(p)) {
        p_.validate();
        set_timing(p.dt, p.T);
    }

    const AccParams& params() const { return p_; }
    const AffineDynamics& dynamics() const override { return dyn_; }
    std::vector<std::string> state_names() const override { return {"z", "v"}; }
    double barrier(const AugmentedState& s) const override { return s.x(0) - p_.l_p; }

protected:
    struct Kinematics {
        double z, v, b, bdot, fr;
    };

    Kinematics kin(const AugmentedState& s) const {
        Kinematics k;
        k.z = s.x(0);
        k.v = s.x(1);
        k.b = k.z - p_.l_p;
        k.bdot = p_.v_p - k.v;
        k.fr = acc_resistance(k.v, p_);
        return k;
    }

    // Speed-tracking CLF V = (v - v_d)^2 with LfV, LgV.
    ConstraintRow speed_clf(const Kinematics& k, double c3) const {
        const double e = k.v - p_.v_d;
        Vector lgv(1);
        lgv << 2.0 * e / p_.M;
        return cbf::build_clf_row(e * e, 2.0 * e * (-k.fr / p_.M), lgv, c3, layout(), 0);
    }

    double speed_clf_rate(const Kinematics& k, double u) const {
        const double e = k.v - p_.v_d;
        return 2.0 * e * (u - k.fr) / p_.M;
    }

    std::vector<ConstraintRow> bounds(double t) const {
        Vector lo(1), hi(1);
        lo << -p_.c_d(t) * p_.M * p_.g;
        hi << p_.c_a * p_.M * p_.g;
        return cbf::build_control_bound_rows(lo, hi, layout());
    }

    void add_accel_cost(CostSpec& c, double fr) const { c.add(layout().u(0), 1.0 / (p_.M * p_.M), fr); }

    AccParams p_;
    AffineDynamics dyn_;
};

// One auxiliary function A_1 = a_1 with chain (a_1, a_1'), m_a = 2.
class AccAvcbf : public AccBase {
public:
    explicit AccAvcbf(const AccParams& p) : AccBase(p), layout_({"u"}, {"nu1"}, {"delta"}) {}

    std::string id() const override { return "acc/avcbf"; }
    const DecisionLayout& layout() const override { return layout_; }
    std::vector<std::string> chain_names() const override { return {"a1", "a1_dot"}; }

    AugmentedState initial_state() const override {
        AugmentedState s;
        s.x = Vector{{p_.z0, p_.v0}};
        s.chains = {Vector{{p_.a1_0, p_.pi12_0}}};
        return s;
    }

    cbf::AuxiliaryChain chain(const AugmentedState& s) const {
        cbf::AuxiliaryChain c;
        c.index = 1;
        c.states = s.chains.at(0);
        c.gains = cbf::gains_of({p_.l1, p_.l2});
        c.margin = p_.eps;
        return c;
    }

    std::vector<double> psi_levels(const AugmentedState& s) const override {
        const Kinematics k = kin(s);
        const double a = s.chains[0](0), ad = s.chains[0](1);
        return {a * k.b, ad * k.b + a * k.bdot + p_.k1 * a * k.b};
    }

    std::vector<ConstraintRow> rows(const AugmentedState& s) const override {
        const Kinematics k = kin(s);
        const double a = s.chains[0](0), ad = s.chains[0](1);
        const std::vector<double> psi = psi_levels(s);
        ConstraintRow top;
        top.coeffs = layout_.zeros();
        top.coeffs(layout_.u(0)) = -a / p_.M;
        top.coeffs(layout_.nu(0)) = k.b;
        top.rhs = -(2.0 * ad * k.bdot + a * k.fr / p_.M + p_.k1 * (ad * k.b + a * k.bdot) + p_.k2 * psi[1]);
        top.tag = {cbf::RowKind::HighestAvcbf, 0, false};
        top.level_values = psi;
        std::vector<ConstraintRow> out{top, *cbf::build_aux_chain_row(chain(s), layout_), speed_clf(k, p_.c3)};
        for (auto& r : bounds(s.t)) out.push_back(std::move(r));
        return out;
    }

    CostSpec cost(const AugmentedState& s, const std::vector<double>& a_w) const override {
        CostSpec c;
        add_accel_cost(c, kin(s).fr);
        c.add(layout_.nu(0), p_.W1, a_w.at(0));
        c.add(layout_.slack(0), p_.Q);
        return c;
    }
    std::vector<double> default_a_w() const override { return {p_.a1w}; }

    std::vector<TrackedQuantity> tracked_values(const AugmentedState& s) const override {
        const std::vector<double> psi = psi_levels(s);
        const std::vector<double> phi = cbf::aux_chain_levels(chain(s));
        const double e = s.x(1) - p_.v_d;
        return {{"psi0", psi[0]}, {"psi1", psi[1]}, {"phi10", phi[0]}, {"phi11", phi[1]}, {"V", e * e}};
    }

    std::vector<double> tracked_rates(const AugmentedState& s, const Vector& w) const override {
        const std::vector<ConstraintRow> r = rows(s);
        const std::vector<double> psi = psi_levels(s);
        const std::vector<double> phi = cbf::aux_chain_levels(chain(s));
        const double psi2 = r[0].slack(w);
        const double phi2 = r[1].slack(w) + p_.eps;
        return {psi[1] - p_.k1 * psi[0], psi2 - p_.k2 * psi[1], phi[1] - p_.l1 * phi[0], phi2 - p_.l2 * phi[1],
                speed_clf_rate(kin(s), w(layout_.u(0)))};
    }

    std::vector<std::pair<std::string, double>> extra_columns(const AugmentedState& s) const override {
        return {{"adot_over_a", s.chains[0](1) / s.chains[0](0)}};
    }

protected:
    void check_initial_aux(const AugmentedState& s) const override {
        const std::vector<double> phi = cbf::aux_chain_levels(chain(s));
        require_positive(id(), "phi_1,0", phi[0]);
        require_positive(id(), "phi_1,1", phi[1]);
    }

private:
    DecisionLayout layout_;
};

// Plain second-order HOCBF with b = z - l_p.
class AccHocbf : public AccBase {
public:
    explicit AccHocbf(const AccParams& p) : AccBase(p), layout_({"u"}, {}, {"delta"}) {}

    std::string id() const override { return "acc/hocbf"; }
    const DecisionLayout& layout() const override { return layout_; }
    std::vector<std::string> chain_names() const override { return {}; }

    AugmentedState initial_state() const override {
        AugmentedState s;
        s.x = Vector{{p_.z0, p_.v0}};
        return s;
    }

    std::vector<double> psi_levels(const AugmentedState& s) const override {
        const Kinematics k = kin(s);
        return cbf::hocbf_chain_values({k.b, k.bdot}, cbf::gains_of({p_.k1, p_.k2}));
    }

    std::vector<ConstraintRow> rows(const AugmentedState& s) const override {
        const Kinematics k = kin(s);
        const std::vector<double> e = cbf::linear_chain_coefficients(cbf::gains_of({p_.k1, p_.k2}), 2);
        // psi_2 = b'' + e1 b' + e2 b with b'' = (F_r - u) / M
        ConstraintRow top;
        top.coeffs = layout_.zeros();
        top.coeffs(layout_.u(0)) = -1.0 / p_.M;
        top.rhs = -(k.fr / p_.M + e[1] * k.bdot + e[2] * k.b);
        top.tag = {cbf::RowKind::HighestAvcbf, 0, false};
        top.level_values = psi_levels(s);
        std::vector<ConstraintRow> out{top, speed_clf(k, p_.c3)};
        for (auto& r : bounds(s.t)) out.push_back(std::move(r));
        return out;
    }

    CostSpec cost(const AugmentedState& s, const std::vector<double>&) const override {
        CostSpec c;
        add_accel_cost(c, kin(s).fr);
        c.add(layout_.slack(0), p_.Q);
        return c;
    }
    std::vector<double> default_a_w() const override { return {}; }

    std::vector<TrackedQuantity> tracked_values(const AugmentedState& s) const override {
        const std::vector<double> psi = psi_levels(s);
        const double e = s.x(1) - p_.v_d;
        return {{"psi0", psi[0]}, {"psi1", psi[1]}, {"V", e * e}};
    }

    std::vector<double> tracked_rates(const AugmentedState& s, const Vector& w) const override {
        const std::vector<double> psi = psi_levels(s);
        const double psi2 = rows(s)[0].slack(w);
        return {psi[1] - p_.k1 * psi[0], psi2 - p_.k2 * psi[1], speed_clf_rate(kin(s), w(layout_.u(0)))};
    }

private:
    DecisionLayout layout_;
};

// Penalty-parameter baseline: psi_1 = b' + p_1 b^2, psi_2 = psi_1' + p_2 psi_1,
// p_1' = nu_1, p_2 = nu_2.
class AccPacbf : public AccBase {
public:
    AccPacbf(const AccParams& p, const PacbfParams& q)
        : AccBase(p), q_(q), layout_({"u"}, {"nu1", "nu2"}, {"delta", "delta_p"}) {
        q_.validate();
    }

    std::string id() const override { return "acc/pacbf"; }
    const DecisionLayout& layout() const override { return layout_; }
    std::vector<std::string> chain_names() const override { return {"p1"}; }
    const PacbfParams& pacbf_params() const { return q_; }

    AugmentedState initial_state() const override {
        AugmentedState s;
        s.x = Vector{{p_.z0, p_.v0}};
        s.chains = {Vector{{q_.p1_0}}};
        return s;
    }

    std::vector<double> psi_levels(const AugmentedState& s) const override {
        const Kinematics k = kin(s);
        const double p1 = s.chains[0](0);
        return {k.b, k.bdot + p1 * k.b * k.b};
    }

    std::vector<ConstraintRow> rows(const AugmentedState& s) const override {
        const Kinematics k = kin(s);
        const double p1 = s.chains[0](0);
        const std::vector<double> psi = psi_levels(s);
        const int u = layout_.u(0), nu1 = layout_.nu(0), nu2 = layout_.nu(1);

        ConstraintRow top;
        top.coeffs = layout_.zeros();
        top.coeffs(u) = -1.0 / p_.M;
        top.coeffs(nu1) = k.b * k.b;
        top.coeffs(nu2) = psi[1];
        top.rhs = -(k.fr / p_.M + 2.0 * p1 * k.b * k.bdot);
        top.tag = {cbf::RowKind::HighestAvcbf, 0, false};
        top.level_values = psi;

        ConstraintRow upper;  // (p1_max - p1)' + (p1_max - p1) >= 0
        upper.coeffs = layout_.zeros();
        upper.coeffs(nu1) = -1.0;
        upper.rhs = p1 - q_.p1_max;
        upper.tag = {cbf::RowKind::PacbfAux, 1, true};
        upper.level_values = {q_.p1_max - p1};

        ConstraintRow lower;  // p1' + p1 >= 0
        lower.coeffs = layout_.zeros();
        lower.coeffs(nu1) = 1.0;
        lower.rhs = -p1;
        lower.tag = {cbf::RowKind::PacbfAux, 1, false};
        lower.level_values = {p1};

        const double dp = p1 - q_.p1_star;
        ConstraintRow pclf;  // 2 (p1 - p1*) nu1 + rho (p1 - p1*)^2 <= delta_p
        pclf.coeffs = layout_.zeros();
        pclf.coeffs(nu1) = -2.0 * dp;
        pclf.coeffs(layout_.slack(1)) = 1.0;
        pclf.rhs = q_.rho * dp * dp;
        pclf.tag = {cbf::RowKind::PacbfClf, 1, false};
        pclf.level_values = {dp * dp};

        std::vector<ConstraintRow> out{top, upper, lower, pclf, speed_clf(k, q_.c3)};
        for (auto& r : bounds(s.t)) out.push_back(std::move(r));
        return out;
    }

    CostSpec cost(const AugmentedState& s, const std::vector<double>&) const override {
        CostSpec c;
        add_accel_cost(c, kin(s).fr);
        c.add_linear(layout_.nu(0), q_.W1);
        c.add(layout_.nu(1), q_.W2, 1.0);
        c.add(layout_.slack(0), q_.Q);
        c.add(layout_.slack(1), q_.Q_p);
        return c;
    }
    std::vector<double> default_a_w() const override { return {}; }

    std::vector<TrackedQuantity> tracked_values(const AugmentedState& s) const override {
        const std::vector<double> psi = psi_levels(s);
        const double e = s.x(1) - p_.v_d;
        return {{"psi0", psi[0]}, {"psi1", psi[1]}, {"p1", s.chains[0](0)}, {"V", e * e}};
    }

    std::vector<double> tracked_rates(const AugmentedState& s, const Vector& w) const override {
        const std::vector<double> psi = psi_levels(s);
        const double p1 = s.chains[0](0);
        const double psi2 = rows(s)[0].slack(w);
        const double nu1 = w(layout_.nu(0)), nu2 = w(layout_.nu(1));
        return {psi[1] - p1 * psi[0] * psi[0], psi2 - nu2 * psi[1], nu1, speed_clf_rate(kin(s), w(layout_.u(0)))};
    }

protected:
    void check_initial_aux(const AugmentedState& s) const override {
        const double p1 = s.chains[0](0);
        if (!(p1 >= 0.0 && p1 <= q_.p1_max)) throw ConfigError(id() + ": p1(0) outside [0, p1_max]");
    }

private:
    PacbfParams q_;
    DecisionLayout layout_;
};

// Relative degree reduced to one: A_1 = exp(-a_1 / v), a_1' = nu_1.
class AccReduced : public AccBase {
public:
    AccReduced(const AccParams& p, const ReducedWeights& w)
        : AccBase(p), w_(w), layout_({"u"}, {"nu1"}, {"delta"}) {}

    std::string id() const override { return "acc/reduced"; }
    const DecisionLayout& layout() const override { return layout_; }
    std::vector<std::string> chain_names() const override { return {"a1"}; }

    AugmentedState initial_state() const override {
        AugmentedState s;
        s.x = Vector{{p_.z0, p_.v0}};
        s.chains = {Vector{{p_.a1_0}}};
        return s;
    }

    double aux_value(const AugmentedState& s) const { return std::exp(-s.chains[0](0) / s.x(1)); }

    std::vector<double> psi_levels(const AugmentedState& s) const override {
        return {aux_value(s) * barrier(s)};
    }

    std::vector<ConstraintRow> rows(const AugmentedState& s) const override {
        const Kinematics k = kin(s);
        const double a = s.chains[0](0);
        const double big_a = aux_value(s);
        const double ab = big_a * k.b;
        // A' = A (-nu / v + a v' / v^2), v' = (u - F_r) / M
        ConstraintRow top;
        top.coeffs = layout_.zeros();
        top.coeffs(layout_.nu(0)) = -ab / k.v;
        top.coeffs(layout_.u(0)) = ab * a / (p_.M * k.v * k.v);
        top.rhs = -(big_a * k.bdot + p_.k1 * ab - ab * a * k.fr / (p_.M * k.v * k.v));
        top.tag = {cbf::RowKind::HighestAvcbf, 0, false};
        top.level_values = {ab};
        std::vector<ConstraintRow> out{top, speed_clf(k, p_.c3)};
        for (auto& r : bounds(s.t)) out.push_back(std::move(r));
        return out;
    }

    CostSpec cost(const AugmentedState& s, const std::vector<double>& a_w) const override {
        const Kinematics k = kin(s);
        const bool fast = k.v > p_.v_p;
        CostSpec c;
        add_accel_cost(c, k.fr);
        c.add(layout_.nu(0), fast ? w_.W1_fast : w_.W1_slow, a_w.at(0));
        c.add(layout_.slack(0), fast ? w_.Q_fast : w_.Q_slow);
        return c;
    }
    std::vector<double> default_a_w() const override { return {p_.a1w}; }

    std::vector<TrackedQuantity> tracked_values(const AugmentedState& s) const override {
        const double e = s.x(1) - p_.v_d;
        return {{"psi0", psi_levels(s)[0]}, {"A1", aux_value(s)}, {"V", e * e}};
    }

    std::vector<double> tracked_rates(const AugmentedState& s, const Vector& w) const override {
        const Kinematics k = kin(s);
        const double psi0 = psi_levels(s)[0];
        const double psi1 = rows(s)[0].slack(w);
        const double vdot = (w(layout_.u(0)) - k.fr) / p_.M;
        const double arate = aux_value(s) * (-w(layout_.nu(0)) / k.v + s.chains[0](0) * vdot / (k.v * k.v));
        return {psi1 - p_.k1 * psi0, arate, speed_clf_rate(k, w(layout_.u(0)))};
    }

    std::vector<std::pair<std::string, double>> extra_columns(const AugmentedState& s) const override {
        return {{"A1", aux_value(s)}};
    }

private:
    ReducedWeights w_;
    DecisionLayout layout_;
};

}  // namespace avcbf::scenarios
