#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "avcbf/scenarios/scenario.hpp"

namespace avcbf::scenarios {

enum class UnicycleVariant { Hocbf, Avcbf1, Avcbf2, AvcbfR, AvcbfM };

inline const char* to_string(UnicycleVariant v) {
    switch (v) {
        case UnicycleVariant::Hocbf: return "hocbf";
        case UnicycleVariant::Avcbf1: return "avcbf1";
        case UnicycleVariant::Avcbf2: return "avcbf2";
        case UnicycleVariant::AvcbfR: return "avcbf_r";
        case UnicycleVariant::AvcbfM: return "avcbf_m";
    }
    return "?";
}

struct UnicycleParams {
    double M = 1650.0;
    double x_o = 0.0, y_o = 0.0, r_o = 1.0;
    double x_d = 1.5, y_d = 0.0, r_d = 0.1;
    double u1_max = 5.0, u2_max = 8250.0;
    double k1 = 10.0, k2 = 10.0, l11 = 0.1, l12 = 0.1, l21 = 0.1;
    double W1 = 1000.0, W2 = 1000.0, Q = 1e5, c3 = 10.0, a1w = 0.0, a2w = 0.0, eps = 1e-10;
    double x0 = -3.0, y0 = 0.0, theta0 = 0.0, v0 = 2.0, phi0 = 0.01;
    double a1_0 = 0.1, pi12_0 = 0.1, a2_0 = 0.1;
    double dt = 0.1, T = 10.0;

    // Defaults of each variant's reference setting.
    static UnicycleParams defaults(UnicycleVariant v) {
        UnicycleParams p;
        if (v == UnicycleVariant::AvcbfR) {
            p.a1_0 = 50.0;
            p.l11 = 0.5;
            p.k1 = 1.0;
        } else if (v == UnicycleVariant::AvcbfM) {
            p.x0 = -4.0;
            p.x_d = 3.0;
            p.r_d = 0.2;
            p.dt = 0.01;
            p.T = 5.0;
            p.W1 = 1.0;
            p.Q = 1e3;
            p.k1 = 0.1;
            p.l11 = 0.1;
        }
        return p;
    }

    void validate() const {
        if (!(M > 0.0) || !(r_o > 0.0) || !(r_d > 0.0)) throw ConfigError("unicycle: M, r_o and r_d must be positive");
        if (!(u1_max >= 0.0) || !(u2_max >= 0.0)) throw ConfigError("unicycle: input bounds must be nonnegative");
        if (!(k1 > 0.0) || !(k2 > 0.0) || !(l11 > 0.0) || !(l12 > 0.0) || !(l21 > 0.0))
            throw ConfigError("unicycle: gains must be positive");
        if (!(c3 > 0.0) || !(eps > 0.0)) throw ConfigError("unicycle: c3 and eps must be positive");
        if (W1 < 0.0 || W2 < 0.0 || Q < 0.0) throw ConfigError("unicycle: weights must be nonnegative");
        const double dx = x0 - x_o, dy = y0 - y_o;
        if (!(dx * dx + dy * dy > r_o * r_o)) throw ConfigError("unicycle: initial position must lie outside the obstacle");
    }

    std::vector<ParamRef> fields() {
        return {{"M", &M},       {"x_o", &x_o},       {"y_o", &y_o},       {"r_o", &r_o},     {"x_d", &x_d},
                {"y_d", &y_d},   {"r_d", &r_d},       {"u1_max", &u1_max}, {"u2_max", &u2_max}, {"k1", &k1},
                {"k2", &k2},     {"l11", &l11},       {"l12", &l12},       {"l21", &l21},     {"W1", &W1},
                {"W2", &W2},     {"Q", &Q},           {"c3", &c3},         {"a1w", &a1w},     {"a2w", &a2w},
                {"eps", &eps},   {"x0", &x0},         {"y0", &y0},         {"theta0", &theta0}, {"v0", &v0},
                {"phi0", &phi0}, {"a1_0", &a1_0},     {"pi12_0", &pi12_0}, {"a2_0", &a2_0}};
    }
};

// Inside the closed target disc; the boundary tolerance absorbs coordinate rounding.
inline bool target_reached(double x, double y, const UnicycleParams& p) {
    const double dx = x - p.x_d, dy = y - p.y_d;
    return dx * dx + dy * dy <= p.r_d * p.r_d * (1.0 + 1e-12);
}

// x = (x, y, theta, v): theta' = u1, v' = u2 / M.
// Mixed degree x = (x, y, theta, phi, v): theta' = phi, phi' = u1, v' = u2 / M.
inline AffineDynamics unicycle_dynamics(const UnicycleParams& p, bool mixed) {
    AffineDynamics d;
    d.dim_u = 2;
    const double m = p.M;
    if (!mixed) {
        d.dim_x = 4;
        d.drift = [](const Vector& x) {
            Vector f(4);
            f << x(3) * std::cos(x(2)), x(3) * std::sin(x(2)), 0.0, 0.0;
            return f;
        };
        d.input_map = [m](const Vector&) {
            Matrix g = Matrix::Zero(4, 2);
            g(2, 0) = 1.0;
            g(3, 1) = 1.0 / m;
            return g;
        };
    } else {
        d.dim_x = 5;
        d.drift = [](const Vector& x) {
            Vector f(5);
            f << x(4) * std::cos(x(2)), x(4) * std::sin(x(2)), x(3), 0.0, 0.0;
            return f;
        };
        d.input_map = [m](const Vector&) {
            Matrix g = Matrix::Zero(5, 2);
            g(3, 0) = 1.0;
            g(4, 1) = 1.0 / m;
            return g;
        };
    }
    return d;
}

class Unicycle : public Scenario {
public:
    Unicycle(const UnicycleParams& p, UnicycleVariant variant)
        : p_(p), variant_(variant), mixed_(variant == UnicycleVariant::AvcbfM),
          dyn_(unicycle_dynamics(p, variant == UnicycleVariant::AvcbfM)), layout_(make_layout(variant)) {
        p_.validate();
        set_timing(p.dt, p.T);
    }

    std::string id() const override {
        return std::string(mixed_ ? "unicycle_mixed/" : "unicycle/") + to_string(variant_);
    }
    UnicycleVariant variant() const { return variant_; }
    const UnicycleParams& params() const { return p_; }
    const DecisionLayout& layout() const override { return layout_; }
    const AffineDynamics& dynamics() const override { return dyn_; }

    std::vector<std::string> state_names() const override {
        if (mixed_) return {"x", "y", "theta", "phi", "v"};
        return {"x", "y", "theta", "v"};
    }

    std::vector<std::string> chain_names() const override {
        switch (variant_) {
            case UnicycleVariant::Hocbf: return {};
            case UnicycleVariant::Avcbf1: return {"a1", "a1_dot"};
            case UnicycleVariant::Avcbf2: return {"a1", "a1_dot", "a2"};
            default: return {"a1"};
        }
    }

    AugmentedState initial_state() const override {
        AugmentedState s;
        if (mixed_)
            s.x = Vector{{p_.x0, p_.y0, p_.theta0, p_.phi0, p_.v0}};
        else
            s.x = Vector{{p_.x0, p_.y0, p_.theta0, p_.v0}};
        switch (variant_) {
            case UnicycleVariant::Hocbf: break;
            case UnicycleVariant::Avcbf1: s.chains = {Vector{{p_.a1_0, p_.pi12_0}}}; break;
            case UnicycleVariant::Avcbf2: s.chains = {Vector{{p_.a1_0, p_.pi12_0}}, Vector{{p_.a2_0}}}; break;
            default: s.chains = {Vector{{p_.a1_0}}}; break;
        }
        return s;
    }

    double barrier(const AugmentedState& s) const override { return geo(s).b; }
    bool finished(const AugmentedState& s) const override { return target_reached(s.x(0), s.x(1), p_); }

    std::vector<double> psi_levels(const AugmentedState& s) const override {
        const Geometry g = geo(s);
        switch (variant_) {
            case UnicycleVariant::Hocbf:
                return cbf::hocbf_chain_values({g.b, g.bdot}, cbf::gains_of({p_.k1, p_.k2}));
            case UnicycleVariant::Avcbf1: {
                const double a = s.chains[0](0), ad = s.chains[0](1);
                return {a * g.b, ad * g.b + a * g.bdot + p_.k1 * a * g.b};
            }
            case UnicycleVariant::Avcbf2: {
                const double a = s.chains[0](0), ad = s.chains[0](1), a2 = s.chains[1](0);
                return {a * g.b, a2 * (ad * g.b + a * g.bdot + p_.k1 * a * g.b)};
            }
            default: return {sum_aux(s) * g.b};
        }
    }

    std::vector<ConstraintRow> rows(const AugmentedState& s) const override {
        const Geometry g = geo(s);
        std::vector<ConstraintRow> out;
        out.push_back(barrier_row(s, g));
        switch (variant_) {
            case UnicycleVariant::Hocbf: break;
            case UnicycleVariant::Avcbf1: out.push_back(*cbf::build_aux_chain_row(chain1(s), layout_)); break;
            case UnicycleVariant::Avcbf2:
                out.push_back(*cbf::build_aux_chain_row(chain1(s), layout_));
                out.push_back(*cbf::build_aux_chain_row(chain2(s), layout_));
                break;
            default: out.push_back(*cbf::build_aux_chain_row(chain1(s), layout_, sum_jet(s))); break;
        }
        out.push_back(clf_row(s, g));
        const Vector hi{{p_.u1_max, p_.u2_max}};
        for (auto& r : cbf::build_control_bound_rows(-hi, hi, layout_)) out.push_back(std::move(r));
        return out;
    }

    CostSpec cost(const AugmentedState&, const std::vector<double>& a_w) const override {
        CostSpec c;
        c.add(layout_.u(0), 1.0).add(layout_.u(1), 1.0);
        if (variant_ != UnicycleVariant::Hocbf) c.add(layout_.nu(0), p_.W1, a_w.at(0));
        if (variant_ == UnicycleVariant::Avcbf2) c.add(layout_.nu(1), p_.W2, a_w.at(1));
        c.add(layout_.slack(0), p_.Q);
        return c;
    }

    std::vector<double> default_a_w() const override {
        switch (variant_) {
            case UnicycleVariant::Hocbf: return {};
            case UnicycleVariant::Avcbf2: return {p_.a1w, p_.a2w};
            default: return {p_.a1w};
        }
    }

    std::vector<TrackedQuantity> tracked_values(const AugmentedState& s) const override {
        const std::vector<double> psi = psi_levels(s);
        std::vector<TrackedQuantity> out;
        for (size_t i = 0; i < psi.size(); ++i) out.push_back({"psi" + std::to_string(i), psi[i]});
        if (variant_ == UnicycleVariant::Avcbf1 || variant_ == UnicycleVariant::Avcbf2) {
            const std::vector<double> phi = cbf::aux_chain_levels(chain1(s));
            out.push_back({"phi10", phi[0]});
            out.push_back({"phi11", phi[1]});
        }
        if (variant_ == UnicycleVariant::Avcbf2) out.push_back({"phi20", s.chains[1](0)});
        if (variant_ == UnicycleVariant::AvcbfR || variant_ == UnicycleVariant::AvcbfM)
            out.push_back({"phi10", sum_aux(s)});
        out.push_back({"V", clf_terms(s).v});
        return out;
    }

    std::vector<double> tracked_rates(const AugmentedState& s, const Vector& w) const override {
        const std::vector<ConstraintRow> r = rows(s);
        const std::vector<double> psi = psi_levels(s);
        const double top = r[0].slack(w);
        std::vector<double> out;
        switch (variant_) {
            case UnicycleVariant::Hocbf:
            case UnicycleVariant::Avcbf1:
                out = {psi[1] - p_.k1 * psi[0], top - p_.k2 * psi[1]};
                break;
            case UnicycleVariant::Avcbf2:
                out = {psi[1] / s.chains[1](0) - p_.k1 * psi[0], top - p_.k2 * psi[1]};
                break;
            default: out = {top - p_.k1 * psi[0]}; break;
        }
        if (variant_ == UnicycleVariant::Avcbf1 || variant_ == UnicycleVariant::Avcbf2) {
            const std::vector<double> phi = cbf::aux_chain_levels(chain1(s));
            const double phi2 = r[1].slack(w) + p_.eps;
            out.push_back(phi[1] - p_.l11 * phi[0]);
            out.push_back(phi2 - p_.l12 * phi[1]);
        }
        if (variant_ == UnicycleVariant::Avcbf2) out.push_back(r[2].slack(w) + p_.eps - p_.l21 * s.chains[1](0));
        if (variant_ == UnicycleVariant::AvcbfR || variant_ == UnicycleVariant::AvcbfM)
            out.push_back(r[1].slack(w) + p_.eps - p_.l11 * sum_aux(s));
        const ClfTerms c = clf_terms(s);
        out.push_back(c.lfv + c.lgv1 * w(layout_.u(0)));
        return out;
    }

    std::vector<std::pair<std::string, double>> extra_columns(const AugmentedState& s) const override {
        const double dx = s.x(0) - p_.x_d, dy = s.x(1) - p_.y_d;
        return {{"target_distance", std::sqrt(dx * dx + dy * dy)}};
    }

protected:
    void check_initial_aux(const AugmentedState& s) const override {
        if (variant_ == UnicycleVariant::Avcbf1 || variant_ == UnicycleVariant::Avcbf2) {
            const std::vector<double> phi = cbf::aux_chain_levels(chain1(s));
            require_positive(id(), "phi_1,0", phi[0]);
            require_positive(id(), "phi_1,1", phi[1]);
        }
        if (variant_ == UnicycleVariant::Avcbf2) require_positive(id(), "phi_2,0", s.chains[1](0));
        if (variant_ == UnicycleVariant::AvcbfR || variant_ == UnicycleVariant::AvcbfM)
            require_positive(id(), "phi_1,0", sum_aux(s));
    }

private:
    struct Geometry {
        double dx, dy, c, s, v, b, bdot;
        double bddot_drift, bddot_u1, bddot_u2;  // second-order unicycle only
    };

    struct ClfTerms {
        double v, lfv, lgv1;
    };

    static DecisionLayout make_layout(UnicycleVariant v) {
        switch (v) {
            case UnicycleVariant::Hocbf: return DecisionLayout({"u1", "u2"}, {}, {"delta"});
            case UnicycleVariant::Avcbf2: return DecisionLayout({"u1", "u2"}, {"nu1", "nu2"}, {"delta"});
            default: return DecisionLayout({"u1", "u2"}, {"nu1"}, {"delta"});
        }
    }

    double speed(const AugmentedState& s) const { return mixed_ ? s.x(4) : s.x(3); }

    Geometry geo(const AugmentedState& s) const {
        Geometry g;
        g.dx = s.x(0) - p_.x_o;
        g.dy = s.x(1) - p_.y_o;
        g.c = std::cos(s.x(2));
        g.s = std::sin(s.x(2));
        g.v = speed(s);
        g.b = g.dx * g.dx + g.dy * g.dy - p_.r_o * p_.r_o;
        const double radial = g.dx * g.c + g.dy * g.s;
        g.bdot = 2.0 * g.v * radial;
        g.bddot_drift = 2.0 * g.v * g.v;
        g.bddot_u1 = 2.0 * g.v * (g.dy * g.c - g.dx * g.s);
        g.bddot_u2 = 2.0 * radial / p_.M;
        return g;
    }

    // A_1 = a_1 + v + theta (reduced) or a_1 + v + phi (mixed).
    double sum_aux(const AugmentedState& s) const { return s.chains[0](0) + speed(s) + s.x(mixed_ ? 3 : 2); }

    cbf::AuxJet sum_jet(const AugmentedState& s) const {
        cbf::AuxJet j;
        j.value = sum_aux(s);
        j.drift_rate = 0.0;
        j.input_coeffs = Vector{{1.0, 1.0 / p_.M}};
        return j;
    }

    cbf::AuxiliaryChain chain1(const AugmentedState& s) const {
        cbf::AuxiliaryChain c;
        c.index = 1;
        c.states = s.chains.at(0);
        c.margin = p_.eps;
        if (variant_ == UnicycleVariant::AvcbfR || variant_ == UnicycleVariant::AvcbfM) {
            c.kind = cbf::AuxKind::SumWithStates;
            c.gains = cbf::gains_of({p_.l11});
        } else {
            c.gains = cbf::gains_of({p_.l11, p_.l12});
        }
        return c;
    }

    cbf::AuxiliaryChain chain2(const AugmentedState& s) const {
        cbf::AuxiliaryChain c;
        c.index = 2;
        c.states = s.chains.at(1);
        c.gains = cbf::gains_of({p_.l21});
        c.margin = p_.eps;
        return c;
    }

    ClfTerms clf_terms(const AugmentedState& s) const {
        const double ex = p_.x_d - s.x(0), ey = p_.y_d - s.x(1);
        const double theta_d = std::atan2(ey, ex);
        const double v = speed(s);
        const double r2 = ex * ex + ey * ey;
        const double theta_d_rate = r2 > 0.0 ? v * (ey * std::cos(s.x(2)) - ex * std::sin(s.x(2))) / r2 : 0.0;
        ClfTerms t;
        if (!mixed_) {
            const double e = s.x(2) - theta_d;
            t.v = e * e;
            t.lfv = -2.0 * e * theta_d_rate;
            t.lgv1 = 2.0 * e;
        } else {
            const double e = 0.1 * (s.x(2) - theta_d) + s.x(3);
            t.v = e * e;
            t.lfv = 2.0 * e * 0.1 * (s.x(3) - theta_d_rate);
            t.lgv1 = 2.0 * e;
        }
        return t;
    }

    ConstraintRow clf_row(const AugmentedState& s, const Geometry&) const {
        const ClfTerms t = clf_terms(s);
        return cbf::build_clf_row(t.v, t.lfv, Vector{{t.lgv1, 0.0}}, p_.c3, layout_, 0);
    }

    ConstraintRow barrier_row(const AugmentedState& s, const Geometry& g) const {
        ConstraintRow row;
        row.coeffs = layout_.zeros();
        row.tag = {cbf::RowKind::HighestAvcbf, 0, false};
        row.level_values = psi_levels(s);
        const int u1 = layout_.u(0), u2 = layout_.u(1);
        switch (variant_) {
            case UnicycleVariant::Hocbf: {
                const std::vector<double> e = cbf::linear_chain_coefficients(cbf::gains_of({p_.k1, p_.k2}), 2);
                row.coeffs(u1) = g.bddot_u1;
                row.coeffs(u2) = g.bddot_u2;
                row.rhs = -(g.bddot_drift + e[1] * g.bdot + e[2] * g.b);
                break;
            }
            case UnicycleVariant::Avcbf1: {
                const double a = s.chains[0](0), ad = s.chains[0](1);
                const double psi1 = row.level_values[1];
                row.coeffs(u1) = a * g.bddot_u1;
                row.coeffs(u2) = a * g.bddot_u2;
                row.coeffs(layout_.nu(0)) = g.b;
                row.rhs = -(2.0 * ad * g.bdot + a * g.bddot_drift + p_.k1 * (ad * g.b + a * g.bdot) + p_.k2 * psi1);
                break;
            }
            case UnicycleVariant::Avcbf2: {
                const double a = s.chains[0](0), ad = s.chains[0](1), a2 = s.chains[1](0);
                const double inner = ad * g.b + a * g.bdot + p_.k1 * a * g.b;
                row.coeffs(u1) = a2 * a * g.bddot_u1;
                row.coeffs(u2) = a2 * a * g.bddot_u2;
                row.coeffs(layout_.nu(0)) = a2 * g.b;
                row.coeffs(layout_.nu(1)) = inner;
                row.rhs = -(a2 * (2.0 * ad * g.bdot + a * g.bddot_drift + p_.k1 * (ad * g.b + a * g.bdot)) +
                            p_.k2 * a2 * inner);
                break;
            }
            default: {
                // psi_1 = A' b + A b' + k1 A b with A' = nu1 + u1 + u2 / M
                const double big_a = sum_aux(s);
                row.coeffs(u1) = g.b;
                row.coeffs(u2) = g.b / p_.M;
                row.coeffs(layout_.nu(0)) = g.b;
                row.rhs = -(big_a * g.bdot + p_.k1 * big_a * g.b);
                break;
            }
        }
        return row;
    }

    UnicycleParams p_;
    UnicycleVariant variant_;
    bool mixed_;
    AffineDynamics dyn_;
    DecisionLayout layout_;
};

}  // namespace avcbf::scenarios
