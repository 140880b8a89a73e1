#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "avcbf/scenarios/registry.hpp"
#include "avcbf/sim/engine.hpp"

namespace avcbf::checks {

using dynamics::AugmentedState;
using scenarios::Scenario;
using Vector = Eigen::VectorXd;

// Moves the augmented state by h along its vector field under held w.
inline AugmentedState flow_shift(const Scenario& sc, const AugmentedState& s, const Vector& w, double h) {
    const cbf::DecisionLayout& lay = sc.layout();
    Vector u(lay.num_inputs());
    for (int j = 0; j < u.size(); ++j) u(j) = w(lay.u(j));
    AugmentedState out = s;
    out.x = s.x + h * sc.dynamics().field(s.x, u);
    for (size_t i = 0; i < s.chains.size(); ++i) {
        const Vector& pi = s.chains[i];
        Vector rate(pi.size());
        for (int j = 0; j + 1 < pi.size(); ++j) rate(j) = pi(j + 1);
        rate(pi.size() - 1) = w(lay.nu(static_cast<int>(i)));
        out.chains[i] = pi + h * rate;
    }
    return out;
}

struct DerivativeMismatch {
    std::string scenario;
    std::string quantity;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_error = 0.0;
};

// Relative error of each analytic rate against a central difference of
// step h along the field; the error is scaled by max(1, |analytic|).
inline std::vector<DerivativeMismatch> derivative_errors(const Scenario& sc, const AugmentedState& s, const Vector& w,
                                                         double h = 1e-6) {
    const auto values = sc.tracked_values(s);
    const auto rates = sc.tracked_rates(s, w);
    const auto plus = sc.tracked_values(flow_shift(sc, s, w, h));
    const auto minus = sc.tracked_values(flow_shift(sc, s, w, -h));
    std::vector<DerivativeMismatch> out;
    for (size_t i = 0; i < values.size(); ++i) {
        const double fd = (plus[i].value - minus[i].value) / (2.0 * h);
        const double rel = std::abs(fd - rates[i]) / std::max(1.0, std::abs(rates[i]));
        out.push_back({sc.id(), values[i].name, rates[i], fd, rel});
    }
    return out;
}

// States along short simulated runs from perturbed initial conditions,
// each paired with a random decision vector.
struct SamplePoint {
    AugmentedState state;
    Vector w;
};

inline std::vector<SamplePoint> sample_trajectory_points(const std::string& id, int runs, int steps_per_run,
                                                         unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<SamplePoint> out;
    for (int r = 0; r < runs; ++r) {
        scenarios::ParamOverrides o;
        if (id.rfind("acc/", 0) == 0) {
            o["z0"] = 100.0 + 20.0 * unit(rng);
            o["v0"] = 6.0 + 2.0 * unit(rng);
        } else {
            o["y0"] = 0.3 * unit(rng);
            o["theta0"] = 0.2 * unit(rng);
        }
        o["T"] = 2.0;
        const auto sc = scenarios::make_scenario(id, o);
        const sim::Trajectory tr = sim::simulate(*sc);
        const int n = std::min<int>(steps_per_run, static_cast<int>(tr.rows.size()));
        for (int k = 0; k < n; ++k) {
            Vector w(sc->layout().dim());
            for (int j = 0; j < w.size(); ++j) w(j) = unit(rng);
            const double u_scale = id.rfind("acc/", 0) == 0 ? 3000.0 : 3.0;
            for (int j = 0; j < sc->layout().num_inputs(); ++j) w(sc->layout().u(j)) *= u_scale;
            out.push_back({tr.rows[static_cast<size_t>(k)].state, w});
        }
    }
    return out;
}

// Largest relative difference between two rows over the columns of `lb`.
inline double row_difference(const cbf::ConstraintRow& a, const cbf::DecisionLayout& la, const cbf::ConstraintRow& b,
                             const cbf::DecisionLayout& lb) {
    double err = std::abs(a.rhs - b.rhs) / std::max(1.0, std::abs(b.rhs));
    for (int j = 0; j < lb.dim(); ++j) {
        const int ia = la.index_of(lb.names()[static_cast<size_t>(j)]);
        const double ca = ia < 0 ? 0.0 : a.coeffs(ia);
        err = std::max(err, std::abs(ca - b.coeffs(j)) / std::max(1.0, std::abs(b.coeffs(j))));
    }
    return err;
}

// AVCBF rows at a = 1, a' = 0 (and a_2 = 1) with auxiliary rows dropped,
// compared against the plain HOCBF rows; returns the largest relative gap.
inline double degeneration_gap(const Scenario& avcbf, const Scenario& hocbf, AugmentedState s) {
    AugmentedState h = s;
    h.chains.clear();
    for (auto& c : s.chains) {
        c.setZero();
        c(0) = 1.0;
    }
    std::vector<cbf::ConstraintRow> ra;
    for (auto& r : avcbf.rows(s))
        if (r.tag.kind != cbf::RowKind::AuxChain) ra.push_back(std::move(r));
    const auto rh = hocbf.rows(h);
    if (ra.size() != rh.size()) return INFINITY;
    double gap = 0.0;
    for (size_t i = 0; i < rh.size(); ++i)
        gap = std::max(gap, row_difference(ra[i], avcbf.layout(), rh[i], hocbf.layout()));
    const auto pa = avcbf.psi_levels(s), ph = hocbf.psi_levels(h);
    for (size_t i = 0; i < std::min(pa.size(), ph.size()); ++i)
        gap = std::max(gap, std::abs(pa[i] - ph[i]) / std::max(1.0, std::abs(ph[i])));
    return gap;
}

}  // namespace avcbf::checks
