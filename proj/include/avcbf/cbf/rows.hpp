#pragma once

#include <optional>
#include <vector>

#include "avcbf/cbf/types.hpp"

namespace avcbf::cbf {

// Coefficients e_0..e_L of prod_j (s + k_j), e_0 = 1.
inline std::vector<double> linear_chain_coefficients(const std::vector<ClassKappaLinear>& gains, size_t count) {
    std::vector<double> e{1.0};
    for (size_t j = 0; j < count; ++j) {
        std::vector<double> next(e.size() + 1, 0.0);
        for (size_t r = 0; r < e.size(); ++r) {
            next[r] += e[r];
            next[r + 1] += gains[j].k * e[r];
        }
        e = std::move(next);
    }
    return e;
}

// psi_0..psi_{m-1} for psi_i = psi_{i-1}' + k_i psi_{i-1}, given b..b^(m-1).
// Accepts either m-1 gains or the full set of m (the last one only enters
// the highest-order row).
inline std::vector<double> hocbf_chain_values(const std::vector<double>& b_and_derivatives,
                                              const std::vector<ClassKappaLinear>& gains) {
    const size_t m = b_and_derivatives.size();
    if (m == 0) throw std::invalid_argument("hocbf_chain_values: empty derivative list");
    if (gains.size() != m && gains.size() + 1 != m)
        throw std::invalid_argument("hocbf_chain_values: derivative list and gains lengths disagree");
    std::vector<double> psi(m, 0.0);
    for (size_t i = 0; i < m; ++i) {
        const std::vector<double> e = linear_chain_coefficients(gains, i);
        for (size_t r = 0; r <= i; ++r) psi[i] += e[r] * b_and_derivatives[i - r];
    }
    return psi;
}

// Value, drift derivative and input coefficients of an auxiliary function
// that depends on physical states (SumWithStates kind).
struct AuxJet {
    double value = 0.0;
    double drift_rate = 0.0;
    Vector input_coeffs;
};

// phi_0..phi_{L-1} of an Identity chain.
inline std::vector<double> aux_chain_levels(const AuxiliaryChain& chain) {
    std::vector<double> derivs(chain.states.data(), chain.states.data() + chain.states.size());
    return hocbf_chain_values(derivs, chain.gains);
}

// Row enforcing phi_{i,L} >= margin. Identity chains of any length; the
// SumWithStates kind needs the jet of A_i and a chain of length one; the
// ExpOverSpeed kind yields no row.
inline std::optional<ConstraintRow> build_aux_chain_row(const AuxiliaryChain& chain, const DecisionLayout& layout,
                                                        const std::optional<AuxJet>& jet = std::nullopt) {
    chain.validate();
    if (chain.kind == AuxKind::ExpOverSpeed || chain.gains.empty()) return std::nullopt;
    ConstraintRow row;
    row.coeffs = layout.zeros();
    row.tag = {RowKind::AuxChain, chain.index, false};
    const int nu = layout.nu(chain.index - 1);
    row.coeffs(nu) = 1.0;
    if (chain.kind == AuxKind::Identity) {
        const int len = chain.length();
        const std::vector<double> e = linear_chain_coefficients(chain.gains, len);
        double rhs = chain.margin;
        for (int r = 1; r <= len; ++r) rhs -= e[r] * chain.states(len - r);
        row.rhs = rhs;
        row.level_values = aux_chain_levels(chain);
        return row;
    }
    if (!jet) throw std::invalid_argument("build_aux_chain_row: state-dependent auxiliary function needs its jet");
    if (chain.length() != 1) throw std::invalid_argument("build_aux_chain_row: state-dependent chains have length one");
    if (jet->input_coeffs.size() != layout.num_inputs())
        throw DimensionError("build_aux_chain_row: jet input coefficients have wrong length");
    for (int j = 0; j < layout.num_inputs(); ++j) row.coeffs(layout.u(j)) += jet->input_coeffs(j);
    row.rhs = chain.margin - jet->drift_rate - chain.gains[0].k * jet->value;
    row.level_values = {jet->value};
    return row;
}

// -LgV u + delta >= LfV + c3 V
inline ConstraintRow build_clf_row(double v, double lfv, const Vector& lgv, double c3, const DecisionLayout& layout,
                                   int slack_slot = 0) {
    if (!(c3 > 0.0)) throw std::invalid_argument("build_clf_row: c3 must be positive");
    if (lgv.size() != layout.num_inputs()) throw DimensionError("build_clf_row: LgV has wrong length");
    ConstraintRow row;
    row.coeffs = layout.zeros();
    for (int j = 0; j < layout.num_inputs(); ++j) row.coeffs(layout.u(j)) = -lgv(j);
    row.coeffs(layout.slack(slack_slot)) = 1.0;
    row.rhs = lfv + c3 * v;
    row.tag = {RowKind::Clf, 0, false};
    row.level_values = {v};
    return row;
}

// u_j >= u_min_j and -u_j >= -u_max_j, in input order.
inline std::vector<ConstraintRow> build_control_bound_rows(const Vector& u_min, const Vector& u_max,
                                                           const DecisionLayout& layout) {
    if (u_min.size() != layout.num_inputs() || u_max.size() != layout.num_inputs())
        throw DimensionError("build_control_bound_rows: bound vectors have wrong length");
    std::vector<ConstraintRow> rows;
    for (int j = 0; j < layout.num_inputs(); ++j) {
        if (u_min(j) > u_max(j)) throw std::invalid_argument("build_control_bound_rows: crossed bounds");
        ConstraintRow lo;
        lo.coeffs = layout.zeros();
        lo.coeffs(layout.u(j)) = 1.0;
        lo.rhs = u_min(j);
        lo.tag = {RowKind::ControlBound, j, false};
        ConstraintRow hi;
        hi.coeffs = layout.zeros();
        hi.coeffs(layout.u(j)) = -1.0;
        hi.rhs = -u_max(j);
        hi.tag = {RowKind::ControlBound, j, true};
        rows.push_back(std::move(lo));
        rows.push_back(std::move(hi));
    }
    return rows;
}

struct SafetyFeasibilityReport {
    std::vector<double> psi_levels;
    double criterion_value = 0.0;
    bool criterion_ok = false;
};

inline SafetyFeasibilityReport safety_feasibility_criterion(const std::vector<double>& psi_levels, double threshold) {
    if (psi_levels.empty()) throw std::invalid_argument("safety_feasibility_criterion: no levels");
    SafetyFeasibilityReport r;
    r.psi_levels = psi_levels;
    r.criterion_value = psi_levels.back();
    r.criterion_ok = r.criterion_value > threshold;
    return r;
}

}  // namespace avcbf::cbf
