#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "avcbf/errors.hpp"

namespace avcbf::cbf {

using Vector = Eigen::VectorXd;

// alpha(s) = k * s
struct ClassKappaLinear {
    double k = 1.0;

    ClassKappaLinear() = default;
    explicit ClassKappaLinear(double gain) : k(gain) {
        if (!(gain > 0.0)) throw std::invalid_argument("class-kappa gain must be positive");
    }
    double operator()(double s) const { return k * s; }
};

inline double eval_class_kappa(const ClassKappaLinear& fn, double s) { return fn(s); }

inline std::vector<ClassKappaLinear> gains_of(const std::vector<double>& ks) {
    std::vector<ClassKappaLinear> out;
    out.reserve(ks.size());
    for (double k : ks) out.emplace_back(k);
    return out;
}

enum class AuxKind { Identity, ExpOverSpeed, SumWithStates };

// Integrator chain a_i, a_i', ..., driven by the auxiliary input nu_i.
struct AuxiliaryChain {
    int index = 1;
    Vector states;
    std::vector<ClassKappaLinear> gains;
    double margin = 1e-10;
    AuxKind kind = AuxKind::Identity;

    int length() const { return static_cast<int>(states.size()); }

    void validate() const {
        if (states.size() == 0) throw std::invalid_argument("auxiliary chain has no states");
        if (!(margin > 0.0)) throw std::invalid_argument("auxiliary chain margin must be positive");
        if (kind != AuxKind::ExpOverSpeed && static_cast<int>(gains.size()) != length())
            throw std::invalid_argument("auxiliary chain needs one gain per chain state");
    }
};

enum class RowKind { HighestAvcbf, AuxChain, Clf, ControlBound, PacbfAux, PacbfClf };

inline const char* to_string(RowKind k) {
    switch (k) {
        case RowKind::HighestAvcbf: return "barrier";
        case RowKind::AuxChain: return "aux_chain";
        case RowKind::Clf: return "clf";
        case RowKind::ControlBound: return "control_bound";
        case RowKind::PacbfAux: return "pacbf_aux";
        case RowKind::PacbfClf: return "pacbf_clf";
    }
    return "?";
}

struct RowTag {
    RowKind kind = RowKind::HighestAvcbf;
    int index = 0;       // chain index or input index
    bool upper = false;  // control bounds only
};

// coeffs . w >= rhs
struct ConstraintRow {
    Vector coeffs;
    double rhs = 0.0;
    RowTag tag;
    std::vector<double> level_values;

    double slack(const Vector& w) const { return coeffs.dot(w) - rhs; }
};

// Names and positions of the QP decision variables (u..., nu..., slacks...).
class DecisionLayout {
public:
    DecisionLayout() = default;
    DecisionLayout(std::vector<std::string> inputs, std::vector<std::string> aux_inputs,
                   std::vector<std::string> slacks) {
        for (auto& s : inputs) u_.push_back(push(std::move(s)));
        for (auto& s : aux_inputs) nu_.push_back(push(std::move(s)));
        for (auto& s : slacks) slack_.push_back(push(std::move(s)));
    }

    int dim() const { return static_cast<int>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    int u(int j) const { return u_.at(j); }
    int nu(int i) const { return nu_.at(i); }
    int slack(int j) const { return slack_.at(j); }
    int num_inputs() const { return static_cast<int>(u_.size()); }
    int num_aux() const { return static_cast<int>(nu_.size()); }
    int num_slacks() const { return static_cast<int>(slack_.size()); }

    int index_of(const std::string& name) const {
        for (int i = 0; i < dim(); ++i)
            if (names_[i] == name) return i;
        return -1;
    }

    Vector zeros() const { return Vector::Zero(dim()); }

private:
    int push(std::string s) {
        names_.push_back(std::move(s));
        return dim() - 1;
    }

    std::vector<std::string> names_;
    std::vector<int> u_, nu_, slack_;
};

}  // namespace avcbf::cbf
