#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "avcbf/cbf/assemble.hpp"
#include "avcbf/cbf/rows.hpp"
#include "avcbf/cbf/types.hpp"
#include "avcbf/dynamics/dynamics.hpp"
#include "avcbf/errors.hpp"

namespace avcbf::scenarios {

using cbf::ConstraintRow;
using cbf::CostSpec;
using cbf::DecisionLayout;
using dynamics::AffineDynamics;
using dynamics::AugmentedState;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Named scalar parameter bound to a field of a params struct.
struct ParamRef {
    const char* name;
    double* value;
};

// A quantity whose analytic time derivative is produced by the row algebra.
struct TrackedQuantity {
    std::string name;
    double value = 0.0;
};

class Scenario {
public:
    virtual ~Scenario() = default;

    virtual std::string id() const = 0;
    virtual const DecisionLayout& layout() const = 0;
    virtual const AffineDynamics& dynamics() const = 0;
    virtual AugmentedState initial_state() const = 0;
    virtual std::vector<std::string> state_names() const = 0;
    virtual std::vector<std::string> chain_names() const = 0;

    // Every constraint row of the per-step QP; the first row is the barrier row.
    virtual std::vector<ConstraintRow> rows(const AugmentedState& s) const = 0;
    virtual CostSpec cost(const AugmentedState& s, const std::vector<double>& a_w) const = 0;
    // Default a_{i,w} per tunable chain; the first entry is the one the tuner adjusts.
    virtual std::vector<double> default_a_w() const = 0;

    // psi_0 .. psi_{m_a-1}
    virtual std::vector<double> psi_levels(const AugmentedState& s) const = 0;
    virtual double barrier(const AugmentedState& s) const = 0;
    virtual bool finished(const AugmentedState&) const { return false; }

    // Values of the tracked quantities and their analytic rates under held w.
    virtual std::vector<TrackedQuantity> tracked_values(const AugmentedState& s) const = 0;
    virtual std::vector<double> tracked_rates(const AugmentedState& s, const Vector& w) const = 0;

    // Additional derived columns for reports.
    virtual std::vector<std::pair<std::string, double>> extra_columns(const AugmentedState&) const { return {}; }

    // Throws ConfigError when Z(0) lies outside the level sets the guarantees need.
    virtual void check_initial(const AugmentedState& s) const {
        const std::vector<double> psi = psi_levels(s);
        for (size_t i = 0; i < psi.size(); ++i) {
            if (!(psi[i] > 0.0))
                throw ConfigError(id() + ": initial state violates psi_" + std::to_string(i) + " > 0 (value " +
                                  std::to_string(psi[i]) + ")");
        }
        check_initial_aux(s);
    }

    double criterion(const AugmentedState& s) const { return psi_levels(s).back(); }

    double dt() const { return dt_; }
    double horizon() const { return horizon_; }
    int substeps() const { return substeps_; }
    void set_timing(double dt, double horizon, int substeps = 10) {
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        if (!(horizon >= 0.0)) throw ConfigError("T must be nonnegative");
        if (substeps < 1) throw ConfigError("substeps must be at least one");
        dt_ = dt;
        horizon_ = horizon;
        substeps_ = substeps;
    }

    // Holds (u, nu) over one interval.
    AugmentedState advance(const AugmentedState& s, const Vector& w) const {
        const DecisionLayout& lay = layout();
        Vector u(lay.num_inputs());
        for (int j = 0; j < lay.num_inputs(); ++j) u(j) = w(lay.u(j));
        Vector nus(static_cast<int>(s.chains.size()));
        for (int i = 0; i < nus.size(); ++i) nus(i) = w(lay.nu(i));
        return dynamics::step_augmented(s, u, nus, dt_, dynamics(), substeps_);
    }

protected:
    virtual void check_initial_aux(const AugmentedState&) const {}

    static void require_positive(const std::string& who, const std::string& what, double v) {
        if (!(v > 0.0)) throw ConfigError(who + ": initial state violates " + what + " > 0 (value " +
                                          std::to_string(v) + ")");
    }

    double dt_ = 0.1;
    double horizon_ = 10.0;
    int substeps_ = 10;
};

}  // namespace avcbf::scenarios
