#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "avcbf/cbf/assemble.hpp"
#include "avcbf/numkit/qp.hpp"
#include "avcbf/scenarios/scenario.hpp"

namespace avcbf::sim {

using dynamics::AugmentedState;
using numkit::QpStatus;
using scenarios::Scenario;
using Vector = Eigen::VectorXd;

enum class Termination { Horizon, Infeasible, TargetReached, NumericAbort, MaxIterations };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::Horizon: return "Horizon";
        case Termination::Infeasible: return "Infeasible";
        case Termination::TargetReached: return "TargetReached";
        case Termination::NumericAbort: return "NumericAbort";
        case Termination::MaxIterations: return "MaxIterations";
    }
    return "?";
}

// Per-step a_{i,w}; steps past the end reuse the last entry.
struct AwSchedule {
    std::vector<std::vector<double>> per_step;
    std::vector<double> fallback;

    const std::vector<double>& at(int step) const {
        if (per_step.empty()) return fallback;
        return per_step[std::min<size_t>(static_cast<size_t>(step), per_step.size() - 1)];
    }
};

// State at t_k and the QP solved there. w is all-NaN when the QP had no solution.
struct StepRecord {
    int step = 0;
    AugmentedState state;
    std::vector<double> a_w;
    Vector w;
    QpStatus status = QpStatus::Optimal;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double infeasibility = 0.0;
    std::vector<double> psi;
    double criterion = 0.0;
    double b = 0.0;
    std::vector<double> extras;
};

struct Trajectory {
    std::string scenario_id;
    double dt = 0.0;
    std::vector<StepRecord> rows;
    Termination termination = Termination::Horizon;
    std::optional<double> first_infeasible_time;
    std::optional<int> abort_step;
    std::string message;
    bool halted = false;  // stopped by the caller's predicate
    double min_b = std::numeric_limits<double>::infinity();

    const AugmentedState& terminal_state() const { return rows.back().state; }
};

inline int horizon_steps(const Scenario& sc) {
    return static_cast<int>(std::llround(sc.horizon() / sc.dt()));
}

// Builds and solves the QP at one state.
inline StepRecord solve_step(const Scenario& sc, const AugmentedState& s, int step, const std::vector<double>& a_w) {
    StepRecord r;
    r.step = step;
    r.state = s;
    r.a_w = a_w;
    r.psi = sc.psi_levels(s);
    r.criterion = r.psi.back();
    r.b = sc.barrier(s);
    for (const auto& kv : sc.extra_columns(s)) r.extras.push_back(kv.second);
    const numkit::QpProblem qp = cbf::assemble_qp(sc.rows(s), sc.cost(s, a_w), sc.layout());
    const numkit::QpSolution sol = numkit::qp_solve(qp);
    r.status = sol.status;
    r.infeasibility = sol.infeasibility;
    if (sol.status == QpStatus::Optimal) {
        r.w = *sol.w_star;
        r.objective = sol.objective;
    } else {
        r.w = Vector::Constant(sc.layout().dim(), std::numeric_limits<double>::quiet_NaN());
    }
    return r;
}

using StopPredicate = std::function<bool(const StepRecord&)>;

// Steps from `start` at index `first_step` for at most `max_steps` intervals,
// stopping early on infeasibility, numeric failure, target arrival or when
// `stop` accepts a freshly recorded row.
inline Trajectory simulate_from(const Scenario& sc, const AugmentedState& start, int first_step, int max_steps,
                                const AwSchedule& schedule, const StopPredicate& stop = nullptr) {
    Trajectory traj;
    traj.scenario_id = sc.id();
    traj.dt = sc.dt();
    AugmentedState s = start;
    const int last = first_step + max_steps;
    for (int k = first_step;; ++k) {
        s.t = k * sc.dt();
        StepRecord rec;
        try {
            rec = solve_step(sc, s, k, schedule.at(k));
        } catch (const NumericError& e) {
            traj.termination = Termination::NumericAbort;
            traj.abort_step = k;
            traj.message = e.what();
            break;
        }
        traj.min_b = std::min(traj.min_b, rec.b);
        const QpStatus status = rec.status;
        traj.rows.push_back(std::move(rec));
        if (status == QpStatus::Infeasible) {
            traj.termination = Termination::Infeasible;
            traj.first_infeasible_time = s.t;
            break;
        }
        if (status == QpStatus::MaxIterations) {
            traj.termination = Termination::MaxIterations;
            traj.abort_step = k;
            traj.message = "QP iteration limit reached";
            break;
        }
        if (sc.finished(s)) {
            traj.termination = Termination::TargetReached;
            break;
        }
        if (stop && stop(traj.rows.back())) {
            traj.halted = true;
            break;
        }
        if (k >= last) break;
        try {
            s = sc.advance(s, traj.rows.back().w);
        } catch (const NumericError& e) {
            traj.termination = Termination::NumericAbort;
            traj.abort_step = k;
            traj.message = e.what();
            break;
        }
    }
    return traj;
}

inline Trajectory simulate(const Scenario& sc, const AwSchedule& schedule) {
    const AugmentedState s0 = sc.initial_state();
    sc.check_initial(s0);
    return simulate_from(sc, s0, 0, horizon_steps(sc), schedule);
}

inline Trajectory simulate(const Scenario& sc) {
    AwSchedule schedule;
    schedule.fallback = sc.default_a_w();
    return simulate(sc, schedule);
}

}  // namespace avcbf::sim
