#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "avcbf/errors.hpp"
#include "avcbf/sim/engine.hpp"

namespace avcbf::autotune {

using scenarios::Scenario;
using sim::AwSchedule;
using sim::Trajectory;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct TuningConfig {
    int J_m = 10;
    int N_c = 8;
    double threshold = 0.1;
    double learning_rate = 10.0;
    double fd_step = 1e-3;
    int max_executions = 1000;

    void validate() const {
        if (J_m < 1) throw ConfigError("tuning: J_m must be at least 1");
        if (N_c < 1) throw ConfigError("tuning: N_c must be at least 1");
        if (!(learning_rate > 0.0)) throw ConfigError("tuning: learning_rate must be positive");
        if (!(threshold > 0.0)) throw ConfigError("tuning: threshold must be positive");
        if (!(fd_step > 0.0) || !std::isfinite(fd_step)) throw ConfigError("tuning: fd_step must be positive");
        if (max_executions < 1) throw ConfigError("tuning: max_executions must be at least 1");
    }
};

// Result of re-simulating one window. psi_min is -inf when a QP failed;
// infeasibility then holds the Phase-1 violation of the failing step.
struct WindowEval {
    double psi_min = kNegInf;
    bool feasible = false;
    double infeasibility = 0.0;
};

// Objective over the per-step hyperparameters of a window.
using WindowObjective = std::function<WindowEval(const std::vector<std::vector<double>>&)>;

struct AscentResult {
    std::vector<std::vector<double>> a_w;  // tuned values per window step
    std::vector<int> iterations;           // j(t_l) per window step
    std::vector<double> psi_history;       // psi_min at every evaluation
    int updates = 0;
    bool converged = false;
};

namespace detail {

// Ascent score: psi_min when both probes are feasible, otherwise the negated
// Phase-1 violation so that the step heads toward feasibility.
inline double fd_gradient(const WindowEval& plus, const WindowEval& minus, double h) {
    if (plus.feasible && minus.feasible) return (plus.psi_min - minus.psi_min) / (2.0 * h);
    const double sp = plus.feasible ? 0.0 : -plus.infeasibility;
    const double sm = minus.feasible ? 0.0 : -minus.infeasibility;
    return (sp - sm) / (2.0 * h);
}

}  // namespace detail

// Gradient ascent over a window: sweeps the steps in order, each sweep is
// one iteration j, and exits as soon as psi_min clears the threshold.
// Threshold and rate are not validated here so degenerate settings can be probed.
inline AscentResult grad_ascent_window(const WindowObjective& objective, std::vector<std::vector<double>> a_w,
                                       const TuningConfig& cfg) {
    AscentResult out;
    out.iterations.assign(a_w.size(), 0);
    const auto evaluate = [&](const std::vector<std::vector<double>>& a) {
        const WindowEval e = objective(a);
        out.psi_history.push_back(e.psi_min);
        return e;
    };
    const auto finish = [&](bool converged) {
        out.a_w = std::move(a_w);
        out.converged = converged;
        return out;
    };
    if (a_w.empty()) return finish(evaluate(a_w).psi_min > cfg.threshold);
    const double h = cfg.fd_step;
    for (int j = 1; j <= cfg.J_m; ++j) {
        for (size_t k = 0; k < a_w.size(); ++k) {
            if (evaluate(a_w).psi_min > cfg.threshold) return finish(true);
            std::vector<double> grad(a_w[k].size());
            for (size_t i = 0; i < a_w[k].size(); ++i) {
                std::vector<std::vector<double>> probe = a_w;
                probe[k][i] = a_w[k][i] + h;
                const WindowEval plus = objective(probe);
                probe[k][i] = a_w[k][i] - h;
                const WindowEval minus = objective(probe);
                grad[i] = detail::fd_gradient(plus, minus, h);
            }
            for (size_t i = 0; i < grad.size(); ++i) a_w[k][i] += cfg.learning_rate * grad[i];
            out.iterations[k] = j;
            ++out.updates;
        }
    }
    return finish(evaluate(a_w).psi_min > cfg.threshold);
}

struct ViolationRun {
    std::optional<int> t_f;  // first step with criterion <= threshold or an infeasible QP
    Trajectory trajectory;
};

// Simulates from `start` at `start_step` to the horizon, halting at the first violation.
inline ViolationRun run_until_violation(const Scenario& sc, const sim::AugmentedState& start, int start_step,
                                        const AwSchedule& schedule, double threshold) {
    ViolationRun out;
    const int remaining = std::max(0, sim::horizon_steps(sc) - start_step);
    out.trajectory = sim::simulate_from(sc, start, start_step, remaining, schedule,
                                        [threshold](const sim::StepRecord& r) { return !(r.criterion > threshold); });
    const Trajectory& tr = out.trajectory;
    if (tr.halted || tr.termination == sim::Termination::Infeasible) out.t_f = tr.rows.back().step;
    return out;
}

// Hard minimum of the criterion over steps k0..t_f re-simulated from the checkpoint.
inline WindowEval windowed_psi_min(const Scenario& sc, const sim::AugmentedState& checkpoint, int k0, int t_f,
                                   const AwSchedule& schedule) {
    const Trajectory tr = sim::simulate_from(sc, checkpoint, k0, t_f - k0, schedule);
    WindowEval e;
    if (tr.rows.empty()) return e;
    if (tr.termination == sim::Termination::Infeasible) {
        e.infeasibility = tr.rows.back().infeasibility;
        return e;
    }
    if (tr.termination == sim::Termination::NumericAbort || tr.termination == sim::Termination::MaxIterations) {
        e.infeasibility = std::numeric_limits<double>::max();
        return e;
    }
    e.feasible = true;
    e.psi_min = std::numeric_limits<double>::infinity();
    for (const sim::StepRecord& r : tr.rows) e.psi_min = std::min(e.psi_min, r.criterion);
    return e;
}

struct WindowRecord {
    int k0 = 0;
    int t_f = 0;
    double t_k = 0.0;
    double t_f_time = 0.0;
    int iterations = 0;  // largest j(t_l) recorded in this execution
    int updates = 0;
    bool converged = false;
};

struct TuningReport {
    std::vector<std::vector<double>> tuned_values;  // per step, per chain
    std::vector<int> iterations;                    // accumulated j(t_l) per step
    long cumulative_iterations = 0;
    std::vector<WindowRecord> windows;
    bool converged = false;
    std::string message;
    Trajectory trajectory;
};

namespace detail {

inline void splice(Trajectory& into, int k0, Trajectory&& tail) {
    into.rows.resize(static_cast<size_t>(k0));
    for (sim::StepRecord& r : tail.rows) into.rows.push_back(std::move(r));
    into.termination = tail.termination;
    into.first_infeasible_time = tail.first_infeasible_time;
    into.abort_step = tail.abort_step;
    into.message = std::move(tail.message);
    into.halted = tail.halted;
    into.min_b = std::numeric_limits<double>::infinity();
    for (const sim::StepRecord& r : into.rows) into.min_b = std::min(into.min_b, r.b);
}

}  // namespace detail

// Repeats violation detection and window ascent until the horizon is covered.
// After a window converges, every later step inherits the value tuned at t_f - 1.
inline TuningReport tune_full_horizon(const Scenario& sc, const TuningConfig& cfg) {
    const int n = sim::horizon_steps(sc);
    TuningReport rep;
    AwSchedule schedule;
    schedule.per_step.assign(static_cast<size_t>(n) + 1, sc.default_a_w());
    rep.iterations.assign(static_cast<size_t>(n) + 1, 0);

    const sim::AugmentedState s0 = sc.initial_state();
    sc.check_initial(s0);
    ViolationRun run = run_until_violation(sc, s0, 0, schedule, cfg.threshold);
    rep.trajectory = std::move(run.trajectory);

    int executions = 0;
    while (run.t_f) {
        const int t_f = *run.t_f;
        if (executions == cfg.max_executions) {
            rep.message = "execution cap reached";
            break;
        }
        ++executions;
        const int k0 = std::max(0, t_f - cfg.N_c);
        WindowRecord w;
        w.k0 = k0;
        w.t_f = t_f;
        w.t_k = k0 * sc.dt();
        w.t_f_time = t_f * sc.dt();
        if (k0 == t_f) {
            rep.windows.push_back(w);
            rep.message = "violation at the initial step leaves no window to tune";
            break;
        }
        const sim::AugmentedState checkpoint = rep.trajectory.rows[static_cast<size_t>(k0)].state;
        std::vector<std::vector<double>> window(schedule.per_step.begin() + k0, schedule.per_step.begin() + t_f);
        const WindowObjective objective = [&](const std::vector<std::vector<double>>& a) {
            AwSchedule trial = schedule;
            std::copy(a.begin(), a.end(), trial.per_step.begin() + k0);
            return windowed_psi_min(sc, checkpoint, k0, t_f, trial);
        };
        AscentResult res = grad_ascent_window(objective, std::move(window), cfg);
        std::copy(res.a_w.begin(), res.a_w.end(), schedule.per_step.begin() + k0);
        for (size_t l = 0; l < res.iterations.size(); ++l) {
            rep.iterations[static_cast<size_t>(k0) + l] += res.iterations[l];
            rep.cumulative_iterations += res.iterations[l];
            w.iterations = std::max(w.iterations, res.iterations[l]);
        }
        w.updates = res.updates;
        w.converged = res.converged;
        rep.windows.push_back(w);
        std::fill(schedule.per_step.begin() + t_f, schedule.per_step.end(), res.a_w.back());

        run = run_until_violation(sc, checkpoint, k0, schedule, cfg.threshold);
        detail::splice(rep.trajectory, k0, std::move(run.trajectory));
        if (!res.converged) {
            rep.message = "window did not converge within J_m iterations";
            break;
        }
    }
    rep.tuned_values = schedule.per_step;
    const sim::Termination term = rep.trajectory.termination;
    rep.converged = rep.message.empty() && !run.t_f &&
                    (term == sim::Termination::Horizon || term == sim::Termination::TargetReached);
    return rep;
}

}  // namespace avcbf::autotune
