#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "avcbf/errors.hpp"
#include "avcbf/sim/config.hpp"
#include "avcbf/sim/csv.hpp"

namespace avcbf::sim {

struct ComparisonReport {
    std::string aligned_csv;  // one row per step, every run's columns prefixed by its label
    Json summary;
    std::vector<std::string> labels;
    std::vector<std::string> run_csv;  // per-run exports
};

namespace detail {

inline std::string run_label(size_t i, const std::string& id) {
    std::string s = "r" + std::to_string(i) + "_";
    for (char c : id) s += (c == '/' ? '_' : c);
    return s;
}

inline Json nullable(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

inline Json run_summary(const std::string& label, const scenarios::Scenario& sc, const Trajectory& tr) {
    Json terminal = Json::object();
    if (!tr.rows.empty()) {
        const auto names = sc.state_names();
        for (size_t i = 0; i < names.size(); ++i) terminal[names[i]] = tr.rows.back().state.x(static_cast<int>(i));
    }
    return Json{{"label", label},
                {"scenario", tr.scenario_id},
                {"termination", to_string(tr.termination)},
                {"first_infeasible_time", nullable(tr.first_infeasible_time)},
                {"min_b", tr.rows.empty() ? Json(nullptr) : Json(tr.min_b)},
                {"steps", tr.rows.size()},
                {"terminal_time", tr.rows.empty() ? Json(nullptr) : Json(tr.rows.back().state.t)},
                {"terminal_state", terminal}};
}

}  // namespace detail

// Runs every config on a shared grid and aligns the rows by step index.
// Deltas are taken against the first run; a missing value gives null.
inline ComparisonReport compare(const std::vector<RunConfig>& configs) {
    if (configs.size() < 2) throw ConfigError("compare needs at least two configs");
    std::vector<RunResult> runs;
    for (const RunConfig& c : configs) runs.push_back(execute(c));
    const double dt = runs[0].scenario->dt();
    const double T = runs[0].scenario->horizon();
    for (const RunResult& r : runs) {
        if (r.scenario->dt() != dt || r.scenario->horizon() != T)
            throw ConfigError("compare: configs must share dt and T");
    }

    ComparisonReport rep;
    std::vector<std::string> header{"t"};
    std::vector<std::vector<std::string>> headers;
    size_t n_rows = 0;
    Json runs_json = Json::array();
    for (size_t i = 0; i < runs.size(); ++i) {
        const std::string label = detail::run_label(i, configs[i].scenario);
        rep.labels.push_back(label);
        rep.run_csv.push_back(to_csv(*runs[i].scenario, runs[i].trajectory));
        std::vector<std::string> h = csv_header(*runs[i].scenario);
        for (size_t j = 1; j < h.size(); ++j) header.push_back(label + ":" + h[j]);
        headers.push_back(std::move(h));
        n_rows = std::max(n_rows, runs[i].trajectory.rows.size());
        runs_json.push_back(detail::run_summary(label, *runs[i].scenario, runs[i].trajectory));
    }

    rep.aligned_csv = join(header) + '\n';
    for (size_t k = 0; k < n_rows; ++k) {
        std::vector<std::string> cells{format_number(static_cast<double>(k) * dt)};
        for (size_t i = 0; i < runs.size(); ++i) {
            const auto& rows = runs[i].trajectory.rows;
            if (k < rows.size()) {
                std::vector<std::string> c = csv_row(rows[k]);
                cells.insert(cells.end(), c.begin() + 1, c.end());
            } else {
                cells.insert(cells.end(), headers[i].size() - 1, "");
            }
        }
        rep.aligned_csv += join(cells) + '\n';
    }

    Json deltas = Json::array();
    const Json& base = runs_json[0];
    for (size_t i = 1; i < runs.size(); ++i) {
        const Json& cur = runs_json[i];
        const auto diff = [](const Json& a, const Json& b) {
            return (a.is_number() && b.is_number()) ? Json(a.get<double>() - b.get<double>()) : Json(nullptr);
        };
        Json terminal = Json::object();
        for (auto it = cur["terminal_state"].begin(); it != cur["terminal_state"].end(); ++it) {
            if (base["terminal_state"].contains(it.key()))
                terminal[it.key()] = diff(it.value(), base["terminal_state"][it.key()]);
        }
        deltas.push_back({{"label", cur["label"]},
                          {"against", base["label"]},
                          {"first_infeasible_time", diff(cur["first_infeasible_time"], base["first_infeasible_time"])},
                          {"min_b", diff(cur["min_b"], base["min_b"])},
                          {"terminal_time", diff(cur["terminal_time"], base["terminal_time"])},
                          {"terminal_state", terminal}});
    }
    rep.summary = Json{{"dt", dt}, {"T", T}, {"runs", runs_json}, {"deltas", deltas}};
    return rep;
}

}  // namespace avcbf::sim
