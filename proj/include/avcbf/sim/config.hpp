#pragma once

#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "avcbf/autotune/autotune.hpp"
#include "avcbf/errors.hpp"
#include "avcbf/scenarios/registry.hpp"
#include "avcbf/sim/engine.hpp"

namespace avcbf::sim {

using Json = nlohmann::json;

struct RunConfig {
    std::string scenario;  // full id, e.g. "acc/avcbf"
    scenarios::ParamOverrides params;
    bool tuning_enabled = false;
    autotune::TuningConfig tuning;
    std::optional<std::string> out;
    std::optional<long> seed;
};

namespace detail {

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

inline double number_at(const Json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    return v.get<double>();
}

inline int integer_at(const Json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
    return v.get<int>();
}

}  // namespace detail

// Validates the schema and the scenario parameters without simulating.
inline RunConfig parse_config(const Json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    detail::reject_unknown(doc, {"scenario", "variant", "params", "tuning", "out", "seed"}, "config");
    RunConfig cfg;
    if (!doc.contains("scenario") || !doc["scenario"].is_string()) throw ConfigError("config.scenario must be a string");
    cfg.scenario = doc["scenario"].get<std::string>();
    if (doc.contains("variant")) {
        if (!doc["variant"].is_string()) throw ConfigError("config.variant must be a string");
        if (cfg.scenario.find('/') != std::string::npos)
            throw ConfigError("config.variant given but config.scenario already names a variant");
        cfg.scenario += "/" + doc["variant"].get<std::string>();
    }
    if (doc.contains("params")) {
        const Json& p = doc["params"];
        if (!p.is_object()) throw ConfigError("config.params must be an object");
        for (auto it = p.begin(); it != p.end(); ++it)
            cfg.params[it.key()] = detail::number_at(it.value(), "config.params." + it.key());
    }
    if (doc.contains("tuning")) {
        const Json& t = doc["tuning"];
        if (!t.is_object()) throw ConfigError("config.tuning must be an object");
        detail::reject_unknown(t, {"enabled", "J_m", "N_c", "threshold", "learning_rate", "fd_step", "max_executions"},
                               "config.tuning");
        if (t.contains("enabled")) {
            if (!t["enabled"].is_boolean()) throw ConfigError("config.tuning.enabled must be a boolean");
            cfg.tuning_enabled = t["enabled"].get<bool>();
        }
        if (t.contains("J_m")) cfg.tuning.J_m = detail::integer_at(t["J_m"], "config.tuning.J_m");
        if (t.contains("N_c")) cfg.tuning.N_c = detail::integer_at(t["N_c"], "config.tuning.N_c");
        if (t.contains("max_executions"))
            cfg.tuning.max_executions = detail::integer_at(t["max_executions"], "config.tuning.max_executions");
        if (t.contains("threshold")) cfg.tuning.threshold = detail::number_at(t["threshold"], "config.tuning.threshold");
        if (t.contains("learning_rate"))
            cfg.tuning.learning_rate = detail::number_at(t["learning_rate"], "config.tuning.learning_rate");
        if (t.contains("fd_step")) cfg.tuning.fd_step = detail::number_at(t["fd_step"], "config.tuning.fd_step");
        cfg.tuning.validate();
    }
    if (doc.contains("out")) {
        if (!doc["out"].is_string()) throw ConfigError("config.out must be a string");
        cfg.out = doc["out"].get<std::string>();
    }
    if (doc.contains("seed")) cfg.seed = detail::integer_at(doc["seed"], "config.seed");
    scenarios::make_scenario(cfg.scenario, cfg.params);
    return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return parse_config_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

struct RunResult {
    std::unique_ptr<scenarios::Scenario> scenario;
    Trajectory trajectory;
    std::optional<autotune::TuningReport> tuning;
};

// Simulates a config, through the tuner when tuning is enabled.
inline RunResult execute(const RunConfig& cfg) {
    RunResult r;
    r.scenario = scenarios::make_scenario(cfg.scenario, cfg.params);
    if (cfg.tuning_enabled) {
        r.tuning = autotune::tune_full_horizon(*r.scenario, cfg.tuning);
        r.trajectory = r.tuning->trajectory;
    } else {
        r.trajectory = simulate(*r.scenario);
    }
    return r;
}

inline Json tuning_report_json(const autotune::TuningReport& rep) {
    Json windows = Json::array();
    for (const autotune::WindowRecord& w : rep.windows) {
        windows.push_back({{"t_k", w.t_k},
                           {"t_f", w.t_f_time},
                           {"step_k", w.k0},
                           {"step_f", w.t_f},
                           {"iterations", w.iterations},
                           {"updates", w.updates},
                           {"converged", w.converged}});
    }
    return Json{{"tuned_values", rep.tuned_values},
                {"iterations", rep.iterations},
                {"cumulative_iterations", rep.cumulative_iterations},
                {"windows", windows},
                {"converged", rep.converged}};
}

}  // namespace avcbf::sim
