#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "avcbf/scenarios/acc.hpp"
#include "avcbf/scenarios/unicycle.hpp"

namespace avcbf::scenarios {

using ParamOverrides = std::map<std::string, double>;

inline std::vector<std::string> scenario_ids() {
    return {"acc/avcbf",        "acc/hocbf",         "acc/pacbf",          "acc/reduced",
            "unicycle/hocbf",   "unicycle/avcbf1",   "unicycle/avcbf2",    "unicycle/avcbf_r",
            "unicycle_mixed/avcbf_m"};
}

namespace detail {

inline void apply_overrides(ParamOverrides& remaining, std::vector<ParamRef> fields) {
    for (const ParamRef& f : fields) {
        auto it = remaining.find(f.name);
        if (it == remaining.end()) continue;
        *f.value = it->second;
        remaining.erase(it);
    }
}

inline void reject_leftovers(const std::string& id, const ParamOverrides& remaining) {
    if (remaining.empty()) return;
    std::string keys;
    for (const auto& kv : remaining) keys += (keys.empty() ? "" : ", ") + kv.first;
    throw ConfigError(id + ": unknown parameter(s): " + keys);
}

// Pulls dt and T out of the overrides.
inline void take_timing(ParamOverrides& remaining, double& dt, double& T) {
    if (auto it = remaining.find("dt"); it != remaining.end()) {
        dt = it->second;
        remaining.erase(it);
    }
    if (auto it = remaining.find("T"); it != remaining.end()) {
        T = it->second;
        remaining.erase(it);
    }
}

inline AccParams acc_params(ParamOverrides& remaining) {
    AccParams p;
    if (auto it = remaining.find("c_d"); it != remaining.end()) {
        if (remaining.count("c_d_start") || remaining.count("c_d_end"))
            throw ConfigError("acc: c_d conflicts with c_d_start/c_d_end");
        p.c_d_start = p.c_d_end = it->second;
        remaining.erase(it);
    }
    take_timing(remaining, p.dt, p.T);
    apply_overrides(remaining, p.fields());
    return p;
}

inline UnicycleVariant unicycle_variant(const std::string& name) {
    for (UnicycleVariant v : {UnicycleVariant::Hocbf, UnicycleVariant::Avcbf1, UnicycleVariant::Avcbf2,
                              UnicycleVariant::AvcbfR, UnicycleVariant::AvcbfM}) {
        if (name == to_string(v)) return v;
    }
    throw ConfigError("unknown unicycle variant '" + name + "'");
}

}  // namespace detail

inline std::unique_ptr<Scenario> make_scenario(const std::string& id, ParamOverrides overrides = {}) {
    std::unique_ptr<Scenario> out;
    if (id.rfind("acc/", 0) == 0) {
        AccParams p = detail::acc_params(overrides);
        if (id == "acc/avcbf") {
            detail::reject_leftovers(id, overrides);
            out = std::make_unique<AccAvcbf>(p);
        } else if (id == "acc/hocbf") {
            detail::reject_leftovers(id, overrides);
            out = std::make_unique<AccHocbf>(p);
        } else if (id == "acc/pacbf") {
            PacbfParams q;
            detail::apply_overrides(overrides, q.fields());
            detail::reject_leftovers(id, overrides);
            out = std::make_unique<AccPacbf>(p, q);
        } else if (id == "acc/reduced") {
            ReducedWeights w;
            detail::apply_overrides(overrides, w.fields());
            detail::reject_leftovers(id, overrides);
            out = std::make_unique<AccReduced>(p, w);
        }
    } else if (id.rfind("unicycle/", 0) == 0 || id == "unicycle_mixed/avcbf_m") {
        const UnicycleVariant v = detail::unicycle_variant(id.substr(id.find('/') + 1));
        if ((v == UnicycleVariant::AvcbfM) != (id.rfind("unicycle_mixed/", 0) == 0))
            throw ConfigError("unknown scenario '" + id + "'");
        UnicycleParams p = UnicycleParams::defaults(v);
        detail::take_timing(overrides, p.dt, p.T);
        detail::apply_overrides(overrides, p.fields());
        detail::reject_leftovers(id, overrides);
        out = std::make_unique<Unicycle>(p, v);
    }
    if (!out) throw ConfigError("unknown scenario '" + id + "'");
    return out;
}

}  // namespace avcbf::scenarios
