#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avcbf/errors.hpp"
#include "avcbf/scenarios/registry.hpp"
#include "avcbf/sim/compare.hpp"
#include "avcbf/sim/config.hpp"
#include "avcbf/sim/csv.hpp"

namespace {

using namespace avcbf;

enum ExitCode { kOk = 0, kConfigError = 2, kInfeasible = 3, kNumericAbort = 4 };

int exit_for(const sim::Trajectory& tr) {
    switch (tr.termination) {
        case sim::Termination::Infeasible: return kInfeasible;
        case sim::Termination::NumericAbort:
        case sim::Termination::MaxIterations: return kNumericAbort;
        default: return kOk;
    }
}

void print_summary(const sim::Trajectory& tr) {
    std::cerr << tr.scenario_id << ": " << sim::to_string(tr.termination) << ", " << tr.rows.size() << " rows";
    if (!tr.rows.empty()) std::cerr << ", min b " << sim::format_number(tr.min_b);
    if (tr.first_infeasible_time) std::cerr << ", infeasible at t=" << sim::format_number(*tr.first_infeasible_time);
    if (tr.abort_step) std::cerr << ", aborted at step " << *tr.abort_step;
    if (!tr.message.empty()) std::cerr << " (" << tr.message << ")";
    std::cerr << "\n";
}

std::string resolve_out(const std::string& flag, const sim::RunConfig& cfg) {
    if (!flag.empty()) return flag;
    if (cfg.out) return *cfg.out;
    throw ConfigError("no output path: pass --out or set config.out");
}

int cmd_run(const std::string& config_path, const std::string& out_flag) {
    const sim::RunConfig cfg = sim::load_config(config_path);
    const std::string out = resolve_out(out_flag, cfg);
    sim::RunResult res = sim::execute(cfg);
    sim::export_csv(*res.scenario, res.trajectory, out);
    print_summary(res.trajectory);
    if (res.tuning && !res.tuning->converged) {
        std::cerr << "tuning did not converge: " << res.tuning->message << "\n";
        if (exit_for(res.trajectory) == kOk) return kInfeasible;
    }
    return exit_for(res.trajectory);
}

int cmd_tune(const std::string& config_path, const std::string& out_flag) {
    sim::RunConfig cfg = sim::load_config(config_path);
    const std::string out = resolve_out(out_flag, cfg);
    cfg.tuning_enabled = true;
    sim::RunResult res = sim::execute(cfg);
    sim::write_text(out, sim::tuning_report_json(*res.tuning).dump(2) + "\n");
    print_summary(res.trajectory);
    if (!res.tuning->converged) {
        std::cerr << "tuning did not converge: " << res.tuning->message << "\n";
        return exit_for(res.trajectory) == kNumericAbort ? kNumericAbort : kInfeasible;
    }
    return exit_for(res.trajectory);
}

int cmd_compare(const std::vector<std::string>& config_paths, const std::string& out_dir) {
    std::vector<sim::RunConfig> configs;
    for (const auto& p : config_paths) configs.push_back(sim::load_config(p));
    const sim::ComparisonReport rep = sim::compare(configs);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    for (size_t i = 0; i < rep.labels.size(); ++i)
        sim::write_text((dir / (rep.labels[i] + ".csv")).string(), rep.run_csv[i]);
    sim::write_text((dir / "aligned.csv").string(), rep.aligned_csv);
    sim::write_text((dir / "summary.json").string(), rep.summary.dump(2) + "\n");
    for (const auto& r : rep.summary["runs"]) {
        std::cerr << r["label"].get<std::string>() << ": " << r["termination"].get<std::string>() << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive barrier-function QP simulator"};
    app.require_subcommand(1);

    std::string config, out;
    std::vector<std::string> configs;

    auto* run = app.add_subcommand("run", "simulate one config and write a trajectory CSV");
    run->add_option("--config", config, "JSON run config")->required();
    run->add_option("--out", out, "output CSV path");

    auto* cmp = app.add_subcommand("compare", "simulate several configs on a shared grid");
    cmp->add_option("--configs", configs, "JSON run configs")->required()->expected(2, -1);
    cmp->add_option("--out", out, "output directory")->required();

    auto* tune = app.add_subcommand("tune", "run the rollback tuner and write a JSON report");
    tune->add_option("--config", config, "JSON run config")->required();
    tune->add_option("--out", out, "output JSON path");

    auto* list = app.add_subcommand("list-scenarios", "print the registered scenario ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (*list) {
            for (const auto& id : scenarios::scenario_ids()) std::cout << id << "\n";
            return kOk;
        }
        if (*run) return cmd_run(config, out);
        if (*tune) return cmd_tune(config, out);
        if (*cmp) return cmd_compare(configs, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kNumericAbort;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kOk;
}
