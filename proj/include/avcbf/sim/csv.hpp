#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "avcbf/errors.hpp"
#include "avcbf/scenarios/scenario.hpp"
#include "avcbf/sim/engine.hpp"

namespace avcbf::sim {

// 12 significant digits; non-finite values spelled without a sign on NaN.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline double parse_number(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError("csv: not a number: '" + s + "'");
    return v;
}

inline std::vector<std::string> csv_header(const Scenario& sc) {
    std::vector<std::string> h{"t"};
    for (const auto& n : sc.state_names()) h.push_back(n);
    for (const auto& n : sc.chain_names()) h.push_back(n);
    for (const auto& n : sc.layout().names()) h.push_back(n);
    const size_t n_aw = sc.default_a_w().size();
    for (size_t i = 0; i < n_aw; ++i) h.push_back("a" + std::to_string(i + 1) + "w");
    const size_t n_psi = sc.psi_levels(sc.initial_state()).size();
    for (size_t i = 0; i < n_psi; ++i) h.push_back("psi_" + std::to_string(i));
    h.push_back("criterion");
    h.push_back("b");
    for (const auto& kv : sc.extra_columns(sc.initial_state())) h.push_back(kv.first);
    h.push_back("qp_status");
    h.push_back("objective");
    return h;
}

inline std::vector<std::string> csv_row(const StepRecord& r) {
    std::vector<std::string> c;
    c.push_back(format_number(r.state.t));
    for (int i = 0; i < r.state.x.size(); ++i) c.push_back(format_number(r.state.x(i)));
    for (const auto& ch : r.state.chains)
        for (int i = 0; i < ch.size(); ++i) c.push_back(format_number(ch(i)));
    for (int i = 0; i < r.w.size(); ++i) c.push_back(format_number(r.w(i)));
    for (double a : r.a_w) c.push_back(format_number(a));
    for (double p : r.psi) c.push_back(format_number(p));
    c.push_back(format_number(r.criterion));
    c.push_back(format_number(r.b));
    for (double e : r.extras) c.push_back(format_number(e));
    c.push_back(numkit::to_string(r.status));
    c.push_back(format_number(r.objective));
    return c;
}

inline std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

inline std::string to_csv(const Scenario& sc, const Trajectory& traj) {
    std::string out = join(csv_header(sc)) + '\n';
    for (const StepRecord& r : traj.rows) out += join(csv_row(r)) + '\n';
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

inline void export_csv(const Scenario& sc, const Trajectory& traj, const std::string& path) {
    write_text(path, to_csv(sc, traj));
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> cells;

    int column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
    double number(size_t row, const std::string& name) const {
        const int c = column(name);
        if (c < 0) throw ConfigError("csv: no column '" + name + "'");
        return parse_number(cells.at(row).at(static_cast<size_t>(c)));
    }
};

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line)) return t;
    t.header = split_line(line);
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::vector<std::string> row = split_line(line);
        if (row.size() != t.header.size()) throw ConfigError("csv: ragged row");
        t.cells.push_back(std::move(row));
    }
    return t;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str());
}

}  // namespace avcbf::sim
