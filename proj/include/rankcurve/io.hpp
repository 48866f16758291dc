#pragma once

// File formats: the .sys system format (vars: header + one polynomial per
// line), CSV branch output at lossless precision, the JSON run report, and
// gnuplot script emission.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankcurve/tracer.hpp"

namespace rankcurve {

// first nonempty line: "vars: x1 x2 ..."; then one polynomial per nonempty
// line; '#' begins a comment
inline PolySystem load_system_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<std::string> names;
    std::string rest;
    bool have_vars = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = detail::strip_comment(line);
        if (!have_vars) {
            if (detail::blank(stripped))
                continue;
            std::istringstream ls(stripped);
            std::string head;
            ls >> head;
            if (head != "vars:")
                throw ParseError("expected 'vars:' header line", line_no, 1);
            std::string name;
            while (ls >> name)
                names.push_back(name);
            if (names.empty())
                throw ParseError("no variables declared", line_no, 1);
            have_vars = true;
            continue;
        }
        rest += stripped;
        rest += "\n";
    }
    if (!have_vars)
        throw Error("system file has no 'vars:' header");
    return parse_system(rest, names);
}

inline PolySystem load_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open system file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_system_text(ss.str());
}

// 17 significant digits: lossless for double
inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct OutputFormat {
    enum Kind { CSV, JSON } kind = CSV;
};

inline std::string branch_csv(const TracedBranch& b, const PolySystem& sys, bool companion) {
    std::string out = "idx";
    for (const auto& n : sys.var_names)
        out += "," + n;
    out += ",residual\n";
    const auto& pts = companion ? b.companion_points : b.curve_points;
    for (size_t i = 0; i < pts.size(); ++i) {
        out += std::to_string(i);
        for (double v : pts[i])
            out += "," + csv_number(v);
        out += "," + csv_number(sys.residual(pts[i]));
        out += "\n";
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write file: " + path);
    out << content;
}

inline void write_branch(const TracedBranch& b, const PolySystem& sys, OutputFormat fmt,
                         const std::string& path) {
    if (fmt.kind == OutputFormat::CSV) {
        write_text_file(path, branch_csv(b, sys, false));
        return;
    }
    nlohmann::json j;
    j["termination"] = termination_name(b.termination);
    j["curve_points"] = b.curve_points;
    j["companion_points"] = b.companion_points;
    write_text_file(path, j.dump(2) + "\n");
}

struct WitnessSummaryRow {
    std::vector<double> x;
    double residual = 0.0;
    double mu = 0.0;
    int degree_index = 0;
    double predicted_exponent = 0.0;
};

struct RunReport {
    std::string command;
    std::string system_path;
    TraceConfig config;
    Verdict verdict;
    bool verdict_valid = false;
    std::vector<WitnessSummaryRow> witnesses;
    std::vector<TracedBranch> branches;
    std::map<std::string, double> timings_ms;
    std::vector<std::string> branch_files;
    std::vector<std::string> companion_files;
};

inline nlohmann::json report_json(const RunReport& r, const PolySystem& sys) {
    nlohmann::json j;
    j["command"] = r.command;
    j["system"] = r.system_path;
    j["vars"] = sys.var_names;
    j["config"] = {
        {"beta", r.config.beta},
        {"lambda", r.config.lambda},
        {"step", r.config.step},
        {"n_points", r.config.n_points},
        {"eps_residual", r.config.eps_residual},
        {"eig_unit_window", r.config.eig_unit_window},
        {"eig_floor", r.config.eig_floor},
        {"seed", r.config.seed},
        {"n_starts", r.config.n_starts},
        {"both_directions", r.config.both_directions},
    };
    if (r.verdict_valid) {
        nlohmann::json v;
        v["kind"] = verdict_name(r.verdict.kind);
        v["mu_bar_min"] = std::isfinite(r.verdict.mu_bar_min)
                              ? nlohmann::json(r.verdict.mu_bar_min)
                              : nlohmann::json(nullptr);
        v["minimizer"] = r.verdict.minimizer;
        v["note"] = "heuristic-certified: multistart upper estimate of the global minimum";
        j["verdict"] = v;
    } else {
        j["verdict"] = nullptr;
    }
    j["witnesses"] = nlohmann::json::array();
    for (const auto& w : r.witnesses)
        j["witnesses"].push_back({{"x", w.x},
                                  {"residual", w.residual},
                                  {"mu", w.mu},
                                  {"degree_index", w.degree_index},
                                  {"predicted_exponent", w.predicted_exponent}});
    j["branches"] = nlohmann::json::array();
    for (size_t i = 0; i < r.branches.size(); ++i) {
        const auto& b = r.branches[i];
        nlohmann::json bj;
        bj["termination"] = termination_name(b.termination);
        bj["n_points"] = b.curve_points.size();
        bj["origin_witness"] = b.origin_witness.x;
        if (i < r.branch_files.size())
            bj["curve_file"] = r.branch_files[i];
        if (i < r.companion_files.size())
            bj["companion_file"] = r.companion_files[i];
        bj["curve_points"] = b.curve_points;
        bj["companion_points"] = b.companion_points;
        j["branches"].push_back(std::move(bj));
    }
    j["timings_ms"] = r.timings_ms;
    return j;
}

// self-contained gnuplot script over the emitted CSVs; 2D for n=2, otherwise
// a 3D projection onto the first three coordinates
inline std::string plot_script(const RunReport& r, const PolySystem& sys) {
    std::string s;
    s += "# gnuplot script; run from the output directory\n";
    s += "set key outside\n";
    bool three_d = sys.n_vars > 2;
    std::string cmd = three_d ? "splot" : "plot";
    std::string cols = three_d ? "2:3:4" : "2:3";
    std::string lines;
    for (size_t i = 0; i < r.branch_files.size(); ++i) {
        if (!lines.empty())
            lines += ", \\\n  ";
        lines += "'" + r.branch_files[i] + "' using " + cols +
                 " with linespoints title 'branch " + std::to_string(i) + "'";
        lines += ", \\\n  '" + r.companion_files[i] + "' using " + cols +
                 " with linespoints title 'companion " + std::to_string(i) + "'";
    }
    if (three_d)
        s += "set xlabel '" + sys.var_names[0] + "'\nset ylabel '" + sys.var_names[1] +
             "'\nset zlabel '" + sys.var_names[2] + "'\n";
    s += cmd + " " + lines + "\n";
    s += "pause -1\n";
    return s;
}

} // namespace rankcurve
