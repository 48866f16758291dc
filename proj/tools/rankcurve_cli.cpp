// rankcurve: witness points, emptiness certificates, beta-refinement and
// companion-curve tracing for real algebraic curves with rank-deficient
// Jacobians.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rankcurve/io.hpp"

using namespace rankcurve;
namespace fs = std::filesystem;

namespace {

struct CliOptions {
    std::string system_path;
    TraceConfig cfg;
    std::string format = "csv";
    std::string out_dir = ".";
    std::string anchor_spec; // optional "v1,v2,..."; empty = seeded draw
    bool emit_plot = false;
    bool quiet = false;
};

std::vector<double> parse_anchor(const std::string& spec, int n) {
    std::vector<double> a;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
        a.push_back(std::strtod(item.c_str(), nullptr));
    if (static_cast<int>(a.size()) != n)
        throw Error("--anchor needs " + std::to_string(n) + " comma-separated values");
    return a;
}

std::vector<double> resolve_anchor(const CliOptions& opt, const PolySystem& sys) {
    if (!opt.anchor_spec.empty())
        return parse_anchor(opt.anchor_spec, sys.n_vars);
    Rng rng(splitmix64(opt.cfg.seed) ^ 0x243f6a8885a308d3ULL);
    return rng.ball_point(sys.n_vars, 1.0);
}

class Stopwatch {
  public:
    Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
    double ms() const {
        auto dt = std::chrono::steady_clock::now() - t0_;
        return std::chrono::duration<double, std::milli>(dt).count();
    }

  private:
    std::chrono::steady_clock::time_point t0_;
};

std::string fmt_vec(const std::vector<double>& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ", ";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v[i]);
        s += buf;
    }
    return s + ")";
}

void fill_witness_rows(RunReport& rep, const PolySystem& sys,
                       const std::vector<CriticalPoint>& witnesses, std::uint64_t seed) {
    for (const auto& w : witnesses) {
        WitnessSummaryRow row;
        row.x = w.x;
        row.residual = w.residual;
        row.mu = w.mu;
        row.degree_index = degree_index_estimate(sys, w.x, 8, seed);
        row.predicted_exponent = predicted_exponent(row.degree_index);
        rep.witnesses.push_back(std::move(row));
    }
}

void write_report(const RunReport& rep, const PolySystem& sys, const CliOptions& opt,
                  const std::map<std::string, double>& timings) {
    fs::create_directories(opt.out_dir);
    nlohmann::json j = report_json(rep, sys);
    write_text_file((fs::path(opt.out_dir) / "report.json").string(), j.dump(2) + "\n");
    if (!opt.quiet)
        for (const auto& [k, v] : timings)
            std::cout << "  " << k << ": " << v << " ms\n";
}

int cmd_witness(const CliOptions& opt) {
    Stopwatch total;
    PolySystem sys = load_system_file(opt.system_path);
    std::vector<double> anchor = resolve_anchor(opt, sys);
    PenaltyProblem prob(sys, anchor, opt.cfg.beta);
    WitnessSet ws = find_witnesses(prob, opt.cfg.n_starts, default_multistart_radius(anchor),
                                   opt.cfg.eps_residual, splitmix64(opt.cfg.seed + 1));
    RunReport rep;
    rep.command = "witness";
    rep.system_path = opt.system_path;
    rep.config = opt.cfg;
    fill_witness_rows(rep, sys, ws.witnesses, opt.cfg.seed);
    if (!opt.quiet) {
        std::cout << "anchor " << fmt_vec(anchor) << ", beta " << opt.cfg.beta << "\n";
        std::cout << ws.all_critical.size() << " critical points, " << ws.witnesses.size()
                  << " witnesses (residual < " << opt.cfg.eps_residual << ")\n";
        std::cout << "note: multistart search; witness coverage is best-effort, not complete\n";
        for (const auto& r : rep.witnesses)
            std::cout << "  x=" << fmt_vec(r.x) << " residual=" << r.residual << " mu=" << r.mu
                      << " predicted witness-error exponent " << r.predicted_exponent << "\n";
    }
    write_report(rep, sys, opt, {{"total", total.ms()}});
    return 0;
}

int cmd_empty(const CliOptions& opt) {
    Stopwatch total;
    PolySystem sys = load_system_file(opt.system_path);
    Verdict v = emptiness_test(sys, opt.cfg.beta, opt.cfg.n_starts, opt.cfg.seed);
    RunReport rep;
    rep.command = "empty";
    rep.system_path = opt.system_path;
    rep.config = opt.cfg;
    rep.verdict = v;
    rep.verdict_valid = true;
    if (!opt.quiet) {
        std::cout << "verdict: " << verdict_name(v.kind) << "\n";
        if (std::isfinite(v.mu_bar_min))
            std::cout << "mu_bar_min estimate: " << v.mu_bar_min << " at "
                      << fmt_vec(v.minimizer) << "\n";
        std::cout << "note: heuristic-certified; multistart gives an upper estimate of the "
                     "global minimum, Empty additionally requires no point at or below 2\n";
    }
    write_report(rep, sys, opt, {{"total", total.ms()}});
    return v.kind == VerdictKind::Empty ? 2 : 0;
}

int cmd_refine(const CliOptions& opt) {
    Stopwatch total;
    PolySystem sys = load_system_file(opt.system_path);
    std::vector<double> anchor = resolve_anchor(opt, sys);
    PenaltyProblem prob(sys, anchor, opt.cfg.beta);
    WitnessSet ws = find_witnesses(prob, opt.cfg.n_starts, default_multistart_radius(anchor),
                                   opt.cfg.eps_residual, splitmix64(opt.cfg.seed + 1));
    RunReport rep;
    rep.command = "refine";
    rep.system_path = opt.system_path;
    rep.config = opt.cfg;
    fill_witness_rows(rep, sys, ws.witnesses, opt.cfg.seed);
    const double beta_hi = opt.cfg.beta * 1e4;
    int idx = 0;
    for (auto& row : rep.witnesses) {
        HomotopyPath path = track_beta(sys, anchor, row.x, 1.0 / opt.cfg.beta, 1.0 / beta_hi);
        double before = row.residual;
        std::vector<double> refined = path.end();
        double after = sys.residual(refined);
        if (!opt.quiet) {
            const char* status = path.status == PathStatus::Completed       ? "completed"
                                 : path.status == PathStatus::SingularStop  ? "singular stop"
                                                                            : "step underflow";
            std::cout << "witness " << idx << ": " << fmt_vec(row.x) << " -> "
                      << fmt_vec(refined) << "  residual " << before << " -> " << after << "  ["
                      << status << ", beta " << opt.cfg.beta << " -> " << beta_hi << "]\n";
        }
        row.x = refined;
        row.residual = after;
        PenaltyProblem hi(sys, anchor, beta_hi);
        row.mu = mu_value(hi, refined);
        ++idx;
    }
    write_report(rep, sys, opt, {{"total", total.ms()}});
    return 0;
}

int cmd_trace(const CliOptions& opt) {
    Stopwatch total;
    PolySystem sys = load_system_file(opt.system_path);
    std::vector<double> anchor = resolve_anchor(opt, sys);
    Stopwatch phase;
    TraceResult res = trace_all_from(sys, opt.cfg, anchor);
    double trace_ms = phase.ms();

    RunReport rep;
    rep.command = "trace";
    rep.system_path = opt.system_path;
    rep.config = opt.cfg;
    rep.verdict = res.verdict;
    rep.verdict_valid = true;
    fill_witness_rows(rep, sys, res.witness_set.witnesses, opt.cfg.seed);
    rep.branches = res.branches;

    fs::create_directories(opt.out_dir);
    if (opt.format == "csv") {
        for (size_t i = 0; i < res.branches.size(); ++i) {
            std::string bf = "branch_" + std::to_string(i) + ".csv";
            std::string cf = "companion_" + std::to_string(i) + ".csv";
            write_text_file((fs::path(opt.out_dir) / bf).string(),
                            branch_csv(res.branches[i], sys, false));
            write_text_file((fs::path(opt.out_dir) / cf).string(),
                            branch_csv(res.branches[i], sys, true));
            rep.branch_files.push_back(bf);
            rep.companion_files.push_back(cf);
        }
    }
    if (!opt.quiet) {
        std::cout << "verdict: " << verdict_name(res.verdict.kind)
                  << " (heuristic-certified; multistart witness search is best-effort)\n";
        std::cout << res.witness_set.witnesses.size() << " witnesses, " << res.branches.size()
                  << " branches after dedup\n";
        for (size_t i = 0; i < res.branches.size(); ++i)
            std::cout << "  branch " << i << ": " << res.branches[i].curve_points.size()
                      << " points, " << termination_name(res.branches[i].termination) << "\n";
    }
    if (opt.emit_plot) {
        if (res.branches.empty()) {
            if (!opt.quiet)
                std::cout << "no branches: plot script skipped\n";
        } else if (opt.format != "csv") {
            if (!opt.quiet)
                std::cout << "plot script needs --format csv: skipped\n";
        } else {
            write_text_file((fs::path(opt.out_dir) / "plot.gp").string(),
                            plot_script(rep, sys));
        }
    }
    write_report(rep, sys, opt, {{"trace", trace_ms}, {"total", total.ms()}});
    return res.verdict.kind == VerdictKind::Empty ? 2 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"companion-curve tracing of rank-deficient real algebraic curves"};
    app.require_subcommand(1);

    CliOptions opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--system", opt.system_path, "system file (.sys)")->required();
        sub->add_option("--beta", opt.cfg.beta, "penalty factor");
        sub->add_option("--lambda", opt.cfg.lambda, "tube contraction in (0,1)");
        sub->add_option("--step", opt.cfg.step, "tracing step size h");
        sub->add_option("--points", opt.cfg.n_points, "points per tracing direction");
        sub->add_option("--eps", opt.cfg.eps_residual, "witness residual tolerance");
        sub->add_option("--starts", opt.cfg.n_starts, "multistart budget");
        sub->add_option("--seed", opt.cfg.seed, "RNG seed; all randomness derives from it");
        sub->add_option("--format", opt.format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--anchor", opt.anchor_spec,
                        "guiding point a as comma-separated values (default: seeded draw)");
        sub->add_flag("--emit-plot", opt.emit_plot, "write a gnuplot script");
        sub->add_option("--both-directions", opt.cfg.both_directions,
                        "trace both directions from each witness");
        sub->add_flag("--quiet", opt.quiet, "suppress stdout summary");
    };

    CLI::App* witness = app.add_subcommand("witness", "find witness points by multistart");
    CLI::App* empty = app.add_subcommand("empty", "sufficient emptiness test");
    CLI::App* refine = app.add_subcommand("refine", "beta-continuation refinement of witnesses");
    CLI::App* trace = app.add_subcommand("trace", "full companion-curve tracing pipeline");
    for (auto* sub : {witness, empty, refine, trace})
        add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        opt.cfg.validate();
        if (app.got_subcommand(witness))
            return cmd_witness(opt);
        if (app.got_subcommand(empty))
            return cmd_empty(opt);
        if (app.got_subcommand(refine))
            return cmd_refine(opt);
        return cmd_trace(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
