// scsplit: command-line driver for convergence studies, reference solutions,
// stability sweeps and order verification.

#include "scsplit/experiments.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace scsplit;

namespace {

struct GridArgs {
    std::string grid = "100x50";
    double s_max = 0.0;
    double v_max = 5.0;
    double s_stretch = 0.0;
    double v_stretch = 0.0;

    [[nodiscard]] GridParams params() const {
        GridParams p;
        const auto x = grid.find('x');
        if (x == std::string::npos) throw std::invalid_argument("--grid expects M1xM2, got '" + grid + "'");
        p.m1 = std::stoul(grid.substr(0, x));
        p.m2 = std::stoul(grid.substr(x + 1));
        p.s_max = s_max;
        p.v_max = v_max;
        p.s_stretch = s_stretch;
        p.v_stretch = v_stretch;
        return p;
    }
};

void add_grid_options(CLI::App* cmd, GridArgs& g) {
    cmd->add_option("--grid", g.grid, "grid intervals M1xM2")->capture_default_str();
    cmd->add_option("--smax", g.s_max, "truncation in s (default 8K)");
    cmd->add_option("--vmax", g.v_max, "truncation in v")->capture_default_str();
    cmd->add_option("--s-stretch", g.s_stretch, "s-grid stretching (default K/5)");
    cmd->add_option("--v-stretch", g.v_stretch, "v-grid stretching (default V_max/500)");
}

HestonCase resolve_case(const std::string& name, const std::string& case_file) {
    if (case_file.empty()) return heston_case(name);
    for (const auto& c : load_heston_cases(case_file)) {
        if (c.name == name) return c;
    }
    throw std::invalid_argument("case '" + name + "' not found in " + case_file);
}

// "auto" or a step size; returns an explicit step count when one is given.
std::optional<std::int64_t> parse_dtref(const std::string& text, double T) {
    if (text == "auto") return std::nullopt;
    const double dt = std::stod(text);
    if (!(dt > 0.0)) throw std::invalid_argument("--dtref must be positive or 'auto'");
    return static_cast<std::int64_t>(std::llround(std::ceil(T / dt - 1e-9)));
}

// lo:hi:step
std::vector<double> parse_range(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
    if (parts.size() == 1) return parts;
    if (parts.size() != 3) throw std::invalid_argument("range must be a value or lo:hi:step, got '" + text + "'");
    return arithmetic_grid(parts[0], parts[1], parts[2]);
}

void print_records(const std::vector<ConvergenceRecord>& recs) {
    std::printf("%-6s %-6s %8s %6s %14s %14s %10s\n", "case", "method", "theta", "N", "dt", "error", "wall_ms");
    for (const auto& r : recs) {
        std::printf("%-6s %-6s %8.4f %6d %14.6e %14.6e %10.1f%s%s\n", r.problem.c_str(), r.method.c_str(), r.theta,
                    r.N, r.dt, r.error, r.wall_ms, r.failed ? "  FAILED: " : "", r.failed ? r.message.c_str() : "");
    }
}

void print_fit(const std::vector<ConvergenceRecord>& recs) {
    try {
        const auto fit = fit_order_detailed(recs);
        std::printf("fitted order %.3f (rms log residual %.3g, %zu points)%s\n", fit.order, fit.residual, fit.points,
                    errors_monotone(recs) ? "" : ", errors not monotone");
    } catch (const std::invalid_argument& e) {
        std::printf("no order fit: %s\n", e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multistep stabilizing correction splitting: studies and sweeps"};
    app.require_subcommand(1);

    // heston
    auto* heston = app.add_subcommand("heston", "Heston PDE experiments");
    heston->require_subcommand(1);

    auto* run = heston->add_subcommand("run", "convergence study against an MCS reference");
    std::string case_name = "B";
    std::string case_file;
    std::vector<std::string> methods = {"sc2b"};
    std::vector<int> n_list = {8, 16, 32, 64, 128};
    GridArgs grid_args;
    std::string dtref = "auto";
    std::string ref_cache;
    std::string out_csv;
    std::string plot_script;
    unsigned threads = 0;
    bool no_wall = false;
    run->add_option("--case", case_name, "case name (A..F, or a manufactured id)")->capture_default_str();
    run->add_option("--cases", case_file, "JSON case file");
    run->add_option("--method", methods, "sc2a|sc2b|sc2c|sc3b|do|cs|mcs, optionally id:theta")->delimiter(',');
    run->add_option("--N", n_list, "step-count parameters")->delimiter(',');
    add_grid_options(run, grid_args);
    run->add_option("--dtref", dtref, "reference step size or 'auto'")->capture_default_str();
    run->add_option("--ref", ref_cache, "reference cache file (read if present, written otherwise)");
    run->add_option("--out", out_csv, "CSV output");
    run->add_option("--plot", plot_script, "write a plotting script for the CSV");
    run->add_option("--threads", threads, "worker threads (0 = all cores)");
    run->add_flag("--no-wall-time", no_wall, "write wall_ms = 0 for reproducible files");

    auto* reference = heston->add_subcommand("reference", "compute and store a reference vector");
    std::string ref_out;
    reference->add_option("--case", case_name)->capture_default_str();
    reference->add_option("--cases", case_file);
    add_grid_options(reference, grid_args);
    reference->add_option("--dtref", dtref, "reference step size or 'auto'")->capture_default_str();
    reference->add_option("--N", n_list, "N list used by the auto policy")->delimiter(',');
    reference->add_option("--out", ref_out, "output file")->required();

    // stability
    auto* stability = app.add_subcommand("stability", "von Neumann stability experiments");
    stability->require_subcommand(1);
    auto* sweep = stability->add_subcommand("sweep", "estimate theta_min(gamma) by sampling");
    std::string family_text = "bdf2";
    std::string model_text = "advdiff";
    std::string correction_text = "modified";
    std::string gamma_text = "0.5:1.0:0.01";
    std::string theta_text = "0.5:2.0:0.005";
    std::uint64_t samples = 2'000'000;
    std::uint64_t seed = 1;
    std::string curve_out;
    sweep->add_option("--scheme", family_text, "cnlf|bdf2|adams2|bdf3")->capture_default_str();
    sweep->add_option("--model", model_text, "diffusion|advdiff")->capture_default_str();
    sweep->add_option("--correction", correction_text, "modified|standard")->capture_default_str();
    sweep->add_option("--gamma", gamma_text, "lo:hi:step")->capture_default_str();
    sweep->add_option("--theta", theta_text, "lo:hi:step")->capture_default_str();
    sweep->add_option("--samples", samples, "samples per cell")->capture_default_str();
    sweep->add_option("--seed", seed, "random seed")->capture_default_str();
    sweep->add_option("--threads", threads, "worker threads (0 = all cores)");
    sweep->add_option("--out", curve_out, "CSV output");
    sweep->add_option("--plot", plot_script, "write a plotting script for the CSV");

    // verify
    auto* verify = app.add_subcommand("verify", "self checks");
    verify->require_subcommand(1);
    auto* orders = verify->add_subcommand("orders", "fitted orders on manufactured problems");
    std::string suite = "manufactured";
    std::string problem_id = "mixed2d";
    orders->add_option("--suite", suite, "test suite")->check(CLI::IsMember({"manufactured"}))->capture_default_str();
    orders->add_option("--problem", problem_id, "linear4|mixed2d")->capture_default_str();
    std::vector<int> order_n_list = {32, 64, 128, 256, 512};
    orders->add_option("--N", order_n_list, "step-count parameters")->delimiter(',')->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            RunConfig cfg;
            cfg.problem = case_name;
            const auto& ids = manufactured_ids();
            const bool manufactured = std::find(ids.begin(), ids.end(), case_name) != ids.end();
            if (!manufactured) {
                cfg.hcase = resolve_case(case_name, case_file);
                cfg.reference_steps = parse_dtref(dtref, cfg.hcase->T);
            }
            cfg.N_list = n_list;
            cfg.grid = grid_args.params();
            if (!ref_cache.empty()) cfg.reference_file = ref_cache;
            cfg.options.threads = threads;
            cfg.options.wall_time = !no_wall;

            std::vector<ConvergenceRecord> all;
            for (const auto& m : methods) {
                cfg.method = parse_method(m);
                if (cfg.method.multistep) {
                    const auto warn = theta_range_warning(parse_family(cfg.method.scheme.name), cfg.method.theta);
                    if (!warn.empty()) std::fprintf(stderr, "warning: %s\n", warn.c_str());
                }
                auto recs = run_convergence(cfg);
                print_records(recs);
                print_fit(recs);
                all.insert(all.end(), recs.begin(), recs.end());
            }
            if (!out_csv.empty()) write_text_file(out_csv, convergence_csv(all));
            if (!plot_script.empty()) {
                write_text_file(plot_script,
                                convergence_plot_script({out_csv.empty() ? "results.csv" : out_csv}, "convergence.png"));
            }
            return 0;
        }
        if (reference->parsed()) {
            const HestonCase hc = resolve_case(case_name, case_file);
            const HestonGrid grid = build_grid(hc, grid_args.params());
            const HestonSystem hs = assemble(hc, grid);
            const auto steps = reference_steps(n_list, parse_dtref(dtref, hc.T));
            std::printf("case %s, grid %zux%zu, %lld MCS steps\n", hc.name.c_str(), grid.m1(), grid.m2(),
                        static_cast<long long>(steps));
            auto ref = reference_solution(hs.system, initial_vector(hc, grid), hc.T, steps);
            write_reference(ref_out, {static_cast<std::uint32_t>(grid.m1()), static_cast<std::uint32_t>(grid.m2()),
                                      std::move(ref)});
            return 0;
        }
        if (sweep->parsed()) {
            CurveOptions opt;
            opt.family = parse_family(family_text);
            opt.model = parse_model(model_text);
            if (correction_text == "modified") {
                opt.correction = Correction::modified;
            } else if (correction_text == "standard") {
                opt.correction = Correction::standard;
            } else {
                throw std::invalid_argument("--correction must be modified or standard");
            }
            opt.gammas = parse_range(gamma_text);
            opt.thetas = parse_range(theta_text);
            opt.samples = samples;
            opt.seed = seed;
            opt.threads = threads;
            const auto curve = estimate_theta_curve(opt);
            for (const auto& p : curve) {
                if (p.theta_min) {
                    std::printf("gamma %.4f  theta_min %.4f\n", p.gamma, *p.theta_min);
                } else {
                    std::printf("gamma %.4f  theta_min > %.4f\n", p.gamma, opt.thetas.back());
                }
            }
            if (!curve_out.empty()) write_text_file(curve_out, curve_csv(curve));
            if (!plot_script.empty()) {
                write_text_file(plot_script,
                                curve_plot_script(curve_out.empty() ? "curve.csv" : curve_out, "curve.png", opt.family));
            }
            return 0;
        }
        if (orders->parsed()) {
            const auto problem = manufactured_convergence_problem(manufactured_problem(problem_id));
            struct Expect {
                const char* id;
                double order;
                double tol;
            };
            const Expect expect[] = {{"sc2a", 2, 0.15}, {"sc2b", 2, 0.15}, {"sc2c", 2, 0.15}, {"sc3b", 3, 0.2},
                                     {"do", 1, 0.15},   {"cs", 2, 0.15},   {"mcs", 2, 0.15}};
            bool ok = true;
            for (const auto& e : expect) {
                const auto recs = run_convergence(problem, parse_method(e.id), order_n_list, {threads, false});
                double order = std::nan("");
                try {
                    order = fit_order(recs);
                } catch (const std::invalid_argument&) {
                }
                const bool pass = std::abs(order - e.order) <= e.tol;
                ok = ok && pass;
                std::printf("%-5s order %6.3f  expected %.0f +- %.2f  %s\n", e.id, order, e.order, e.tol,
                            pass ? "ok" : "FAIL");
            }
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
