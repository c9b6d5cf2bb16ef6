// gham: benchmark CLI for the sparse spectral homotopy solver.
//
// Subcommands: solve, sweep-hbar, scaling, compare. Exit codes: 0 success,
// 1 invalid configuration or input, 2 tolerance not reached within the
// iteration budget, 3 divergence.

#include <CLI11.hpp>

#include "gham/baselines.hpp"
#include "gham/bench.hpp"
#include "gham/errors.hpp"
#include "gham/ham.hpp"
#include "gham/parallel.hpp"
#include "gham/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitExhausted = 2;
constexpr int kExitDiverged = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<int> n;
    std::optional<std::string> hbar; // numeric or "auto"
    std::optional<std::string> aux;
    std::optional<int> iters;
    std::optional<double> tol;
    std::optional<std::string> solver;
    std::optional<unsigned long> seed;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config_path, "JSON config file");
    cmd->add_option("--out", a.out_dir, "output directory");
    cmd->add_option("--n", a.n, "grid resolution");
    cmd->add_option("--hbar", a.hbar, "convergence-control parameter, or 'auto'");
    cmd->add_option("--aux", a.aux, "auxiliary operator tag")
        ->check(CLI::IsMember({"L1", "L2", "L3", "L4"}));
    cmd->add_option("--iters", a.iters, "maximum iterations");
    cmd->add_option("--tol", a.tol, "residual tolerance");
    cmd->add_option("--solver", a.solver, "solver")
        ->check(CLI::IsMember({"gham", "sham", "newton"}));
    cmd->add_option("--seed", a.seed, "run seed (recorded in run ids)");
}

gham::RunConfig resolve(const CommonArgs& a) {
    gham::RunConfig cfg;
    if (!a.config_path.empty()) cfg = gham::parse_config(a.config_path);
    if (a.n) cfg.n = *a.n;
    if (a.aux) cfg.aux = *a.aux;
    if (a.iters) cfg.iters = *a.iters;
    if (a.tol) cfg.tol = *a.tol;
    if (a.solver) cfg.solver = *a.solver;
    if (a.seed) cfg.seed = *a.seed;
    if (a.hbar) {
        if (*a.hbar == "auto") {
            cfg.hbar_auto = true;
        } else {
            try {
                cfg.hbar = std::stod(*a.hbar);
                cfg.hbar_auto = false;
            } catch (...) {
                throw gham::Error("--hbar must be a number or 'auto'");
            }
        }
    }
    if (cfg.n < 2) throw gham::Error("n must be >= 2");
    if (cfg.iters < 1) throw gham::Error("iters must be >= 1");
    if (cfg.tol <= 0.0) throw gham::Error("tol must be positive");
    return cfg;
}

void ensure_dir(const std::string& dir) { std::filesystem::create_directories(dir); }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double pick_hbar(const gham::NonlinearBVP& p, const gham::RunConfig& cfg) {
    if (!cfg.hbar_auto) return cfg.hbar;
    gham::HbarSweepConfig sw;
    sw.n = cfg.n;
    return gham::optimize_hbar(p, gham::AuxOperatorChoice::named(cfg.aux), sw).hbar_opt;
}

gham::HamResult run_solver(const gham::NonlinearBVP& p, const gham::RunConfig& cfg, double hbar) {
    if (cfg.solver == "gham") {
        gham::HamConfig hc{hbar, cfg.iters, cfg.tol, cfg.n};
        return gham::solve_ham(p, gham::AuxOperatorChoice::named(cfg.aux), hc);
    }
    if (cfg.solver == "sham") {
        gham::HamConfig hc{hbar, cfg.iters, cfg.tol, cfg.n};
        return gham::sham_solve(p, gham::AuxOperatorChoice::named(cfg.aux), hc);
    }
    return gham::newton_solve(p, cfg.n, cfg.tol, cfg.iters);
}

std::vector<gham::BenchRecord> to_records(const gham::HamResult& res, const gham::RunConfig& cfg,
                                          double hbar) {
    std::vector<gham::BenchRecord> rows;
    const std::string id = gham::make_run_id(cfg);
    for (const auto& it : res.diagnostics.per_iteration) {
        gham::BenchRecord r;
        r.run_id = id;
        r.solver = cfg.solver;
        r.aux = cfg.solver == "newton" ? "-" : cfg.aux;
        r.n = cfg.n;
        r.iter = it.iter;
        r.hbar = cfg.solver == "newton" ? 0.0 : hbar;
        r.residual = it.residual;
        r.times = it.cumulative;
        r.converged = res.diagnostics.converged &&
                      it.iter == res.diagnostics.per_iteration.back().iter;
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_solution(const std::string& dir, const gham::ChebCoeffs& u) {
    const int n = u.size();
    auto x = gham::cheb_points(n);
    gham::GridValues vals = gham::coeffs_to_vals(u);
    std::ofstream vf(dir + "/solution_values.csv");
    vf << "x,y\n";
    for (int k = 0; k < n; ++k)
        vf << fmt(x[static_cast<std::size_t>(k)]) << ',' << fmt(vals[k]) << '\n';
    std::ofstream cf(dir + "/solution_coeffs.csv");
    cf << "j,c\n";
    for (int j = 0; j < n; ++j) cf << j << ',' << fmt(u[j]) << '\n';
}

void write_gnuplot_stub(const std::string& dir, const std::string& name, const std::string& csv,
                        const std::string& using_spec, const std::string& title) {
    std::ofstream gp(dir + "/" + name + ".gp");
    gp << "# gnuplot stub: " << title << "\n"
       << "set datafile separator ','\n"
       << "set logscale y\n"
       << "plot '" << csv << "' using " << using_spec << " with linespoints title '" << title
       << "'\n";
}

int cmd_solve(const CommonArgs& args) {
    gham::RunConfig cfg = resolve(args);
    ensure_dir(args.out_dir);
    gham::NonlinearBVP p = gham::make_problem(cfg.problem, cfg.alpha, cfg.re);

    double hbar = 0.0;
    gham::HamResult res;
    try {
        hbar = cfg.solver == "newton" ? 0.0 : pick_hbar(p, cfg);
        res = run_solver(p, cfg, hbar);
    } catch (const gham::AssemblyError& e) {
        // Resolution too low to represent the operator: report and treat as
        // a failure to reach tolerance rather than a configuration error.
        std::cout << "run " << gham::make_run_id(cfg)
                  << ": resolution below threshold, no residual (" << e.what() << ")\n";
        return kExitExhausted;
    } catch (const gham::InvalidResolutionError& e) {
        std::cout << "run " << gham::make_run_id(cfg)
                  << ": resolution below threshold, no residual (" << e.what() << ")\n";
        return kExitExhausted;
    }

    gham::write_csv(args.out_dir + "/run.csv", to_records(res, cfg, hbar));
    write_solution(args.out_dir, res.solution);

    const double r = res.state.residual_trace.empty()
                         ? std::numeric_limits<double>::infinity()
                         : res.state.residual_trace.back();
    double best = r;
    for (double v : res.state.residual_trace) best = std::min(best, v);
    std::cout << "run " << gham::make_run_id(cfg) << ": iterations " << res.state.iterations_done
              << ", hbar " << fmt(hbar) << ", final residual " << fmt(r) << ", best residual "
              << fmt(best) << ", boundary defect " << fmt(gham::boundary_defect(res.solution, p))
              << (res.diagnostics.converged ? " (converged)" : " (budget exhausted)") << "\n";
    return res.diagnostics.converged ? kExitOk : kExitExhausted;
}

int cmd_sweep_hbar(const CommonArgs& args, double lo, double hi, int samples, int probe_iters) {
    gham::RunConfig cfg = resolve(args);
    if (samples < 5) throw gham::Error("sweep-hbar: need at least 5 samples");
    ensure_dir(args.out_dir);
    gham::NonlinearBVP p = gham::make_problem(cfg.problem, cfg.alpha, cfg.re);

    if (cfg.solver == "newton") throw gham::Error("sweep-hbar: newton has no hbar to sweep");
    std::optional<gham::GhamSession> session;
    if (cfg.solver == "gham")
        session.emplace(p, gham::AuxOperatorChoice::named(cfg.aux), cfg.n);
    struct Sample {
        double hbar;
        double residual;
        bool converged;
    };
    std::vector<Sample> out(static_cast<std::size_t>(samples));
    const double step = (hi - lo) / (samples - 1);
    gham::parallel_for(0, samples, [&](int i) {
        const double h = lo + i * step;
        Sample s{h, std::numeric_limits<double>::infinity(), false};
        if (std::abs(h) >= 1e-9) {
            try {
                // The sweep compares errors at a fixed iteration budget, so
                // every sample runs the full budget instead of stopping at
                // the configured tolerance.
                constexpr double kNoStop = 1e-300;
                gham::HamResult res;
                if (session) {
                    res = session->run(h, probe_iters, kNoStop);
                } else {
                    gham::HamConfig hc{h, probe_iters, kNoStop, cfg.n};
                    res = gham::sham_solve(p, gham::AuxOperatorChoice::named(cfg.aux), hc);
                }
                s.residual = res.state.residual_trace.back();
                s.converged = std::isfinite(s.residual) && s.residual < 1.0;
            } catch (const gham::DivergenceError&) {
            } catch (const gham::SingularMatrixError&) {
            }
        }
        out[static_cast<std::size_t>(i)] = s;
    });

    const std::string csv = args.out_dir + "/sweep.csv";
    std::ofstream f(csv);
    f << "# error against hbar at fixed iteration budget, one row per sample\n";
    f << "hbar,iterations,residual,converged\n";
    for (const auto& s : out)
        f << fmt(s.hbar) << ',' << probe_iters << ',' << fmt(s.residual) << ','
          << (s.converged ? 1 : 0) << '\n';
    write_gnuplot_stub(args.out_dir, "sweep", "sweep.csv", "1:3", "residual vs hbar");

    int best = -1;
    for (int i = 0; i < samples; ++i)
        if (std::isfinite(out[static_cast<std::size_t>(i)].residual) &&
            (best < 0 ||
             out[static_cast<std::size_t>(i)].residual < out[static_cast<std::size_t>(best)].residual))
            best = i;
    if (best < 0) {
        std::cout << "sweep: no convergent hbar sample\n";
        return kExitDiverged;
    }
    std::cout << "sweep: minimum residual " << fmt(out[static_cast<std::size_t>(best)].residual)
              << " at hbar " << fmt(out[static_cast<std::size_t>(best)].hbar) << "\n";
    return kExitOk;
}

int cmd_scaling(const CommonArgs& args, const std::string& n_list, int iterations) {
    gham::RunConfig cfg = resolve(args);
    if (iterations < 80) throw gham::Error("scaling: need at least 80 iterations for the fit");
    ensure_dir(args.out_dir);
    gham::NonlinearBVP p = gham::make_problem(cfg.problem, cfg.alpha, cfg.re);

    std::vector<int> ns;
    std::stringstream ss(n_list);
    for (std::string item; std::getline(ss, item, ',');) ns.push_back(std::stoi(item));
    if (ns.empty()) throw gham::Error("scaling: empty n list");
    for (std::size_t i = 1; i < ns.size(); ++i)
        if (ns[i] <= ns[i - 1]) throw gham::Error("scaling: n list must be ascending");

    std::vector<gham::BenchRecord> rows;
    std::cout << "n,iter_exponent_S,R2,total_time_s\n";
    double prev_total = 0.0;
    for (int n : ns) {
        gham::RunConfig c = cfg;
        c.n = n;
        c.tol = 1e-300; // run the full iteration budget
        c.iters = iterations;
        const double hbar = c.solver == "newton" ? 0.0 : (c.hbar_auto ? pick_hbar(p, c) : c.hbar);
        // Timing methodology: 3 warm-up runs discarded, median of 5 reported.
        for (int w = 0; w < 3; ++w) run_solver(p, c, hbar);
        std::vector<gham::HamResult> reps;
        for (int r = 0; r < 5; ++r) reps.push_back(run_solver(p, c, hbar));
        // Scheduling spikes land on single iterations; the per-iteration
        // increment medianed across repetitions is what actually scales.
        auto iter_time = [](const gham::PhaseTimes& t) { return t.solve + t.transform + t.deriv; };
        auto median_of = [](std::vector<double>& v) {
            std::sort(v.begin(), v.end());
            return v[v.size() / 2];
        };
        std::size_t recorded = reps.front().diagnostics.per_iteration.size();
        for (const auto& r : reps)
            recorded = std::min(recorded, r.diagnostics.per_iteration.size());
        std::vector<double> cum(recorded + 1, 0.0);
        for (std::size_t m = 0; m < recorded; ++m) {
            std::vector<double> inc;
            for (const auto& r : reps) {
                const auto& pi = r.diagnostics.per_iteration;
                const double t1 = iter_time(pi[m].cumulative);
                const double t0 = m == 0 ? 0.0 : iter_time(pi[m - 1].cumulative);
                inc.push_back(t1 - t0);
            }
            cum[m + 1] = cum[m] + median_of(inc);
        }
        std::vector<double> setups, factors;
        for (const auto& r : reps) {
            setups.push_back(r.diagnostics.phases.setup);
            factors.push_back(r.diagnostics.phases.factor);
        }
        const double overhead = median_of(setups) + median_of(factors);

        std::sort(reps.begin(), reps.end(), [&](const gham::HamResult& a, const gham::HamResult& b) {
            return a.diagnostics.phases.total() < b.diagnostics.phases.total();
        });
        gham::HamResult res = std::move(reps[reps.size() / 2]);
        auto rec = to_records(res, c, hbar);
        rows.insert(rows.end(), rec.begin(), rec.end());

        // Fit cumulative iteration-phase time over the 40..80 window.
        std::vector<double> xs, ys;
        for (std::size_t m = 1; m <= recorded; ++m) {
            if (m < 40 || m > 80) continue;
            if (cum[m] > 0.0) {
                xs.push_back(static_cast<double>(m));
                ys.push_back(cum[m]);
            }
        }
        // Total cost of a fixed 75-iteration budget: setup + factorization +
        // the median per-iteration time through iteration 75.
        const std::size_t budget = std::min<std::size_t>(75, recorded);
        double total = overhead + cum[budget];
        if (xs.size() >= 2) {
            auto fit = gham::fit_power_law(xs, ys);
            std::cout << n << ',' << fmt(fit.s) << ',' << fmt(fit.r_squared) << ',' << fmt(total);
        } else {
            std::cout << n << ",nan,nan," << fmt(total);
        }
        if (prev_total > 0.0) std::cout << ",ratio=" << fmt(total / prev_total);
        std::cout << "\n";
        prev_total = total;
    }
    gham::write_csv(args.out_dir + "/scaling.csv", rows);
    write_gnuplot_stub(args.out_dir, "scaling", "scaling.csv", "5:($8+$10+$11+$12)",
                       "cumulative iteration time vs iteration");
    return kExitOk;
}

int cmd_compare(const CommonArgs& args, const std::string& solver_list) {
    gham::RunConfig cfg = resolve(args);
    std::vector<std::string> solvers;
    std::stringstream ss(solver_list);
    for (std::string item; std::getline(ss, item, ',');) solvers.push_back(item);
    if (solvers.size() < 2) throw gham::Error("compare: need at least 2 solvers");
    ensure_dir(args.out_dir);
    gham::NonlinearBVP p = gham::make_problem(cfg.problem, cfg.alpha, cfg.re);

    struct Entry {
        std::string solver;
        gham::HamResult res;
        double hbar;
        bool failed = false;
        std::string error;
    };
    std::vector<Entry> entries;
    std::vector<gham::BenchRecord> rows;
    for (const auto& s : solvers) {
        gham::RunConfig c = cfg;
        c.solver = s;
        Entry e;
        e.solver = s;
        e.hbar = s == "newton" ? 0.0 : pick_hbar(p, c);
        try {
            e.res = run_solver(p, c, e.hbar);
            auto rec = to_records(e.res, c, e.hbar);
            rows.insert(rows.end(), rec.begin(), rec.end());
        } catch (const gham::Error& err) {
            e.failed = true;
            e.error = err.what();
        }
        entries.push_back(std::move(e));
    }
    gham::write_csv(args.out_dir + "/compare.csv", rows);

    std::ofstream md(args.out_dir + "/compare.md");
    md << "| solver | iterations | residual | total time (s) | converged |\n";
    md << "|---|---|---|---|---|\n";
    for (const auto& e : entries) {
        if (e.failed) {
            md << "| " << e.solver << " | - | - | - | failed: " << e.error << " |\n";
            continue;
        }
        const auto& tr = e.res.state.residual_trace;
        md << "| " << e.solver << " | " << e.res.state.iterations_done << " | "
           << fmt(tr.empty() ? std::numeric_limits<double>::infinity() : tr.back()) << " | "
           << fmt(e.res.diagnostics.phases.total()) << " | "
           << (e.res.diagnostics.converged ? "yes" : "no") << " |\n";
    }
    md << "\nPairwise max-norm solution differences:\n\n";
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            if (entries[i].failed || entries[j].failed) continue;
            gham::GridValues a = gham::coeffs_to_vals(entries[i].res.solution, cfg.n);
            gham::GridValues b = gham::coeffs_to_vals(entries[j].res.solution, cfg.n);
            double diff = 0.0;
            for (int k = 0; k < cfg.n; ++k) diff = std::max(diff, std::abs(a[k] - b[k]));
            md << "- " << entries[i].solver << " vs " << entries[j].solver << ": " << fmt(diff)
               << "\n";
        }

    std::cout << "compare: wrote " << args.out_dir << "/compare.csv and compare.md\n";
    for (const auto& e : entries)
        if (e.failed) std::cout << "  " << e.solver << " failed: " << e.error << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse spectral homotopy solver benchmark CLI"};
    app.require_subcommand(1);

    CommonArgs solve_args, sweep_args, scaling_args, compare_args;
    double lo = -2.0, hi = 2.0;
    int samples = 41, probe_iters = 25;
    std::string n_list = "64,128,256,512,1024";
    int scaling_iters = 100;
    std::string solver_list = "gham,newton";

    auto* solve = app.add_subcommand("solve", "solve a problem and write solution + records");
    add_common(solve, solve_args);

    auto* sweep = app.add_subcommand("sweep-hbar", "sample residual across hbar");
    add_common(sweep, sweep_args);
    sweep->add_option("--lo", lo, "sweep lower bound");
    sweep->add_option("--hi", hi, "sweep upper bound");
    sweep->add_option("--samples", samples, "number of samples");
    sweep->add_option("--probe-iters", probe_iters, "iterations per sample");

    auto* scaling = app.add_subcommand("scaling", "per-n timings and iteration-exponent fit");
    add_common(scaling, scaling_args);
    scaling->add_option("--n-list", n_list, "comma-separated ascending resolutions");
    scaling->add_option("--iterations", scaling_iters, "fixed iteration count (>= 80)");

    auto* compare = app.add_subcommand("compare", "run several solvers on one problem");
    add_common(compare, compare_args);
    compare->add_option("--solvers", solver_list, "comma-separated solver list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_args);
        if (sweep->parsed()) return cmd_sweep_hbar(sweep_args, lo, hi, samples, probe_iters);
        if (scaling->parsed()) return cmd_scaling(scaling_args, n_list, scaling_iters);
        if (compare->parsed()) return cmd_compare(compare_args, solver_list);
    } catch (const gham::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const gham::SingularMatrixError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const gham::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
