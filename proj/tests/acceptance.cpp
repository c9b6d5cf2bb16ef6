// Top-level acceptance checks, one PASS/FAIL line each. Exits nonzero when
// any check fails so the test driver surfaces regressions.

#include "gham/baselines.hpp"
#include "gham/bench.hpp"
#include "gham/chebyshev.hpp"
#include "gham/errors.hpp"
#include "gham/ham.hpp"
#include "gham/operators.hpp"
#include "gham/problems.hpp"
#include "gham/solver.hpp"
#include "gham/timing.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

using namespace gham;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("criterion %2d [%s] %s: %s\n", index, pass ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

/// Iterations needed to push the residual to the target, or INT_MAX.
int iterations_to(const GhamSession& session, double hbar, double target, int budget) {
    try {
        auto res = session.run(hbar, budget, target);
        if (!res.diagnostics.converged) return std::numeric_limits<int>::max();
        return res.state.iterations_done;
    } catch (const Error&) {
        return std::numeric_limits<int>::max();
    }
}

// ---- criterion 1: convergence to machine precision ------------------------

void criterion_convergence(const NonlinearBVP& p) {
    HamConfig cfg;
    cfg.hbar = 1.0; // tuned value for L4
    cfg.n = 512;
    cfg.max_iterations = 25;
    cfg.tolerance = 1e-12;
    bool pass = false;
    char detail[160];
    try {
        Stopwatch sw;
        auto res = solve_ham(p, AuxOperatorChoice::named("L4"), cfg);
        const double t = sw.seconds();
        pass = res.diagnostics.converged && res.state.residual_trace.back() <= 1e-12;
        std::snprintf(detail, sizeof detail,
                      "L4 n=512 hbar=1: residual %.2e in %d iterations (%.2fs)",
                      res.state.residual_trace.back(), res.state.iterations_done, t);
    } catch (const Error& e) {
        std::snprintf(detail, sizeof detail, "threw: %s", e.what());
    }
    report(1, "convergence to machine precision", pass, detail);
}

// ---- criterion 2: operator ranking ----------------------------------------

void criterion_ranking(const NonlinearBVP& p) {
    const int n = 512;
    HbarSweepConfig sweep;
    sweep.n = n;
    sweep.probe_iterations = 25;

    int counts[4] = {0, 0, 0, 0};
    const char* tags[4] = {"L1", "L2", "L3", "L4"};
    double opts[4] = {0, 0, 0, 0};
    for (int i = 0; i < 4; ++i) {
        GhamSession session(p, AuxOperatorChoice::named(tags[i]), n);
        auto r = optimize_hbar(p, AuxOperatorChoice::named(tags[i]), sweep);
        opts[i] = r.hbar_opt;
        counts[i] = iterations_to(session, r.hbar_opt, 1e-10, 150);
    }
    bool pass = counts[3] < std::numeric_limits<int>::max();
    char detail[240];
    std::string ratios;
    for (int i = 0; i < 3 && pass; ++i) {
        const double ratio = static_cast<double>(counts[i]) / counts[3];
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s %.2fx ", tags[i], ratio);
        ratios += buf;
        if (!(ratio >= 2.5 && ratio <= 4.0)) pass = false;
    }
    std::snprintf(detail, sizeof detail,
                  "iterations to 1e-10 at own optima: L1=%d L2=%d L3=%d L4=%d "
                  "(hbar %.2f/%.2f/%.2f/%.2f); ratios vs L4 must lie in [2.5, 4]",
                  counts[0], counts[1], counts[2], counts[3], opts[0], opts[1], opts[2], opts[3]);
    report(2, "operator ranking", pass, detail);
}

// ---- criterion 3: hbar_opt location and unimodality ------------------------

void criterion_hbar_opt(const NonlinearBVP& p) {
    HbarSweepConfig sweep;
    sweep.n = 512;
    sweep.probe_iterations = 25;
    bool pass = false;
    char detail[240];
    try {
        auto r = optimize_hbar(p, AuxOperatorChoice::named("L2"), sweep);

        // Unimodality over the contiguous convergent stretch of the curve.
        int minima = 0;
        const auto& c = r.curve;
        for (std::size_t i = 1; i + 1 < c.size(); ++i) {
            if (!std::isfinite(c[i - 1].second) || !std::isfinite(c[i].second) ||
                !std::isfinite(c[i + 1].second))
                continue;
            if (c[i].second < c[i - 1].second && c[i].second < c[i + 1].second) ++minima;
        }
        const bool located = std::fabs(r.hbar_opt - 0.75) <= 0.15;
        pass = located && minima == 1;
        std::snprintf(detail, sizeof detail,
                      "L2 sweep minimum at hbar=%.3f (want 0.75 +- 0.15); local minima in "
                      "convergent interval: %d (want 1)",
                      r.hbar_opt, minima);
    } catch (const Error& e) {
        std::snprintf(detail, sizeof detail, "threw: %s", e.what());
    }
    report(3, "hbar_opt location", pass, detail);
}

// ---- criterion 4: resolution plateau ---------------------------------------

void criterion_plateau(const NonlinearBVP& p) {
    double lo = 1e300, hi = 0.0;
    bool plateau_ok = true;
    for (int n = 32; n <= 1024; n *= 2) {
        HamConfig cfg;
        cfg.hbar = 1.0;
        cfg.n = n;
        cfg.max_iterations = 40;
        // Converged residual at the same tolerance criterion 1 uses; every
        // resolution stops at the same iteration, so the spread measures the
        // plateau rather than where an early stop happened to land.
        cfg.tolerance = 1e-12;
        try {
            auto res = solve_ham(p, AuxOperatorChoice::named("L4"), cfg);
            if (!res.diagnostics.converged) plateau_ok = false;
            const double r = res.state.residual_trace.back();
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        } catch (const Error&) {
            plateau_ok = false;
        }
    }
    plateau_ok = plateau_ok && hi / lo < 10.0;

    // Below the resolution threshold the method cannot reach 1e-6.
    double best8 = 1e300;
    try {
        HamConfig cfg;
        cfg.hbar = 1.0;
        cfg.n = 8;
        cfg.max_iterations = 200;
        cfg.tolerance = 1e-13;
        auto res = solve_ham(p, AuxOperatorChoice::named("L4"), cfg);
        for (double r : res.state.residual_trace) best8 = std::min(best8, r);
    } catch (const Error&) {
        // failing to run at all also fails to reach 1e-6
    }
    const bool below_ok = best8 > 1e-6;
    char detail[200];
    std::snprintf(detail, sizeof detail,
                  "converged residual spread %.2e..%.2e over n=2^5..2^10 (ratio %.2f < 10); "
                  "best at n=2^3: %.2e > 1e-6",
                  lo, hi, hi / lo, best8);
    report(4, "resolution plateau", plateau_ok && below_ok, detail);
}

// ---- criteria 5: quasi-linear scaling --------------------------------------

struct ScalingSample {
    int n;
    double total75 = 0.0; // setup + factor + 75 iterations of median cost
    double s_fit = 0.0;
};

ScalingSample measure_scaling(const NonlinearBVP& p, int n) {
    GhamSession session(p, AuxOperatorChoice::named("L4"), n);
    const int iters = 100;
    session.run(1.0, iters, 1e-300); // warm-up
    std::vector<HamResult> reps;
    for (int r = 0; r < 5; ++r) reps.push_back(session.run(1.0, iters, 1e-300));

    auto iter_time = [](const PhaseTimes& t) { return t.solve + t.transform + t.deriv; };
    std::vector<double> cum(static_cast<std::size_t>(iters) + 1, 0.0);
    for (int m = 0; m < iters; ++m) {
        std::vector<double> inc;
        for (const auto& r : reps) {
            const auto& pi = r.diagnostics.per_iteration;
            const double t1 = iter_time(pi[static_cast<std::size_t>(m)].cumulative);
            const double t0 =
                m == 0 ? 0.0 : iter_time(pi[static_cast<std::size_t>(m - 1)].cumulative);
            inc.push_back(t1 - t0);
        }
        cum[static_cast<std::size_t>(m) + 1] = cum[static_cast<std::size_t>(m)] + median(inc);
    }
    std::vector<double> xs, ys;
    for (int m = 40; m <= 80; ++m) {
        xs.push_back(m);
        ys.push_back(cum[static_cast<std::size_t>(m)]);
    }
    ScalingSample out;
    out.n = n;
    out.s_fit = fit_power_law(xs, ys).s;
    out.total75 = session.setup_times().setup + session.setup_times().factor +
                  cum[75];
    return out;
}

void criterion_scaling(const NonlinearBVP& p) {
    std::vector<ScalingSample> samples;
    for (int n : {1024, 2048, 4096, 8192}) samples.push_back(measure_scaling(p, n));

    bool ratios_ok = true;
    std::string ratio_text;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double ratio = samples[i].total75 / samples[i - 1].total75;
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.2f ", ratio);
        ratio_text += buf;
        if (ratio > 3.0) ratios_ok = false;
    }
    bool s_ok = true;
    std::string s_text;
    for (const auto& s : samples) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.2f ", s.s_fit);
        s_text += buf;
        if (std::fabs(s.s_fit - 1.0) > 0.15) s_ok = false;
    }
    const std::string detail = "75-iteration total time doubling ratios (2^10..2^13): " +
                               ratio_text + "(each <= 3); iteration exponents S: " + s_text +
                               "(each within 1 +- 0.15)";
    report(5, "quasi-linear scaling", ratios_ok && s_ok, detail);
}

// ---- criterion 6: factorization cost exponent -------------------------------

void criterion_factor_cost(const NonlinearBVP& p) {
    std::vector<double> xs, ys;
    for (int n = 256; n <= 8192; n *= 2) {
        LinearBVP aux = make_aux_operator(p, AuxOperatorChoice::named("L2"), ChebCoeffs(n), n);
        auto [sys, rhs] = assemble_system(aux, n);
        factorize(sys); // warm-up
        std::vector<double> times;
        for (int r = 0; r < 5; ++r) {
            Stopwatch sw;
            factorize(sys);
            times.push_back(sw.seconds());
        }
        xs.push_back(n);
        ys.push_back(median(times));
    }
    auto fit = fit_power_law(xs, ys);
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "factorize time exponent over n=2^8..2^13: %.3f (R^2 %.3f, want <= 1.6)",
                  fit.s, fit.r_squared);
    report(6, "factorization cost exponent", fit.s <= 1.6, detail);
}

// ---- criterion 7: sparsity ---------------------------------------------------

void criterion_sparsity(const NonlinearBVP& p) {
    const int n = 512;
    LinearBVP aux = make_aux_operator(p, AuxOperatorChoice::named("L2"), ChebCoeffs(n), n);
    auto [sys, rhs] = assemble_system(aux, n);
    const double f = nnz_fraction(sys);
    char detail[120];
    std::snprintf(detail, sizeof detail,
                  "nnz fraction of the fourth-order system at n=512: %.4f (want 0.01..0.05)", f);
    report(7, "sparsity", f >= 0.01 && f <= 0.05, detail);
}

// ---- criterion 8: dense-baseline contrast ------------------------------------

double sham_floor(const NonlinearBVP& p, int n) {
    double best = std::numeric_limits<double>::infinity();
    for (double hbar = 0.2; hbar <= 1.4001; hbar += 0.15) {
        HamConfig cfg;
        cfg.hbar = hbar;
        cfg.n = n;
        cfg.max_iterations = 60;
        cfg.tolerance = 1e-14;
        try {
            auto res = sham_solve(p, AuxOperatorChoice::named("L4"), cfg);
            for (double r : res.state.residual_trace) best = std::min(best, r);
        } catch (const Error&) {
            // divergent or singular sample; the floor stands
        }
    }
    return best;
}

void criterion_dense_contrast(const NonlinearBVP& p) {
    const double floor256 = sham_floor(p, 256);
    const double floor512 = sham_floor(p, 512);
    const double floor1024 = sham_floor(p, 1024);
    const bool floor_ok = floor256 >= 1e-11;
    const bool degrade_ok = !std::isfinite(floor1024) || floor1024 > floor512;

    bool gham_ok = false;
    double r16k = std::numeric_limits<double>::infinity();
    try {
        HamConfig cfg;
        cfg.hbar = 1.0;
        cfg.n = 16384;
        cfg.max_iterations = 40;
        cfg.tolerance = 1e-11;
        auto res = solve_ham(p, AuxOperatorChoice::named("L4"), cfg);
        r16k = res.state.residual_trace.back();
        gham_ok = res.diagnostics.converged;
    } catch (const Error&) {
    }
    char detail[240];
    std::snprintf(detail, sizeof detail,
                  "dense floors: n=2^8 %.2e (>= 1e-11), n=2^9 %.2e, n=2^10 %.2e (degrades); "
                  "sparse path at n=2^14: residual %.2e",
                  floor256, floor512, floor1024, r16k);
    report(8, "dense-baseline contrast", floor_ok && degrade_ok && gham_ok, detail);
}

// ---- criterion 9: cross-solver oracle -----------------------------------------

void criterion_cross_solver(const NonlinearBVP& p) {
    bool pass = true;
    std::string text;
    for (int n : {128, 256, 512}) {
        HamConfig cfg;
        cfg.hbar = 1.0;
        cfg.n = n;
        cfg.max_iterations = 40;
        cfg.tolerance = 1e-12;
        auto gham = solve_ham(p, AuxOperatorChoice::named("L4"), cfg);
        auto newton = newton_solve(p, n, 1e-12, 10);
        double diff = 0.0;
        for (double x = -1.0; x <= 1.0; x += 1.0 / 64.0)
            diff = std::max(diff,
                            std::fabs(cheb_eval(gham.solution, x) - cheb_eval(newton.solution, x)));
        char buf[64];
        std::snprintf(buf, sizeof buf, "n=%d %.1e ", n, diff);
        text += buf;
        if (diff > 1e-8) pass = false;
    }
    report(9, "cross-solver oracle", pass, "GHAM-L4 vs Newton max-norm: " + text + "(each <= 1e-8)");
}

// ---- criterion 10: property suites ---------------------------------------------

void criterion_properties(const NonlinearBVP& p) {
    bool pass = true;
    std::string failures;
    auto require = [&](bool ok, const char* what) {
        if (!ok) {
            pass = false;
            failures += std::string(" ") + what;
        }
    };

    // Spectral-core oracles.
    {
        GridValues v(oracle::random_vector(129));
        auto fast = vals_to_coeffs(v);
        require(oracle::max_abs_diff(fast.c, oracle::cheb_coeffs_direct(v.v)) < 1e-12,
                "transform-oracle");
        auto round = coeffs_to_vals(fast);
        require(oracle::max_abs_diff(round.v, v.v) < 1e-13, "transform-roundtrip");

        ChebCoeffs c(oracle::random_vector(12));
        auto d = diff_operator(2, 12).apply(c.c);
        oracle::Poly want = oracle::to_poly(c).derivative(2);
        bool diff_ok = true;
        for (double x : {-0.9, 0.1, 0.8})
            diff_ok = diff_ok && std::fabs(gegen_series_eval(GegenCoeffs(2, d), x) -
                                           want.eval(x)) < 1e-10;
        require(diff_ok, "differentiation-oracle");

        ChebCoeffs a(oracle::random_vector(6));
        auto m = multiplication_operator(0, a, 24);
        ChebCoeffs u(oracle::random_vector(16));
        u.c.resize(24, 0.0);
        auto prod = m.apply(u.c);
        bool mult_ok = true;
        for (double x : {-0.7, 0.33})
            mult_ok = mult_ok && std::fabs(oracle::cheb_eval_direct(prod, x) -
                                           cheb_eval(a, x) * cheb_eval(u, x)) < 1e-10;
        require(mult_ok, "multiplication-oracle");
    }

    // Manufactured-solution recovery for all four auxiliary operators.
    for (const char* tag : {"L1", "L2", "L3", "L4"}) {
        const int n = 64;
        ChebCoeffs u0_ref(n);
        if (std::string(tag) == "L4") {
            auto h = homogenize(p, AuxOperatorChoice::named("L3"), n);
            u0_ref = h.u0;
        }
        LinearBVP aux = make_aux_operator(p, AuxOperatorChoice::named(tag), u0_ref, n);
        ChebCoeffs target(oracle::random_vector(9));
        auto lv = assemble_L(aux, n).apply([&] {
            auto v = target.c;
            v.resize(static_cast<std::size_t>(n), 0.0);
            return v;
        }());
        LinearBVP q = aux;
        q.rhs = sample([&](double x) { return gegen_series_eval(GegenCoeffs(4, lv), x); }, n - 5);
        for (std::size_t r = 0; r < q.boundary.size(); ++r) {
            oracle::Poly drv = oracle::to_poly(target).derivative(q.boundary[r].derivative_order);
            q.c[r] = q.boundary[r].weight * drv.eval(q.boundary[r].point);
        }
        auto [sys, rhs] = assemble_system(q, n);
        ChebCoeffs got(factorize(sys).solve(rhs));
        bool ok = true;
        for (double x : {-0.8, -0.1, 0.66})
            ok = ok && std::fabs(cheb_eval(got, x) - oracle::to_poly(target).eval(x)) < 1e-10;
        require(ok, (std::string("manufactured-") + tag).c_str());
    }

    // Single factorization, homogeneous boundaries, Cauchy pair count.
    {
        GhamSession session(p, AuxOperatorChoice::named("L2"), 128);
        auto res = session.run(0.6, 16, 1e-300);
        require(res.diagnostics.factorize_calls == 1, "single-factorization");

        auto rows = boundary_rows(p.linear_part.boundary, 128);
        bool hom_ok = true;
        for (std::size_t m = 1; m < res.state.history.size(); ++m)
            for (const auto& row : rows) {
                double s = 0.0;
                for (int j = 0; j < 128; ++j)
                    s += row[static_cast<std::size_t>(j)] * res.state.history[m][j];
                hom_ok = hom_ok && std::fabs(s) < 1e-12;
            }
        require(hom_ok, "homogeneous-boundary");

        const long long m = res.state.iterations_done;
        require(res.state.cauchy_pair_count == 2 * (m * m / 4), "cauchy-pair-count");
    }

    report(10, "property suites", pass,
           pass ? "transform/differentiation/multiplication oracles, manufactured solutions "
                  "(L1..L4), single factorization, homogeneous boundaries, pair-count law"
                : "failing:" + failures);
}

} // namespace

int main() {
    NonlinearBVP p = porous_wall(1.0, 10.0);
    criterion_convergence(p);
    criterion_ranking(p);
    criterion_hbar_opt(p);
    criterion_plateau(p);
    criterion_scaling(p);
    criterion_factor_cost(p);
    criterion_sparsity(p);
    criterion_dense_contrast(p);
    criterion_cross_solver(p);
    criterion_properties(p);
    if (g_failures > 0) {
        std::printf("%d of 10 criteria failed\n", g_failures);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}
