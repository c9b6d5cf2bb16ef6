#include "gham/ham.hpp"
#include "gham/errors.hpp"
#include "gham/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gham {

namespace {

constexpr double kDivergenceFactor = 1e8;

double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool is_zero_series(const ChebCoeffs& c) {
    for (double v : c.c)
        if (v != 0.0) return false;
    return true;
}

ChebCoeffs zero_series() { return ChebCoeffs(std::vector<double>{0.0}); }

ChebCoeffs constant_series(double v) { return ChebCoeffs(std::vector<double>{v}); }

ChebCoeffs add_series(const ChebCoeffs& a, const ChebCoeffs& b) {
    ChebCoeffs out(std::max(a.size(), b.size()));
    for (int j = 0; j < a.size(); ++j) out[j] += a[j];
    for (int j = 0; j < b.size(); ++j) out[j] += b[j];
    return out;
}

/// Product of two Chebyshev series via a value-space round trip.
ChebCoeffs cheb_multiply(const ChebCoeffs& a, const ChebCoeffs& b) {
    const int m = fft_grid_size(a.size() + b.size());
    GridValues va = coeffs_to_vals(a, m);
    GridValues vb = coeffs_to_vals(b, m);
    for (int k = 0; k < m; ++k) va[k] *= vb[k];
    return truncate(vals_to_coeffs(va));
}

/// Values of sum_i a_i(x) u^(i)(x) + sum_t coeff(x) prod u^(d) on the m-grid.
GridValues apply_nonlinear_values(const LinearBVP& lin, const std::vector<NonlinearTerm>& terms,
                                  const ChebCoeffs& u, int m) {
    int max_order = lin.order;
    for (const auto& t : terms)
        for (int d : t.orders) max_order = std::max(max_order, d);

    std::vector<GridValues> du(static_cast<std::size_t>(max_order + 1));
    ChebCoeffs dc = u;
    for (int d = 0; d <= max_order; ++d) {
        du[static_cast<std::size_t>(d)] = coeffs_to_vals(dc, m);
        dc = cheb_derivative(dc);
    }

    GridValues out(m);
    for (int i = 0; i <= lin.order; ++i) {
        const auto& ai = lin.a[static_cast<std::size_t>(i)];
        if (is_zero_series(ai)) continue;
        GridValues av = coeffs_to_vals(ai, m);
        for (int k = 0; k < m; ++k) out[k] += av[k] * du[static_cast<std::size_t>(i)][k];
    }
    for (const auto& t : terms) {
        GridValues tv = coeffs_to_vals(t.coeff, m);
        for (int d : t.orders)
            for (int k = 0; k < m; ++k) tv[k] *= du[static_cast<std::size_t>(d)][k];
        for (int k = 0; k < m; ++k) out[k] += tv[k];
    }
    return out;
}

LinearBVP generic_aux(const NonlinearBVP& p, const std::string& tag, const ChebCoeffs& u0_ref) {
    const LinearBVP& lin = p.linear_part;
    LinearBVP aux = lin; // keeps order, rhs, boundary, c
    if (tag == "L1") {
        aux.a.assign(static_cast<std::size_t>(lin.order + 1), zero_series());
        aux.a[static_cast<std::size_t>(lin.order)] = constant_series(1.0);
    } else if (tag == "L2") {
        // the problem's linear part as-is
    } else if (tag == "L3" || tag == "L4") {
        for (const auto& t : p.terms) {
            const int imax = static_cast<int>(std::max_element(t.orders.begin(), t.orders.end()) -
                                              t.orders.begin());
            const int dmax = t.orders[static_cast<std::size_t>(imax)];
            ChebCoeffs add = t.coeff;
            if (tag == "L4") {
                for (std::size_t i = 0; i < t.orders.size(); ++i) {
                    if (static_cast<int>(i) == imax) continue;
                    add = cheb_multiply(add, cheb_derivative(u0_ref, t.orders[i]));
                }
            }
            aux.a[static_cast<std::size_t>(dmax)] =
                add_series(aux.a[static_cast<std::size_t>(dmax)], add);
        }
    } else {
        throw Error("unknown auxiliary operator tag: " + tag);
    }
    return aux;
}

/// Reference iterate for L4 coefficients: the solution of the L3 system.
ChebCoeffs l4_reference(const NonlinearBVP& p, int n) {
    LinearBVP l3 = make_aux_operator(p, AuxOperatorChoice::named("L3"), ChebCoeffs(n), n);
    auto [sys, rhs] = assemble_system(l3, n);
    return ChebCoeffs(factorize(sys).solve(rhs));
}

/// Cap coefficient series so the assembly precondition n > N + len holds at
/// small resolutions; the dropped tail is below the projection anyway.
void cap_coefficient_lengths(LinearBVP& lin, int n) {
    const int cap = std::max(1, n - lin.order - 1);
    for (auto& ai : lin.a) {
        ai = truncate(ai);
        if (ai.size() > cap) ai.c.resize(static_cast<std::size_t>(cap));
    }
}

struct DerivCache {
    // grids[d][j]: values of D^d V_j plus an all-zero flag
    std::map<int, std::vector<GridValues>> grids;
    std::map<int, std::vector<bool>> zero;

    const GridValues& get(int d, int j, const std::vector<ChebCoeffs>& history, int n,
                          PhaseTimes* times) {
        auto& vec = grids[d];
        auto& zv = zero[d];
        while (static_cast<int>(vec.size()) <= j) {
            const int idx = static_cast<int>(vec.size());
            Stopwatch sw;
            ChebCoeffs dc = cheb_derivative(history[static_cast<std::size_t>(idx)], d);
            if (times) sw.lap(times->deriv);
            GridValues gv = coeffs_to_vals(dc, n);
            if (times) sw.lap(times->transform);
            bool z = true;
            for (double x : gv.v)
                if (x != 0.0) {
                    z = false;
                    break;
                }
            vec.push_back(std::move(gv));
            zv.push_back(z);
        }
        return vec[static_cast<std::size_t>(j)];
    }
    bool is_zero(int d, int j) const { return zero.at(d)[static_cast<std::size_t>(j)]; }
};

/// Cauchy-product values of the nonlinearity at homotopy order m.
GridValues cauchy_values(int m, const std::vector<ChebCoeffs>& history,
                         const std::vector<NonlinearTerm>& terms, int n, DerivCache& cache,
                         long long* pair_counter, PhaseTimes* times) {
    GridValues out(n);
    for (const auto& t : terms) {
        GridValues acc(n);
        if (t.orders.size() == 2) {
            const int d1 = t.orders[0], d2 = t.orders[1];
            if (pair_counter) *pair_counter += m / 2; // distinct index pairs {j,k}, j+k=m-1
            for (int j = 0; j < m; ++j) {
                const int k = m - 1 - j;
                cache.get(d1, j, history, n, times);
                cache.get(d2, k, history, n, times);
                if (cache.is_zero(d1, j) || cache.is_zero(d2, k)) continue;
                const auto& a = cache.get(d1, j, history, n, times);
                const auto& b = cache.get(d2, k, history, n, times);
                for (int i = 0; i < n; ++i) acc[i] += a[i] * b[i];
            }
        } else if (t.orders.size() == 3) {
            const int d1 = t.orders[0], d2 = t.orders[1], d3 = t.orders[2];
            for (int j = 0; j < m; ++j) {
                if (cache.get(d1, j, history, n, times), cache.is_zero(d1, j)) continue;
                const auto& a = cache.get(d1, j, history, n, times);
                for (int k = 0; k + j < m; ++k) {
                    const int l = m - 1 - j - k;
                    cache.get(d2, k, history, n, times);
                    cache.get(d3, l, history, n, times);
                    if (cache.is_zero(d2, k) || cache.is_zero(d3, l)) continue;
                    const auto& b = cache.get(d2, k, history, n, times);
                    const auto& c = cache.get(d3, l, history, n, times);
                    for (int i = 0; i < n; ++i) acc[i] += a[i] * b[i] * c[i];
                }
            }
        } else {
            throw StateCorruptionError("nonlinear term must have 2 or 3 factors");
        }
        if (t.coeff.size() == 1) {
            for (int i = 0; i < n; ++i) out[i] += t.coeff[0] * acc[i];
        } else {
            GridValues cv = coeffs_to_vals(t.coeff, n);
            for (int i = 0; i < n; ++i) out[i] += cv[i] * acc[i];
        }
    }
    return out;
}

std::vector<double> rm_build_impl(int m, const std::vector<ChebCoeffs>& history,
                                  const std::vector<NonlinearTerm>& terms, const ChebCoeffs& psi1,
                                  int order, int n, DerivCache& cache, long long* pair_counter,
                                  PhaseTimes* times) {
    if (m < 1) throw StateCorruptionError("rm_build requires m >= 1");
    if (static_cast<int>(history.size()) < m)
        throw StateCorruptionError("rm_build: missing history entry V_" + std::to_string(m - 1));

    const int ng = fft_grid_size(n); // padded work grid keeps the DCT length fast
    GridValues cv = cauchy_values(m, history, terms, ng, cache, pair_counter, times);
    Stopwatch sw;
    ChebCoeffs cc = vals_to_coeffs(cv);
    cc.c.resize(static_cast<std::size_t>(n));
    BandedOp chain = conversion_chain(0, order, n);
    std::vector<double> out = chain.apply(cc.c);
    for (double& v : out) v = -v;
    if (m == 1) {
        ChebCoeffs psi(n);
        const int pl = std::min(n, psi1.size());
        for (int j = 0; j < pl; ++j) psi[j] = psi1[j];
        auto pg = chain.apply(psi.c);
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] += pg[static_cast<std::size_t>(i)];
    }
    if (times) sw.lap(times->transform);
    return out;
}

} // namespace

LinearBVP make_aux_operator(const NonlinearBVP& p, const AuxOperatorChoice& aux,
                            const ChebCoeffs& u0_ref, int n) {
    LinearBVP out;
    if (aux.tag == "custom") {
        if (!aux.custom) throw Error("custom auxiliary operator requested without data");
        out = *aux.custom;
        out.rhs = p.linear_part.rhs;
        out.boundary = p.linear_part.boundary;
        out.c = p.linear_part.c;
    } else if (p.aux_override) {
        out = p.aux_override(aux.tag, u0_ref, n);
    } else {
        out = generic_aux(p, aux.tag, u0_ref);
    }
    cap_coefficient_lengths(out, n);
    return out;
}

HomogenizedProblem homogenize(const NonlinearBVP& p, const AuxOperatorChoice& aux, int n) {
    ChebCoeffs u0_ref(n);
    if (aux.tag == "L4") u0_ref = l4_reference(p, n);
    LinearBVP aux_bvp = make_aux_operator(p, aux, u0_ref, n);
    auto [sys, rhs] = assemble_system(aux_bvp, n);
    ChebCoeffs u0(factorize(sys).solve(rhs));
    return homogenize_about(p, u0, n);
}

HomogenizedProblem homogenize_about(const NonlinearBVP& p, const ChebCoeffs& u0, int n) {
    HomogenizedProblem h;
    h.u0 = u0;

    const LinearBVP& lin = p.linear_part;
    const int N = lin.order;

    // Cross terms of u = v + u0 enter the linear coefficients.
    LinearBVP mod = lin;
    mod.a.resize(static_cast<std::size_t>(N + 1), zero_series());
    for (const auto& t : p.terms) {
        std::vector<ChebCoeffs> du;
        du.reserve(t.orders.size());
        for (int d : t.orders) du.push_back(truncate(cheb_derivative(u0, d)));

        const std::size_t nf = t.orders.size();
        for (std::size_t i = 0; i < nf; ++i) {
            ChebCoeffs add = t.coeff;
            for (std::size_t j = 0; j < nf; ++j)
                if (j != i) add = cheb_multiply(add, du[j]);
            const int d = t.orders[i];
            if (d > N) throw AssemblyError("nonlinear factor order exceeds problem order");
            mod.a[static_cast<std::size_t>(d)] = add_series(mod.a[static_cast<std::size_t>(d)], add);
        }
        // Cubic terms shed quadratic-in-v terms with u0-weighted coefficients.
        if (nf == 3) {
            for (std::size_t i = 0; i < 3; ++i) {
                NonlinearTerm q;
                q.coeff = cheb_multiply(t.coeff, du[i]);
                for (std::size_t j = 0; j < 3; ++j)
                    if (j != i) q.orders.push_back(t.orders[j]);
                h.terms.push_back(std::move(q));
            }
        }
        h.terms.push_back(t); // the pure term in v
    }

    // psi_1 = psi - N[u0], sampled on a refined grid.
    const int m = fft_grid_size(2 * n);
    GridValues nu0 = apply_nonlinear_values(lin, p.terms, u0, m);
    GridValues psi = coeffs_to_vals(lin.rhs, m);
    for (int k = 0; k < m; ++k) psi[k] -= nu0[k];
    ChebCoeffs psi1 = truncate(vals_to_coeffs(psi));
    if (psi1.size() > n) psi1.c.resize(static_cast<std::size_t>(n));

    mod.rhs = psi1;
    mod.c.assign(mod.boundary.size(), 0.0);
    cap_coefficient_lengths(mod, n);
    h.modified_linear = std::move(mod);
    return h;
}

std::vector<double> rm_build(int m, const HamState& state, const std::vector<NonlinearTerm>& terms,
                             const ChebCoeffs& psi1, int order, long long* pair_counter) {
    const int n = state.history.empty() ? state.u0.size() : state.history.front().size();
    DerivCache cache;
    return rm_build_impl(m, state.history, terms, psi1, order, n, cache, pair_counter, nullptr);
}

void ham_step(HamState& state, const Factorization& A, const BandedOp& A1,
              const std::vector<NonlinearTerm>& terms, const ChebCoeffs& psi1,
              const HamConfig& config, int order) {
    const int m = state.iterations_done + 1;
    const int n = A.n();
    const int K = n - A1.rows(); // boundary rows occupy the top of the system
    if (K < 0) throw StateCorruptionError("ham_step: operator taller than the system");
    auto nm = rm_build(m, state, terms, psi1, order, &state.cauchy_pair_count);

    const ChebCoeffs& vprev = state.history.back();
    auto a1v = A1.apply(vprev.c);
    std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i + K < n; ++i)
        rhs[static_cast<std::size_t>(i + K)] =
            nm[static_cast<std::size_t>(i)] - a1v[static_cast<std::size_t>(i)];

    const double chi = (m >= 2) ? 1.0 : 0.0;
    auto update = A.solve(rhs);

    ChebCoeffs vm(n);
    for (int j = 0; j < n; ++j)
        vm[j] = chi * vprev[j] + config.hbar * update[static_cast<std::size_t>(j)];

    double vnorm = norm_inf(vm.c);
    if (!std::isfinite(vnorm))
        throw DivergenceError("homotopy iterate is non-finite at m=" + std::to_string(m), m,
                              config.hbar);
    if (m >= 2 && !state.history.empty()) {
        const double v1 = norm_inf(state.history[1].c);
        if (v1 > 0.0 && vnorm > kDivergenceFactor * v1)
            throw DivergenceError("homotopy iterate diverged at m=" + std::to_string(m), m,
                                  config.hbar);
    }

    for (int j = 0; j < n; ++j) state.partial_sum[j] += vm[j];
    state.history.push_back(std::move(vm));
    state.iterations_done = m;
}

double residual(const ChebCoeffs& u, const NonlinearBVP& p, int n) {
    const int m = fft_grid_size(2 * n);
    GridValues defect = apply_nonlinear_values(p.linear_part, p.terms, u, m);
    GridValues psi = coeffs_to_vals(p.linear_part.rhs, m);
    for (int k = 0; k < m; ++k) defect[k] = std::abs(defect[k] - psi[k]);
    return integrate(defect);
}

double boundary_defect(const ChebCoeffs& u, const NonlinearBVP& p) {
    auto rows = boundary_rows(p.linear_part.boundary, u.size());
    double worst = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double s = 0.0;
        for (int j = 0; j < u.size(); ++j) s += rows[r][static_cast<std::size_t>(j)] * u[j];
        worst = std::max(worst, std::abs(s - p.linear_part.c[r]));
    }
    return worst;
}

GhamSession::GhamSession(const NonlinearBVP& p, const AuxOperatorChoice& aux, int n)
    : problem_(p), n_(n) {
    Stopwatch sw;
    ChebCoeffs u0_ref(n);
    if (aux.tag == "L4") u0_ref = l4_reference(p, n); // setup pre-solve, not the iteration operator
    LinearBVP aux_bvp = make_aux_operator(p, aux, u0_ref, n);
    auto [sys, rhs_u0] = assemble_system(aux_bvp, n);
    sw.lap(setup_times_.setup);

    fact_ = factorize(sys);
    factorize_calls_ = 1;
    sw.lap(setup_times_.factor);

    ChebCoeffs u0(fact_.solve(rhs_u0));
    hom_ = homogenize_about(p, u0, n);
    a1_ = assemble_L(hom_.modified_linear, n);
    sw.lap(setup_times_.setup);
}

HamResult GhamSession::run(double hbar, int max_iterations, double tolerance) const {
    HamResult res;
    HamState& state = res.state;
    state.u0 = hom_.u0;
    state.history.assign(1, ChebCoeffs(n_)); // V_0 = 0
    state.partial_sum = hom_.u0;

    HamDiagnostics& diag = res.diagnostics;
    diag.phases = setup_times_;
    diag.factorize_calls = factorize_calls_;

    const int K = static_cast<int>(problem_.linear_part.boundary.size());
    const int order = problem_.linear_part.order;
    const ChebCoeffs& psi1 = hom_.modified_linear.rhs;
    BandedOp a1_proj = a1_.truncated(n_ - K, n_);

    HamConfig cfg;
    cfg.hbar = hbar;
    cfg.n = n_;

    DerivCache cache;
    for (int m = 1; m <= max_iterations; ++m) {
        PhaseTimes& ph = diag.phases;
        auto nm = rm_build_impl(m, state.history, hom_.terms, psi1, order, n_, cache,
                                &state.cauchy_pair_count, &ph);

        Stopwatch sw;
        auto a1v = a1_proj.apply(state.history.back().c);
        std::vector<double> rhs(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i + K < n_; ++i)
            rhs[static_cast<std::size_t>(i + K)] =
                nm[static_cast<std::size_t>(i)] - a1v[static_cast<std::size_t>(i)];
        auto update = fact_.solve(rhs);
        sw.lap(ph.solve);

        const double chi = (m >= 2) ? 1.0 : 0.0;
        const ChebCoeffs& vprev = state.history.back();
        ChebCoeffs vm(n_);
        for (int j = 0; j < n_; ++j)
            vm[j] = chi * vprev[j] + hbar * update[static_cast<std::size_t>(j)];

        const double vnorm = norm_inf(vm.c);
        if (!std::isfinite(vnorm))
            throw DivergenceError("homotopy iterate is non-finite at m=" + std::to_string(m), m,
                                  hbar);
        if (m >= 2) {
            const double v1 = norm_inf(state.history[1].c);
            if (v1 > 0.0 && vnorm > kDivergenceFactor * v1)
                throw DivergenceError("homotopy iterate diverged at m=" + std::to_string(m), m,
                                      hbar);
        }

        for (int j = 0; j < n_; ++j) state.partial_sum[j] += vm[j];
        state.history.push_back(std::move(vm));
        state.iterations_done = m;

        sw.restart();
        const double r = residual(state.partial_sum, problem_, n_);
        sw.lap(ph.transform);
        state.residual_trace.push_back(r);
        diag.per_iteration.push_back({m, r, ph});

        if (r <= tolerance) {
            diag.converged = true;
            break;
        }
    }

    res.solution = state.partial_sum;
    return res;
}

HamResult solve_ham(const NonlinearBVP& p, const AuxOperatorChoice& aux, const HamConfig& config) {
    if (config.hbar == 0.0) throw Error("solve_ham: hbar must be nonzero");
    if (config.max_iterations < 1) throw Error("solve_ham: max_iterations must be >= 1");
    if (config.tolerance <= 0.0) throw Error("solve_ham: tolerance must be positive");
    GhamSession session(p, aux, config.n);
    return session.run(config.hbar, config.max_iterations, config.tolerance);
}

double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          int iterations) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iterations; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

HbarSweepResult optimize_hbar(const NonlinearBVP& p, const AuxOperatorChoice& aux,
                              const HbarSweepConfig& sweep) {
    if (sweep.samples < 2) throw Error("optimize_hbar: need at least 2 samples");
    GhamSession session(p, aux, sweep.n);

    auto probe = [&](double hbar) -> double {
        if (std::abs(hbar) < sweep.exclusion) return std::numeric_limits<double>::infinity();
        try {
            auto res = session.run(hbar, sweep.probe_iterations, 0.0);
            const double r = res.state.residual_trace.back();
            return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
        } catch (const DivergenceError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    HbarSweepResult out;
    out.curve.resize(static_cast<std::size_t>(sweep.samples));
    const double step = (sweep.hi - sweep.lo) / (sweep.samples - 1);
    for (int i = 0; i < sweep.samples; ++i) {
        const double h = sweep.lo + i * step;
        out.curve[static_cast<std::size_t>(i)] = {h, probe(h)};
    }

    int best = -1;
    for (int i = 0; i < sweep.samples; ++i) {
        const double r = out.curve[static_cast<std::size_t>(i)].second;
        if (std::isfinite(r) && (best < 0 || r < out.curve[static_cast<std::size_t>(best)].second))
            best = i;
    }
    if (best < 0)
        throw NoConvergentHbarError("optimize_hbar: every sampled hbar diverged", out.curve);

    const double lo = out.curve[static_cast<std::size_t>(std::max(0, best - 1))].first;
    const double hi =
        out.curve[static_cast<std::size_t>(std::min(sweep.samples - 1, best + 1))].first;
    out.hbar_opt = golden_section_min(probe, lo, hi, 30);
    if (!std::isfinite(probe(out.hbar_opt)))
        out.hbar_opt = out.curve[static_cast<std::size_t>(best)].first;
    return out;
}

} // namespace gham
