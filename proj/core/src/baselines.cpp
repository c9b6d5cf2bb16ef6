#include "gham/baselines.hpp"
#include "gham/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gham {

namespace {

constexpr double kDivergenceFactor = 1e8;

using Dense = std::vector<std::vector<double>>;

Dense matmul(const Dense& a, const Dense& b) {
    const std::size_t n = a.size();
    Dense out(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i][k];
            if (aik == 0.0) continue;
            const auto& bk = b[k];
            auto& oi = out[i];
            for (std::size_t j = 0; j < n; ++j) oi[j] += aik * bk[j];
        }
    return out;
}

std::vector<double> matvec(const Dense& a, const std::vector<double>& x) {
    std::vector<double> out(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += a[i][j] * x[j];
        out[i] = s;
    }
    return out;
}

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

/// Value-space product terms after the substitution u = v + u0: the original
/// terms plus, for cubics, quadratics with u0-weighted coefficient vectors.
struct ValueTerm {
    std::vector<double> coeff; // values on the grid
    std::vector<int> orders;
};

} // namespace

std::vector<std::vector<double>> cheb_diff_matrix(int n) {
    if (n < 2) throw InvalidResolutionError("cheb_diff_matrix: need n >= 2");
    const auto x = cheb_points(n);
    Dense d(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    auto c = [n](int i) { return (i == 0 || i == n - 1) ? 2.0 : 1.0; };
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double sign = (((i + j) % 2) == 0) ? 1.0 : -1.0;
            const double v = (c(i) / c(j)) * sign /
                             (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
            d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            diag -= v; // negative-sum trick for the diagonal
        }
        d[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = diag;
    }
    return d;
}

CollocationOperator::CollocationOperator(int n_, int order,
                                         const std::vector<BoundaryFunctional>& boundary)
    : n(n_), x(cheb_points(n_)) {
    D.resize(static_cast<std::size_t>(order + 1));
    D[0].assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) D[0][static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    if (order >= 1) D[1] = cheb_diff_matrix(n);
    for (int k = 2; k <= order; ++k)
        D[static_cast<std::size_t>(k)] = matmul(D[1], D[static_cast<std::size_t>(k - 1)]);

    int top = 0, bottom = n - 1;
    for (const auto& b : boundary) {
        if (b.point > 0.0)
            boundary_row_index.push_back(top++);
        else
            boundary_row_index.push_back(bottom--);
    }
    if (top > bottom + 1)
        throw AssemblyError("CollocationOperator: more boundary conditions than grid rows");
}

HamResult sham_solve(const NonlinearBVP& p, const AuxOperatorChoice& aux,
                     const HamConfig& config) {
    const int n = config.n;
    const LinearBVP& lin = p.linear_part;
    const int order = lin.order;
    const int K = static_cast<int>(lin.boundary.size());

    HamResult res;
    PhaseTimes& ph = res.diagnostics.phases;
    Stopwatch sw;

    CollocationOperator op(n, order, lin.boundary);
    const auto& x = op.x;

    auto coeff_values = [&](const ChebCoeffs& c) {
        std::vector<double> v(static_cast<std::size_t>(n));
        if (c.size() == 1) {
            std::fill(v.begin(), v.end(), c[0]);
        } else {
            GridValues g = coeffs_to_vals(c, n);
            v = g.v;
        }
        return v;
    };

    // Dense operator rows of the auxiliary problem (same tag resolution as
    // the sparse path), with boundary functionals replacing edge rows.
    ChebCoeffs u0_ref(n);
    if (aux.tag == "L4") {
        // Reference iterate from the L3 operator, mirroring the sparse path.
        LinearBVP l3 = make_aux_operator(p, AuxOperatorChoice::named("L3"), ChebCoeffs(n), n);
        Dense a3(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
        for (int i = 0; i <= order; ++i) {
            if (is_zero_series(l3.a[static_cast<std::size_t>(i)])) continue;
            auto av = coeff_values(l3.a[static_cast<std::size_t>(i)]);
            for (int r = 0; r < n; ++r)
                for (int cI = 0; cI < n; ++cI)
                    a3[static_cast<std::size_t>(r)][static_cast<std::size_t>(cI)] +=
                        av[static_cast<std::size_t>(r)] *
                        op.D[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)][static_cast<std::size_t>(cI)];
        }
        std::vector<double> rhs3 = coeff_values(lin.rhs);
        for (int b = 0; b < K; ++b) {
            const int r = op.boundary_row_index[static_cast<std::size_t>(b)];
            const auto& bf = lin.boundary[static_cast<std::size_t>(b)];
            const int g = bf.point > 0.0 ? 0 : n - 1; // endpoint grid row
            for (int cI = 0; cI < n; ++cI)
                a3[static_cast<std::size_t>(r)][static_cast<std::size_t>(cI)] =
                    bf.weight *
                    op.D[static_cast<std::size_t>(bf.derivative_order)][static_cast<std::size_t>(g)][static_cast<std::size_t>(cI)];
            rhs3[static_cast<std::size_t>(r)] = lin.c[static_cast<std::size_t>(b)];
        }
        DenseLU lu3(std::move(a3));
        auto v = lu3.solve(rhs3);
        u0_ref = truncate(vals_to_coeffs(GridValues(std::move(v))));
    }
    LinearBVP aux_bvp = make_aux_operator(p, aux, u0_ref, n);

    Dense a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i <= order; ++i) {
        if (is_zero_series(aux_bvp.a[static_cast<std::size_t>(i)])) continue;
        auto av = coeff_values(aux_bvp.a[static_cast<std::size_t>(i)]);
        for (int r = 0; r < n; ++r)
            for (int cI = 0; cI < n; ++cI)
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cI)] +=
                    av[static_cast<std::size_t>(r)] *
                    op.D[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)][static_cast<std::size_t>(cI)];
    }
    std::vector<double> rhs0 = coeff_values(lin.rhs);
    for (int b = 0; b < K; ++b) {
        const int r = op.boundary_row_index[static_cast<std::size_t>(b)];
        const auto& bf = lin.boundary[static_cast<std::size_t>(b)];
        const int g = bf.point > 0.0 ? 0 : n - 1; // endpoint grid row
        for (int cI = 0; cI < n; ++cI)
            a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cI)] =
                bf.weight *
                op.D[static_cast<std::size_t>(bf.derivative_order)][static_cast<std::size_t>(g)][static_cast<std::size_t>(cI)];
        rhs0[static_cast<std::size_t>(r)] = lin.c[static_cast<std::size_t>(b)];
    }
    sw.lap(ph.setup);

    DenseLU lu(std::move(a));
    res.diagnostics.factorize_calls = 1;
    sw.lap(ph.factor);

    std::vector<double> u0 = lu.solve(rhs0);

    // Homogenization in value space: derivative grids of u0, modified linear
    // coefficient vectors, the v-space product terms, and psi_1 = psi - N[u0].
    std::vector<std::vector<double>> du0(static_cast<std::size_t>(order + 1));
    for (int k = 0; k <= order; ++k) du0[static_cast<std::size_t>(k)] = matvec(op.D[static_cast<std::size_t>(k)], u0);

    std::vector<std::vector<double>> abar(static_cast<std::size_t>(order + 1),
                                          std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i <= order; ++i)
        if (!is_zero_series(lin.a[static_cast<std::size_t>(i)]))
            abar[static_cast<std::size_t>(i)] = coeff_values(lin.a[static_cast<std::size_t>(i)]);

    std::vector<ValueTerm> terms;
    std::vector<double> psi1 = coeff_values(lin.rhs);
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int i = 0; i <= order; ++i)
            s += abar[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] *
                 du0[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
        psi1[static_cast<std::size_t>(r)] -= s;
    }
    for (const auto& t : p.terms) {
        auto cv = coeff_values(t.coeff);
        const std::size_t nf = t.orders.size();
        // full nonlinear value of this term at u0 for psi_1
        for (int r = 0; r < n; ++r) {
            double prod = cv[static_cast<std::size_t>(r)];
            for (int d : t.orders) prod *= du0[static_cast<std::size_t>(d)][static_cast<std::size_t>(r)];
            psi1[static_cast<std::size_t>(r)] -= prod;
        }
        // cross terms into the modified coefficients
        for (std::size_t i = 0; i < nf; ++i) {
            const int d = t.orders[i];
            for (int r = 0; r < n; ++r) {
                double w = cv[static_cast<std::size_t>(r)];
                for (std::size_t j = 0; j < nf; ++j)
                    if (j != i) w *= du0[static_cast<std::size_t>(t.orders[j])][static_cast<std::size_t>(r)];
                abar[static_cast<std::size_t>(d)][static_cast<std::size_t>(r)] += w;
            }
        }
        // cubic terms shed u0-weighted quadratics in v
        if (nf == 3) {
            for (std::size_t i = 0; i < 3; ++i) {
                ValueTerm q;
                q.coeff = cv;
                for (int r = 0; r < n; ++r)
                    q.coeff[static_cast<std::size_t>(r)] *=
                        du0[static_cast<std::size_t>(t.orders[i])][static_cast<std::size_t>(r)];
                for (std::size_t j = 0; j < 3; ++j)
                    if (j != i) q.orders.push_back(t.orders[j]);
                terms.push_back(std::move(q));
            }
        }
        terms.push_back({cv, t.orders});
    }

    Dense a1(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i <= order; ++i)
        for (int r = 0; r < n; ++r) {
            const double w = abar[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
            if (w == 0.0) continue;
            for (int cI = 0; cI < n; ++cI)
                a1[static_cast<std::size_t>(r)][static_cast<std::size_t>(cI)] +=
                    w * op.D[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)][static_cast<std::size_t>(cI)];
        }
    sw.lap(ph.setup);

    // Iteration state: V_0 = 0; derivative grids cached per (order, index).
    std::vector<std::vector<double>> history{std::vector<double>(static_cast<std::size_t>(n), 0.0)};
    std::map<int, std::vector<std::vector<double>>> dcache;
    auto dgrid = [&](int d, int j) -> const std::vector<double>& {
        auto& vec = dcache[d];
        Stopwatch dsw;
        while (static_cast<int>(vec.size()) <= j)
            vec.push_back(matvec(op.D[static_cast<std::size_t>(d)],
                                 history[vec.size()]));
        dsw.lap(ph.deriv);
        return vec[static_cast<std::size_t>(j)];
    };

    std::vector<double> usum = u0;
    HamState& state = res.state;
    state.u0 = truncate(vals_to_coeffs(GridValues(u0)));

    // Residual with the discretisation's own derivatives: the same integral
    // metric as the sparse path, but D^k u on the grid instead of spectral
    // coefficient differentiation (which would amplify the dense solver's
    // high-mode noise far beyond the collocation solution's actual defect).
    std::vector<std::vector<double>> avals(static_cast<std::size_t>(order + 1));
    for (int i = 0; i <= order; ++i)
        if (!is_zero_series(lin.a[static_cast<std::size_t>(i)]))
            avals[static_cast<std::size_t>(i)] = coeff_values(lin.a[static_cast<std::size_t>(i)]);
    std::vector<std::vector<double>> tvals;
    for (const auto& t : p.terms) tvals.push_back(coeff_values(t.coeff));
    const std::vector<double> psi_vals = coeff_values(lin.rhs);
    auto grid_residual = [&](const std::vector<double>& u) {
        std::vector<std::vector<double>> du(static_cast<std::size_t>(order + 1));
        for (int k = 0; k <= order; ++k)
            du[static_cast<std::size_t>(k)] = matvec(op.D[static_cast<std::size_t>(k)], u);
        GridValues defect(n);
        for (int r = 0; r < n; ++r) {
            double s = -psi_vals[static_cast<std::size_t>(r)];
            for (int i = 0; i <= order; ++i)
                if (!avals[static_cast<std::size_t>(i)].empty())
                    s += avals[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)] *
                         du[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
            defect[r] = s;
        }
        for (std::size_t t = 0; t < p.terms.size(); ++t)
            for (int r = 0; r < n; ++r) {
                double prod = tvals[t][static_cast<std::size_t>(r)];
                for (int d : p.terms[t].orders)
                    prod *= du[static_cast<std::size_t>(d)][static_cast<std::size_t>(r)];
                defect[r] += prod;
            }
        for (int r = 0; r < n; ++r) defect[r] = std::abs(defect[r]);
        return integrate(defect);
    };

    for (int m = 1; m <= config.max_iterations; ++m) {
        std::vector<double> rm(static_cast<std::size_t>(n), 0.0);
        if (m == 1) rm = psi1;
        for (const auto& t : terms) {
            if (t.orders.size() == 2) {
                for (int j = 0; j < m; ++j) {
                    const auto& va = dgrid(t.orders[0], j);
                    const auto& vb = dgrid(t.orders[1], m - 1 - j);
                    for (int r = 0; r < n; ++r)
                        rm[static_cast<std::size_t>(r)] -= t.coeff[static_cast<std::size_t>(r)] *
                                                           va[static_cast<std::size_t>(r)] *
                                                           vb[static_cast<std::size_t>(r)];
                }
            } else {
                for (int j = 0; j < m; ++j)
                    for (int k = 0; k + j < m; ++k) {
                        const auto& va = dgrid(t.orders[0], j);
                        const auto& vb = dgrid(t.orders[1], k);
                        const auto& vc = dgrid(t.orders[2], m - 1 - j - k);
                        for (int r = 0; r < n; ++r)
                            rm[static_cast<std::size_t>(r)] -= t.coeff[static_cast<std::size_t>(r)] *
                                                               va[static_cast<std::size_t>(r)] *
                                                               vb[static_cast<std::size_t>(r)] *
                                                               vc[static_cast<std::size_t>(r)];
                    }
            }
        }

        Stopwatch isw;
        auto a1v = matvec(a1, history.back());
        std::vector<double> rhs(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r)
            rhs[static_cast<std::size_t>(r)] = rm[static_cast<std::size_t>(r)] - a1v[static_cast<std::size_t>(r)];
        for (int b = 0; b < K; ++b)
            rhs[static_cast<std::size_t>(op.boundary_row_index[static_cast<std::size_t>(b)])] = 0.0;
        auto update = lu.solve(rhs);
        isw.lap(ph.solve);

        const double chi = (m >= 2) ? 1.0 : 0.0;
        std::vector<double> vm(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r)
            vm[static_cast<std::size_t>(r)] = chi * history.back()[static_cast<std::size_t>(r)] +
                                              config.hbar * update[static_cast<std::size_t>(r)];

        const double vnorm = norm_inf(vm);
        if (!std::isfinite(vnorm))
            throw DivergenceError("collocation iterate is non-finite at m=" + std::to_string(m), m,
                                  config.hbar);
        if (m >= 2) {
            const double v1 = norm_inf(history[1]);
            if (v1 > 0.0 && vnorm > kDivergenceFactor * v1)
                throw DivergenceError("collocation iterate diverged at m=" + std::to_string(m), m,
                                      config.hbar);
        }

        for (int r = 0; r < n; ++r) usum[static_cast<std::size_t>(r)] += vm[static_cast<std::size_t>(r)];
        history.push_back(std::move(vm));
        state.iterations_done = m;

        isw.restart();
        const double r = grid_residual(usum);
        isw.lap(ph.transform);
        state.residual_trace.push_back(r);
        res.diagnostics.per_iteration.push_back({m, r, ph});
        if (r <= config.tolerance) {
            res.diagnostics.converged = true;
            break;
        }
    }

    res.solution = vals_to_coeffs(GridValues(usum));
    state.partial_sum = res.solution;
    return res;
}

HamResult newton_solve(const NonlinearBVP& p, int n, double tol, int max_iter) {
    HamResult res;
    PhaseTimes& ph = res.diagnostics.phases;
    Stopwatch sw;

    // Start from the homogenization solution of the problem's linear part.
    LinearBVP aux = make_aux_operator(p, AuxOperatorChoice::named("L2"), ChebCoeffs(n), n);
    auto [sys0, rhs0] = assemble_system(aux, n);
    sw.lap(ph.setup);
    Factorization f0 = factorize(sys0);
    ++res.diagnostics.factorize_calls;
    sw.lap(ph.factor);
    ChebCoeffs u(f0.solve(rhs0));
    sw.lap(ph.solve);

    res.state.u0 = u;
    for (int m = 1; m <= max_iter; ++m) {
        // Linearization about the current iterate; its rhs is psi - N[u] and
        // its boundary data is homogeneous, so u + v keeps B u = c.
        HomogenizedProblem h = homogenize_about(p, u, n);
        auto [sys, rhs] = assemble_system(h.modified_linear, n);
        sw.lap(ph.setup);
        Factorization f = factorize(sys);
        ++res.diagnostics.factorize_calls;
        sw.lap(ph.factor);
        auto v = f.solve(rhs);
        for (int j = 0; j < n; ++j) u[j] += v[static_cast<std::size_t>(j)];
        sw.lap(ph.solve);

        if (!std::isfinite(norm_inf(u.c)))
            throw DivergenceError("Newton iterate is non-finite at step " + std::to_string(m), m,
                                  0.0);

        sw.restart();
        const double r = residual(u, p, n);
        sw.lap(ph.transform);
        res.state.residual_trace.push_back(r);
        res.state.iterations_done = m;
        res.diagnostics.per_iteration.push_back({m, r, ph});
        if (r <= tol) {
            res.diagnostics.converged = true;
            break;
        }
    }
    res.solution = u;
    res.state.partial_sum = u;
    return res;
}

} // namespace gham
