#include "gham/bvp.hpp"
#include "gham/errors.hpp"
#include "gham/operators.hpp"

#include <cmath>

namespace gham {

namespace {

bool is_zero(const ChebCoeffs& c) {
    for (double v : c.c)
        if (v != 0.0) return false;
    return true;
}

// T_j^(d)(1) = prod_{i<d} (j^2 - i^2) / (2i + 1); at -1 multiply by (-1)^(j+d).
double cheb_endpoint_derivative(int j, int d, double point) {
    double val = 1.0;
    for (int i = 0; i < d; ++i)
        val *= (static_cast<double>(j) * j - static_cast<double>(i) * i) / (2.0 * i + 1.0);
    if (point < 0.0 && (j + d) % 2 != 0) val = -val;
    return val;
}

} // namespace

std::vector<double> AlmostBandedMatrix::apply(const std::vector<double>& x) const {
    const int K = num_boundary_rows();
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < K; ++r) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += dense_rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(r)] = s;
    }
    auto core_y = core.apply(x);
    for (int i = 0; i + K < n; ++i) y[static_cast<std::size_t>(i + K)] = core_y[static_cast<std::size_t>(i)];
    return y;
}

BandedOp assemble_L(const LinearBVP& p, int n) {
    const int N = p.order;
    if (static_cast<int>(p.a.size()) != N + 1)
        throw AssemblyError("assemble_L: expected order+1 coefficient functions");
    if (is_zero(p.a[static_cast<std::size_t>(N)]))
        throw AssemblyError("assemble_L: leading coefficient identically zero");
    int max_len = 0;
    for (const auto& ai : p.a) max_len = std::max(max_len, truncate(ai).size());
    if (n <= N + max_len)
        throw AssemblyError("assemble_L: resolution too small for operator order");

    BandedOp L = multiplication_operator(N, p.a[static_cast<std::size_t>(N)], n) * diff_operator(N, n);
    for (int lambda = 1; lambda < N; ++lambda) {
        const auto& al = p.a[static_cast<std::size_t>(lambda)];
        if (is_zero(al)) continue;
        BandedOp term = conversion_chain(lambda, N, n) *
                        (multiplication_operator(lambda, al, n) * diff_operator(lambda, n));
        L += term;
    }
    if (!is_zero(p.a[0])) {
        BandedOp term = conversion_chain(0, N, n) * multiplication_operator(0, p.a[0], n);
        L += term;
    }
    L.compress();
    return L;
}

std::vector<std::vector<double>> boundary_rows(const std::vector<BoundaryFunctional>& b, int n) {
    std::vector<std::vector<double>> rows;
    rows.reserve(b.size());
    for (const auto& f : b) {
        if (f.derivative_order >= n)
            throw AssemblyError("boundary_rows: derivative order exceeds resolution");
        std::vector<double> row(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            row[static_cast<std::size_t>(j)] =
                f.weight * cheb_endpoint_derivative(j, f.derivative_order, f.point);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::pair<AlmostBandedMatrix, std::vector<double>> assemble_system(const LinearBVP& p, int n) {
    const int K = static_cast<int>(p.boundary.size());
    if (K != static_cast<int>(p.c.size()))
        throw AssemblyError("assemble_system: boundary/c length mismatch");

    AlmostBandedMatrix m;
    m.n = n;
    m.dense_rows = boundary_rows(p.boundary, n);
    m.core = assemble_L(p, n).truncated(n - K, n);

    std::vector<double> rhs(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < K; ++r) rhs[static_cast<std::size_t>(r)] = p.c[static_cast<std::size_t>(r)];
    ChebCoeffs f(n);
    const int fl = std::min(n, p.rhs.size());
    for (int j = 0; j < fl; ++j) f[j] = p.rhs[j];
    auto fg = conversion_chain(0, p.order, n).apply(f.c);
    for (int i = 0; i + K < n; ++i) rhs[static_cast<std::size_t>(i + K)] = fg[static_cast<std::size_t>(i)];
    return {std::move(m), std::move(rhs)};
}

double nnz_fraction(const AlmostBandedMatrix& m) {
    long long count = m.core.nnz();
    for (const auto& row : m.dense_rows)
        for (double v : row)
            if (v != 0.0) ++count;
    return static_cast<double>(count) / (static_cast<double>(m.n) * m.n);
}

} // namespace gham
