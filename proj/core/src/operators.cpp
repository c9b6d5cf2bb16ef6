#include "gham/operators.hpp"
#include "gham/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gham {

BandedOp diff_operator(int k, int n) {
    if (k < 1) throw DegenerateOperatorError("diff_operator requires k >= 1");
    if (k >= n) throw DegenerateOperatorError("diff_operator requires n > k");
    double fact = 1.0;
    for (int i = 2; i <= k - 1; ++i) fact *= i;
    const double lead = std::ldexp(fact, k - 1); // 2^(k-1) (k-1)!
    BandedOp op(n, n);
    for (int j = k; j < n; ++j) op.set_entry(j - k, j, lead * j);
    return op;
}

BandedOp conversion_operator(int lambda, int n) {
    if (lambda < 0) throw DegenerateOperatorError("conversion_operator requires lambda >= 0");
    if (n < 2) throw InvalidResolutionError("conversion_operator requires n >= 2");
    BandedOp op(n, n);
    if (lambda == 0) {
        // T_j = (C_j^(1) - C_{j-2}^(1)) / 2 for j >= 2, T_1 = C_1^(1)/2, T_0 = C_0^(1).
        op.set_entry(0, 0, 1.0);
        for (int i = 1; i < n; ++i) op.set_entry(i, i, 0.5);
        for (int i = 0; i + 2 < n; ++i) op.set_entry(i, i + 2, -0.5);
    } else {
        // C_j^(l) = l/(l+j) (C_j^(l+1) - C_{j-2}^(l+1)).
        const double l = lambda;
        for (int i = 0; i < n; ++i) op.set_entry(i, i, l / (l + i));
        for (int i = 0; i + 2 < n; ++i) op.set_entry(i, i + 2, -l / (l + i + 2));
    }
    return op;
}

BandedOp conversion_chain(int lo, int hi, int n) {
    BandedOp chain = BandedOp::identity(n);
    for (int lambda = lo; lambda < hi; ++lambda)
        chain = conversion_operator(lambda, n) * chain;
    return chain;
}

GegenCoeffs cheb_to_gegen(const ChebCoeffs& c, int lambda) {
    // The chain needs at least a 2x2 workspace; trim padding afterwards.
    const int m = std::max(c.size(), 2);
    std::vector<double> padded(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < c.size(); ++j) padded[static_cast<std::size_t>(j)] = c[j];
    auto v = conversion_chain(0, lambda, m).apply(padded);
    v.resize(static_cast<std::size_t>(c.size()));
    return GegenCoeffs(lambda == 0 ? 1 : lambda, std::move(v));
}

namespace {

// Chebyshev multiplication from the product identity
// T_k T_j = (T_{k+j} + T_{|k-j|}) / 2; exact entries of the infinite operator.
BandedOp mult_cheb(const ChebCoeffs& a, int n) {
    const int len = a.size();
    BandedOp op(n, n);
    auto coef = [&](int k) { return (k >= 0 && k < len) ? a[k] : 0.0; };
    for (int i = 0; i < n; ++i) {
        const int j0 = std::max(0, i - len + 1);
        for (int j = j0; j < n; ++j) {
            double v;
            if (i == 0) {
                v = 0.5 * (coef(j) + (j == 0 ? coef(0) : 0.0));
            } else {
                v = 0.5 * ((i >= j ? coef(i - j) : 0.0) + (j >= i ? coef(j - i) : 0.0) +
                           coef(i + j));
            }
            if (v != 0.0) op.set_entry(i, j, v);
            if (j - i >= len) break; // past the upper band
        }
    }
    op.compress();
    return op;
}

// Jacobi-style operator X with X u = coefficients of x*u(x) in C^(lambda):
// x C_j = ((j+1) C_{j+1} + (j+2l-1) C_{j-1}) / (2(j+l)).
BandedOp mult_by_x(int lambda, int n) {
    const double l = lambda;
    BandedOp op(n, n);
    for (int j = 0; j + 1 < n; ++j) op.set_entry(j + 1, j, (j + 1) / (2.0 * (j + l)));
    for (int j = 1; j < n; ++j) op.set_entry(j - 1, j, (j + 2.0 * l - 1.0) / (2.0 * (j + l)));
    return op;
}

} // namespace

BandedOp multiplication_operator(int lambda, const ChebCoeffs& a, int n) {
    ChebCoeffs at = truncate(a);
    const int len = at.size();
    if (len > n)
        throw AssemblyError("multiplication_operator: coefficient function too rich for n");
    if (lambda == 0) return mult_cheb(at, n);

    // Work at a padded size so truncation artifacts from the polynomial
    // recurrence stay below row n, then cut back to n x n.
    const int np = n + len + 2;
    GegenCoeffs ag = cheb_to_gegen(at, lambda);
    BandedOp x = mult_by_x(lambda, np);

    BandedOp acc = BandedOp::identity(np);
    acc *= ag.c[0];
    BandedOp prev = BandedOp::identity(np); // M[C_0]
    BandedOp cur = x;                       // before scaling: M[C_1] = 2*lambda*x
    cur *= 2.0 * lambda;
    if (len > 1) {
        BandedOp term = cur;
        term *= ag.c[1];
        acc += term;
    }
    for (int k = 1; k + 1 < len; ++k) {
        // M[C_{k+1}] = 2(k+l)/(k+1) X M[C_k] - (k+2l-1)/(k+1) M[C_{k-1}]
        BandedOp next = x * cur;
        next *= 2.0 * (k + lambda) / (k + 1.0);
        BandedOp sub = prev;
        sub *= -(k + 2.0 * lambda - 1.0) / (k + 1.0);
        next += sub;
        prev = cur;
        cur = next;
        if (ag.c[static_cast<std::size_t>(k + 1)] != 0.0) {
            BandedOp term = cur;
            term *= ag.c[static_cast<std::size_t>(k + 1)];
            acc += term;
        }
    }
    return acc.truncated(n, n);
}

} // namespace gham
