#pragma once

// Independent oracles used to pin down expected values in the tests. These
// deliberately use slow, transparent algorithms (direct cosine sums, dense
// Gaussian elimination, monomial-basis calculus) so that agreement with the
// library is evidence rather than tautology.

#include "gham/chebyshev.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Direct O(n^2) DCT-I: Chebyshev coefficients of the CGL interpolant.
inline std::vector<double> cheb_coeffs_direct(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    if (n < 2) throw std::invalid_argument("cheb_coeffs_direct needs n >= 2");
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            const double w = (k == 0 || k == n - 1) ? 0.5 : 1.0;
            s += w * v[static_cast<std::size_t>(k)] * std::cos(kPi * j * k / (n - 1));
        }
        c[static_cast<std::size_t>(j)] = s * 2.0 / (n - 1);
    }
    c[0] *= 0.5;
    c[static_cast<std::size_t>(n - 1)] *= 0.5;
    return c;
}

/// Direct evaluation of a Chebyshev series at x via cos(j arccos x).
inline double cheb_eval_direct(const std::vector<double>& c, double x) {
    const double t = std::acos(std::min(1.0, std::max(-1.0, x)));
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * std::cos(static_cast<double>(j) * t);
    return s;
}

/// Polynomial in the monomial basis; coefficient i multiplies x^i.
struct Poly {
    std::vector<double> a;

    double eval(double x) const {
        double s = 0.0;
        for (std::size_t i = a.size(); i-- > 0;) s = s * x + a[i];
        return s;
    }
    Poly derivative() const {
        if (a.size() <= 1) return {{0.0}};
        Poly d;
        d.a.resize(a.size() - 1);
        for (std::size_t i = 1; i < a.size(); ++i)
            d.a[i - 1] = static_cast<double>(i) * a[i];
        return d;
    }
    Poly derivative(int k) const {
        Poly p = *this;
        for (int i = 0; i < k; ++i) p = p.derivative();
        return p;
    }
    static Poly mul(const Poly& p, const Poly& q) {
        Poly r;
        r.a.assign(p.a.size() + q.a.size() - 1, 0.0);
        for (std::size_t i = 0; i < p.a.size(); ++i)
            for (std::size_t j = 0; j < q.a.size(); ++j) r.a[i + j] += p.a[i] * q.a[j];
        return r;
    }
};

/// T_j in the monomial basis via the recurrence T_{j+1} = 2x T_j - T_{j-1}.
inline Poly chebyshev_T(int j) {
    Poly t0{{1.0}}, t1{{0.0, 1.0}};
    if (j == 0) return t0;
    if (j == 1) return t1;
    for (int i = 2; i <= j; ++i) {
        Poly t2 = Poly::mul(Poly{{0.0, 2.0}}, t1);
        for (std::size_t k = 0; k < t0.a.size(); ++k) t2.a[k] -= t0.a[k];
        t0 = t1;
        t1 = t2;
    }
    return t1;
}

/// Monomial polynomial represented by a Chebyshev series (for small sizes).
inline Poly to_poly(const gham::ChebCoeffs& c) {
    Poly p{{0.0}};
    for (int j = 0; j < c.size(); ++j) {
        Poly t = chebyshev_T(j);
        if (p.a.size() < t.a.size()) p.a.resize(t.a.size(), 0.0);
        for (std::size_t k = 0; k < t.a.size(); ++k) p.a[k] += c[j] * t.a[k];
    }
    return p;
}

/// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const int n = static_cast<int>(a.size());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) >
                std::fabs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(k)]))
                piv = i;
        std::swap(a[static_cast<std::size_t>(k)], a[static_cast<std::size_t>(piv)]);
        std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(piv)]);
        const double d = a[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
        if (d == 0.0) throw std::runtime_error("dense_solve: singular matrix");
        for (int i = k + 1; i < n; ++i) {
            const double m = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] / d;
            if (m == 0.0) continue;
            for (int j = k; j < n; ++j)
                a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
                    m * a[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            b[static_cast<std::size_t>(i)] -= m * b[static_cast<std::size_t>(k)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j)
            s -= a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                 x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] =
            s / a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    return x;
}

/// Dense matrix-vector product.
inline std::vector<double> dense_apply(const std::vector<std::vector<double>>& a,
                                       const std::vector<double>& x) {
    std::vector<double> y(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) y[i] += a[i][j] * x[j];
    return y;
}

/// Least-squares Chebyshev fit of f on an oversampled uniform grid, degree
/// n-1, via dense normal equations. Independent of the DCT path entirely.
inline std::vector<double> lsq_cheb_fit(const std::function<double(double)>& f, int n) {
    const int m = 4 * n + 7;
    std::vector<std::vector<double>> phi(static_cast<std::size_t>(m),
                                         std::vector<double>(static_cast<std::size_t>(n)));
    std::vector<double> y(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        const double x = -1.0 + 2.0 * k / (m - 1);
        y[static_cast<std::size_t>(k)] = f(x);
        const double t = std::acos(std::min(1.0, std::max(-1.0, x)));
        for (int j = 0; j < n; ++j)
            phi[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = std::cos(j * t);
    }
    std::vector<std::vector<double>> ata(static_cast<std::size_t>(n),
                                         std::vector<double>(static_cast<std::size_t>(n), 0.0));
    std::vector<double> atb(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < n; ++i) {
            atb[static_cast<std::size_t>(i)] +=
                phi[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                y[static_cast<std::size_t>(k)];
            for (int j = 0; j < n; ++j)
                ata[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    phi[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                    phi[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
        }
    return dense_solve(std::move(ata), std::move(atb));
}

inline std::mt19937& rng() {
    static std::mt19937 gen(0x5eed1234u);
    return gen;
}

inline std::vector<double> random_vector(int n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = dist(rng());
    return v;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
        m = std::max(m, std::fabs(a[i] - b[i]));
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
    return m;
}

} // namespace oracle
