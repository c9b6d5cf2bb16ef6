#pragma once

#include <functional>
#include <vector>

namespace gham {

/// Coefficients c_j of a Chebyshev T-series, c[j] multiplies T_j.
struct ChebCoeffs {
    std::vector<double> c;

    ChebCoeffs() = default;
    explicit ChebCoeffs(std::vector<double> coeffs) : c(std::move(coeffs)) {}
    explicit ChebCoeffs(int n) : c(static_cast<std::size_t>(n), 0.0) {}

    int size() const { return static_cast<int>(c.size()); }
    double operator[](int j) const { return c[static_cast<std::size_t>(j)]; }
    double& operator[](int j) { return c[static_cast<std::size_t>(j)]; }
};

/// Coefficients of a Gegenbauer C^(lambda) series, lambda a positive integer.
struct GegenCoeffs {
    int lambda = 1;
    std::vector<double> c;

    GegenCoeffs() = default;
    GegenCoeffs(int lambda, std::vector<double> coeffs)
        : lambda(lambda), c(std::move(coeffs)) {}

    int size() const { return static_cast<int>(c.size()); }
};

/// Function values at the n Chebyshev-Gauss-Lobatto points, stored in the
/// grid's native order: index k holds the value at x_k = cos(pi k / (n-1)),
/// so x descends from +1 to -1.
struct GridValues {
    std::vector<double> v;

    GridValues() = default;
    explicit GridValues(std::vector<double> values) : v(std::move(values)) {}
    explicit GridValues(int n) : v(static_cast<std::size_t>(n), 0.0) {}

    int size() const { return static_cast<int>(v.size()); }
    double operator[](int k) const { return v[static_cast<std::size_t>(k)]; }
    double& operator[](int k) { return v[static_cast<std::size_t>(k)]; }
};

/// Chebyshev-Gauss-Lobatto points cos(pi k/(n-1)), k = 0..n-1, descending.
/// Endpoints are exactly +-1 and the grid is exactly antisymmetric.
std::vector<double> cheb_points(int n);

/// Smallest grid size of the form 2^k + 1 that is >= m (and >= 5). A DCT-I on
/// such a grid has a power-of-two logical FFT length; other sizes (notably
/// 2^k with 2^k - 1 prime) can be orders of magnitude slower.
int fft_grid_size(int m);

/// Value -> coefficient transform on the CGL grid (DCT-I).
ChebCoeffs vals_to_coeffs(const GridValues& v);

/// Coefficient -> value transform; inverse of vals_to_coeffs.
GridValues coeffs_to_vals(const ChebCoeffs& c);

/// Evaluate a padded/truncated copy of c on the n-point CGL grid.
GridValues coeffs_to_vals(const ChebCoeffs& c, int n);

/// Clenshaw evaluation of a Chebyshev series at x.
double cheb_eval(const ChebCoeffs& c, double x);

/// Coefficients of the k-th derivative (Chebyshev recurrence), same length.
ChebCoeffs cheb_derivative(const ChebCoeffs& c, int k = 1);

/// C_j^(lambda)(x) by the three-term recurrence, lambda >= 1, |x| <= 1.
double gegenbauer_eval(int lambda, int j, double x);

/// Evaluate a Gegenbauer series at x by forward recurrence.
double gegen_series_eval(const GegenCoeffs& g, double x);

/// Integral over [-1,1] of the CGL interpolant (Clenshaw-Curtis).
double integrate(const GridValues& v);

/// Drop trailing coefficients below rel_tol * max|c|; keeps at least one.
ChebCoeffs truncate(const ChebCoeffs& c, double rel_tol = 1e-14);

/// Sample f on the n-point grid and transform to coefficients.
ChebCoeffs sample(const std::function<double(double)>& f, int n);

} // namespace gham
