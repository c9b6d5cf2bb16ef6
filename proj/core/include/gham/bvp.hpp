#pragma once

#include "gham/banded.hpp"
#include "gham/chebyshev.hpp"

#include <utility>
#include <vector>

namespace gham {

/// One boundary functional: weight * u^(derivative_order)(point), point = +-1.
struct BoundaryFunctional {
    double point = 1.0;
    int derivative_order = 0;
    double weight = 1.0;
};

/// Order-N linear variable-coefficient BVP: sum_i a_i(x) u^(i) = f,
/// with K boundary functionals B u = c. Coefficients are Chebyshev series.
struct LinearBVP {
    int order = 1;
    std::vector<ChebCoeffs> a; // a[i] multiplies u^(i); size order+1
    ChebCoeffs rhs;
    std::vector<BoundaryFunctional> boundary;
    std::vector<double> c;
};

/// Boundary-bordered system: K dense rows on top of a banded core that holds
/// the first n-K rows of the discretised operator.
struct AlmostBandedMatrix {
    int n = 0;
    std::vector<std::vector<double>> dense_rows;
    BandedOp core; // (n-K) x n

    int num_boundary_rows() const { return static_cast<int>(dense_rows.size()); }
    std::vector<double> apply(const std::vector<double>& x) const;
};

/// Discretise the differential operator of p at resolution n:
/// M_N[a_N] D_N + sum_l S_{N-1}..S_l M_l[a_l] D_l + S_{N-1}..S_0 M_0[a_0].
/// Maps Chebyshev coefficients to C^(N) coefficients.
BandedOp assemble_L(const LinearBVP& p, int n);

/// Dense K x n boundary rows: entry j of row r is the r-th functional applied
/// to T_j, via the closed form for T_j^(d)(+-1).
std::vector<std::vector<double>> boundary_rows(const std::vector<BoundaryFunctional>& b, int n);

/// Full bordered system and right-hand side (c on top, converted f below).
std::pair<AlmostBandedMatrix, std::vector<double>> assemble_system(const LinearBVP& p, int n);

/// Stored-nonzero count over n^2, dense boundary rows included.
double nnz_fraction(const AlmostBandedMatrix& m);

} // namespace gham
