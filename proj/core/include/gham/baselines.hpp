#pragma once

#include "gham/ham.hpp"

#include <vector>

namespace gham {

/// Dense Chebyshev collocation differentiation matrix on the n-point CGL
/// grid (descending order, matching GridValues). Accuracy degrades with n:
/// applying high powers amplifies roundoff by O(n^2) per order, which is the
/// conditioning wall the dense baseline is expected to hit at large n.
std::vector<std::vector<double>> cheb_diff_matrix(int n);

/// Dense collocation discretisation: powers of the differentiation matrix
/// plus the boundary rows that replace edge equations.
struct CollocationOperator {
    int n = 0;
    std::vector<double> x;                                   // CGL nodes
    std::vector<std::vector<std::vector<double>>> D;         // D[k], k = 0..order
    std::vector<int> boundary_row_index;                     // grid row per functional

    /// Build I, D, D^2, ..., D^order and assign boundary rows: conditions at
    /// x = +1 claim rows from the top, conditions at x = -1 from the bottom.
    CollocationOperator(int n, int order, const std::vector<BoundaryFunctional>& boundary);
};

/// Dense-collocation homotopy solve with the same homogenization, iteration
/// and residual metric as the sparse path; only the discretisation differs.
/// The dense operator is factored once and reused across iterations.
/// Throws SingularMatrixError when the collocation matrix degenerates
/// (expected at large n) and DivergenceError when iterates blow up.
HamResult sham_solve(const NonlinearBVP& p, const AuxOperatorChoice& aux, const HamConfig& config);

/// Newton iteration on the sparse spectral discretisation: each step
/// assembles the linearization about the current iterate, factors it fresh
/// and solves for the update. Starts from the homogenization solution of the
/// problem's linear part. diagnostics.factorize_calls counts one per step.
HamResult newton_solve(const NonlinearBVP& p, int n, double tol, int max_iter);

} // namespace gham
