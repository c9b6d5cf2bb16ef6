#pragma once

#include "gham/bvp.hpp"

#include <vector>

namespace gham {

/// Dense LU with scaled partial pivoting. Used as the small-n fallback path
/// and by the dense-collocation baseline.
class DenseLU {
public:
    explicit DenseLU(std::vector<std::vector<double>> a, double pivot_tol = 1e-14);

    int n() const { return n_; }
    std::vector<double> solve(const std::vector<double>& rhs) const;

private:
    int n_ = 0;
    std::vector<std::vector<double>> lu_;
    std::vector<int> perm_;
    std::vector<double> inv_scale_; // row equilibration, by original row index
};

/// One-time factorization of an almost-banded system. The factorization is
/// immutable and may serve concurrent solve() calls.
///
/// Elimination keeps every working row as an explicit band plus K tail
/// coefficients against the original dense boundary rows, so fill stays
/// O(bandwidth + K) per row and solves run in O(n (bandwidth + K)).
class Factorization {
public:
    static constexpr double kPivotTol = 1e-14;

    int n() const { return n_; }
    long long nnz_L() const { return nnz_L_; }
    long long nnz_U() const { return nnz_U_; }

    std::vector<double> solve(const std::vector<double>& rhs) const;

    friend Factorization factorize(const AlmostBandedMatrix& a);

private:
    struct RowOp {
        int pivot_row;
        int target_row;
        double multiplier;
    };
    struct URow {
        int orig_row = -1;
        int start = 0;               // column of band[0]
        std::vector<double> band;    // explicit entries
        std::vector<double> tail;    // coefficients against boundary rows
        double pivot = 0.0;          // entry at the pivot column
    };

    std::vector<double> solve_once(const std::vector<double>& rhs) const;

    int n_ = 0;
    int num_tails_ = 0;
    bool dense_ = false;
    long long nnz_L_ = 0;
    long long nnz_U_ = 0;
    AlmostBandedMatrix matrix_; // original system, kept for iterative refinement
    std::vector<double> inv_scale_; // row equilibration, by original row index
    std::vector<RowOp> ops_;
    std::vector<URow> urows_;                     // indexed by pivot column
    std::vector<std::vector<double>> tails_;      // the K original dense rows
    std::vector<DenseLU> dense_lu_;               // fallback storage (0 or 1)
};

/// Factor once; dense path for n <= 64, almost-banded elimination otherwise.
/// Throws SingularMatrixError when a scaled pivot falls below kPivotTol.
Factorization factorize(const AlmostBandedMatrix& a);

} // namespace gham
