#pragma once

#include <map>
#include <vector>

namespace gham {

/// Sparse banded operator stored by diagonal. For offset d, bands[d][i] is
/// the entry at (row i, column i + d); invalid positions hold zero.
/// Immutable once built, apart from the assembly helpers below.
class BandedOp {
public:
    BandedOp() = default;
    BandedOp(int rows, int cols) : rows_(rows), cols_(cols) {}

    static BandedOp identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double entry(int i, int j) const;
    void set_entry(int i, int j, double value);
    void add_entry(int i, int j, double value);

    std::vector<int> offsets() const;
    const std::map<int, std::vector<double>>& bands() const { return bands_; }

    std::vector<double> apply(const std::vector<double>& x) const;

    BandedOp& operator+=(const BandedOp& other);
    BandedOp& operator*=(double s);
    friend BandedOp operator*(const BandedOp& a, const BandedOp& b);

    /// Keep the first r rows (the projection P_r followed by embedding).
    BandedOp truncated(int r, int c) const;

    std::vector<std::vector<double>> to_dense() const;

    /// Count of stored entries that are numerically nonzero.
    long long nnz() const;

    /// Drop all-zero diagonals (keeps apply() cost proportional to structure).
    void compress(double tol = 0.0);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::map<int, std::vector<double>> bands_;

    std::vector<double>& band(int offset);
};

} // namespace gham
