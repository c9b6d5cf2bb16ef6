#include "gham/solver.hpp"
#include "gham/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gham {

DenseLU::DenseLU(std::vector<std::vector<double>> a, double pivot_tol)
    : n_(static_cast<int>(a.size())), lu_(std::move(a)), perm_(static_cast<std::size_t>(n_)),
      inv_scale_(static_cast<std::size_t>(n_), 1.0) {
    // Equilibrate rows so pivoting and the error bound see O(1) entries; the
    // original row scales are folded back into the right-hand side in solve().
    for (int i = 0; i < n_; ++i) {
        double s = 0.0;
        for (double v : lu_[static_cast<std::size_t>(i)]) s = std::max(s, std::abs(v));
        if (s == 0.0) throw SingularMatrixError("DenseLU: zero row", i);
        for (double& v : lu_[static_cast<std::size_t>(i)]) v /= s;
        inv_scale_[static_cast<std::size_t>(i)] = 1.0 / s;
        perm_[static_cast<std::size_t>(i)] = i;
    }
    for (int j = 0; j < n_; ++j) {
        int piv = j;
        double best = -1.0;
        for (int i = j; i < n_; ++i) {
            double m = std::abs(lu_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            if (m > best) {
                best = m;
                piv = i;
            }
        }
        if (best < pivot_tol) throw SingularMatrixError("DenseLU: singular pivot", j);
        std::swap(lu_[static_cast<std::size_t>(j)], lu_[static_cast<std::size_t>(piv)]);
        std::swap(perm_[static_cast<std::size_t>(j)], perm_[static_cast<std::size_t>(piv)]);
        const double d = lu_[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
        for (int i = j + 1; i < n_; ++i) {
            double m = lu_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] / d;
            lu_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m;
            if (m == 0.0) continue;
            for (int k = j + 1; k < n_; ++k)
                lu_[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] -=
                    m * lu_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        }
    }
}

std::vector<double> DenseLU::solve(const std::vector<double>& rhs) const {
    if (static_cast<int>(rhs.size()) != n_) throw Error("DenseLU::solve dimension mismatch");
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        const int src = perm_[static_cast<std::size_t>(i)];
        x[static_cast<std::size_t>(i)] =
            rhs[static_cast<std::size_t>(src)] * inv_scale_[static_cast<std::size_t>(src)];
    }
    for (int i = 1; i < n_; ++i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j)
            s -= lu_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s;
    }
    for (int i = n_ - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n_; ++j)
            s -= lu_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / lu_[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    return x;
}

namespace {

// Working row: explicit band over [start, start + band.size()) plus tail
// coefficients against the original dense boundary rows.
struct WorkRow {
    int start = 0;
    std::vector<double> band;
    std::vector<double> tail;

    double entry(int col, const std::vector<std::vector<double>>& tails) const {
        double v = 0.0;
        const int off = col - start;
        if (off >= 0 && off < static_cast<int>(band.size()))
            v = band[static_cast<std::size_t>(off)];
        for (std::size_t i = 0; i < tail.size(); ++i)
            if (tail[i] != 0.0) v += tail[i] * tails[i][static_cast<std::size_t>(col)];
        return v;
    }

    void ensure_cols(int lo, int hi) { // [lo, hi)
        if (band.empty()) {
            start = lo;
            band.assign(static_cast<std::size_t>(hi - lo), 0.0);
            return;
        }
        if (lo < start) {
            band.insert(band.begin(), static_cast<std::size_t>(start - lo), 0.0);
            start = lo;
        }
        const int end = start + static_cast<int>(band.size());
        if (hi > end) band.insert(band.end(), static_cast<std::size_t>(hi - end), 0.0);
    }
};

} // namespace

Factorization factorize(const AlmostBandedMatrix& a) {
    const int n = a.n;
    const int K = a.num_boundary_rows();

    Factorization f;
    f.n_ = n;
    f.num_tails_ = K;

    if (n <= 64) {
        // Dense fallback path, kept for debugging and as a small-n oracle.
        std::vector<std::vector<double>> dense(static_cast<std::size_t>(n));
        for (int r = 0; r < K; ++r) dense[static_cast<std::size_t>(r)] = a.dense_rows[static_cast<std::size_t>(r)];
        auto core = a.core.to_dense();
        for (int i = 0; i + K < n; ++i) dense[static_cast<std::size_t>(i + K)] = core[static_cast<std::size_t>(i)];
        f.dense_ = true;
        f.dense_lu_.emplace_back(std::move(dense), Factorization::kPivotTol);
        f.nnz_L_ = f.nnz_U_ = static_cast<long long>(n) * n / 2;
        return f;
    }

    f.tails_ = a.dense_rows;
    f.matrix_ = a;
    f.inv_scale_.assign(static_cast<std::size_t>(n), 1.0);

    // Rows are equilibrated up front (divided by their largest entry, with the
    // scale folded back into the right-hand side in solve()), so elimination
    // and back substitution work on O(1) entries regardless of operator order.
    std::vector<WorkRow> rows(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> start_bucket(static_cast<std::size_t>(n));
    for (int r = 0; r < K; ++r) {
        double s = 0.0;
        for (double v : a.dense_rows[static_cast<std::size_t>(r)]) s = std::max(s, std::abs(v));
        if (s == 0.0) throw SingularMatrixError("factorize: zero boundary row", r);
        rows[static_cast<std::size_t>(r)].tail.assign(static_cast<std::size_t>(K), 0.0);
        rows[static_cast<std::size_t>(r)].tail[static_cast<std::size_t>(r)] = 1.0 / s;
        f.inv_scale_[static_cast<std::size_t>(r)] = 1.0 / s;
        start_bucket[0].push_back(r);
    }

    const auto& bands = a.core.bands();
    int dmin = 0, dmax = 0;
    if (!bands.empty()) {
        dmin = bands.begin()->first;
        dmax = bands.rbegin()->first;
    }
    for (int i = 0; i + K < n; ++i) {
        const int r = i + K;
        const int lo = std::max(0, i + dmin);
        const int hi = std::min(n - 1, i + dmax);
        auto& row = rows[static_cast<std::size_t>(r)];
        row.start = lo;
        row.band.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
        double s = 0.0;
        for (const auto& [d, diag] : bands) {
            const int col = i + d;
            if (col < 0 || col >= n) continue;
            const double v = diag[static_cast<std::size_t>(i)];
            row.band[static_cast<std::size_t>(col - lo)] = v;
            s = std::max(s, std::abs(v));
        }
        if (s == 0.0) throw SingularMatrixError("factorize: structurally zero row", r);
        for (double& v : row.band) v /= s;
        f.inv_scale_[static_cast<std::size_t>(r)] = 1.0 / s;
        start_bucket[static_cast<std::size_t>(lo)].push_back(r);
    }

    f.urows_.resize(static_cast<std::size_t>(n));
    std::vector<int> active;
    active.reserve(static_cast<std::size_t>(K + (dmax - dmin) + 4));

    for (int j = 0; j < n; ++j) {
        for (int r : start_bucket[static_cast<std::size_t>(j)]) active.push_back(r);

        // Partial pivoting over the active rows (rows are pre-equilibrated).
        int piv_pos = -1;
        double best = -1.0;
        for (std::size_t p = 0; p < active.size(); ++p) {
            const auto& row = rows[static_cast<std::size_t>(active[p])];
            const double m = std::abs(row.entry(j, f.tails_));
            if (m > best) {
                best = m;
                piv_pos = static_cast<int>(p);
            }
        }
        if (best < Factorization::kPivotTol)
            throw SingularMatrixError("factorize: singular pivot at column " + std::to_string(j), j);

        const int piv = active[static_cast<std::size_t>(piv_pos)];
        active.erase(active.begin() + piv_pos);
        WorkRow& prow = rows[static_cast<std::size_t>(piv)];
        const double pval = prow.entry(j, f.tails_);

        const int pend = prow.band.empty() ? j : std::max(j, prow.start + static_cast<int>(prow.band.size()) - 1);
        for (int r : active) {
            WorkRow& trow = rows[static_cast<std::size_t>(r)];
            const double e = trow.entry(j, f.tails_);
            if (e == 0.0) continue;
            const double mu = e / pval;
            f.ops_.push_back({piv, r, mu});
            if (!prow.band.empty() || pend > j) {
                trow.ensure_cols(std::max(j, prow.start), pend + 1);
                const int lo = std::max(j + 1, prow.start);
                for (int col = lo; col <= pend; ++col) {
                    const int po = col - prow.start;
                    if (po >= 0 && po < static_cast<int>(prow.band.size()))
                        trow.band[static_cast<std::size_t>(col - trow.start)] -=
                            mu * prow.band[static_cast<std::size_t>(po)];
                }
            }
            if (!prow.tail.empty()) {
                if (trow.tail.empty()) trow.tail.assign(static_cast<std::size_t>(K), 0.0);
                for (int i = 0; i < K; ++i)
                    trow.tail[static_cast<std::size_t>(i)] -= mu * prow.tail[static_cast<std::size_t>(i)];
            }
        }

        auto& u = f.urows_[static_cast<std::size_t>(j)];
        u.orig_row = piv;
        u.start = prow.start;
        u.band = std::move(prow.band);
        u.tail = std::move(prow.tail);
        u.pivot = pval;
    }

    // Count stored entries, not the dense pattern a rank-K tail would expand
    // to: band nonzeros, per-row tail coefficients, and the K shared tail rows.
    f.nnz_L_ = static_cast<long long>(f.ops_.size()) + n;
    f.nnz_U_ = static_cast<long long>(K) * n;
    for (int j = 0; j < n; ++j) {
        const auto& u = f.urows_[static_cast<std::size_t>(j)];
        for (double v : u.band)
            if (v != 0.0) ++f.nnz_U_;
        for (double t : u.tail)
            if (t != 0.0) ++f.nnz_U_;
    }
    return f;
}

std::vector<double> Factorization::solve(const std::vector<double>& rhs) const {
    if (static_cast<int>(rhs.size()) != n_) throw Error("Factorization::solve dimension mismatch");
    if (dense_) return dense_lu_[0].solve(rhs);

    // The rank-K tail representation can lose a couple of digits to growth in
    // the tail coefficients; one step of iterative refinement against the
    // original matrix restores dense-LU accuracy at O(n) extra cost.
    std::vector<double> x = solve_once(rhs);
    std::vector<double> r = matrix_.apply(x);
    for (int i = 0; i < n_; ++i)
        r[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(i)] - r[static_cast<std::size_t>(i)];
    const std::vector<double> dx = solve_once(r);
    for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] += dx[static_cast<std::size_t>(i)];
    return x;
}

std::vector<double> Factorization::solve_once(const std::vector<double>& rhs) const {
    std::vector<double> b = rhs;
    for (int i = 0; i < n_; ++i) b[static_cast<std::size_t>(i)] *= inv_scale_[static_cast<std::size_t>(i)];
    for (const auto& op : ops_)
        b[static_cast<std::size_t>(op.target_row)] -= op.multiplier * b[static_cast<std::size_t>(op.pivot_row)];

    std::vector<double> x(static_cast<std::size_t>(n_), 0.0);
    std::vector<double> tsum(static_cast<std::size_t>(num_tails_), 0.0); // sum_{col>j} tails[i][col] x[col]
    for (int j = n_ - 1; j >= 0; --j) {
        const auto& u = urows_[static_cast<std::size_t>(j)];
        double s = b[static_cast<std::size_t>(u.orig_row)];
        const int lo = std::max(j + 1, u.start);
        const int hi = u.start + static_cast<int>(u.band.size()) - 1;
        for (int col = lo; col <= hi; ++col)
            s -= u.band[static_cast<std::size_t>(col - u.start)] * x[static_cast<std::size_t>(col)];
        for (std::size_t i = 0; i < u.tail.size(); ++i)
            if (u.tail[i] != 0.0) s -= u.tail[i] * tsum[i];
        const double xj = s / u.pivot;
        x[static_cast<std::size_t>(j)] = xj;
        if (xj != 0.0)
            for (int i = 0; i < num_tails_; ++i)
                tsum[static_cast<std::size_t>(i)] += tails_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * xj;
    }
    return x;
}

} // namespace gham
