#include "gham/banded.hpp"
#include "gham/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gham {

BandedOp BandedOp::identity(int n) {
    BandedOp op(n, n);
    op.band(0).assign(static_cast<std::size_t>(n), 1.0);
    return op;
}

std::vector<double>& BandedOp::band(int offset) {
    auto it = bands_.find(offset);
    if (it == bands_.end())
        it = bands_.emplace(offset, std::vector<double>(static_cast<std::size_t>(rows_), 0.0)).first;
    return it->second;
}

double BandedOp::entry(int i, int j) const {
    auto it = bands_.find(j - i);
    if (it == bands_.end()) return 0.0;
    return it->second[static_cast<std::size_t>(i)];
}

void BandedOp::set_entry(int i, int j, double value) {
    band(j - i)[static_cast<std::size_t>(i)] = value;
}

void BandedOp::add_entry(int i, int j, double value) {
    band(j - i)[static_cast<std::size_t>(i)] += value;
}

std::vector<int> BandedOp::offsets() const {
    std::vector<int> out;
    out.reserve(bands_.size());
    for (const auto& [d, _] : bands_) out.push_back(d);
    return out;
}

std::vector<double> BandedOp::apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != cols_)
        throw AssemblyError("BandedOp::apply dimension mismatch");
    std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
    for (const auto& [d, diag] : bands_) {
        const int i0 = std::max(0, -d);
        const int i1 = std::min(rows_, cols_ - d);
        for (int i = i0; i < i1; ++i)
            y[static_cast<std::size_t>(i)] +=
                diag[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i + d)];
    }
    return y;
}

BandedOp& BandedOp::operator+=(const BandedOp& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw AssemblyError("BandedOp::operator+= dimension mismatch");
    for (const auto& [d, diag] : other.bands_) {
        auto& mine = band(d);
        for (std::size_t i = 0; i < diag.size(); ++i) mine[i] += diag[i];
    }
    return *this;
}

BandedOp& BandedOp::operator*=(double s) {
    for (auto& [d, diag] : bands_)
        for (double& v : diag) v *= s;
    return *this;
}

BandedOp operator*(const BandedOp& a, const BandedOp& b) {
    if (a.cols_ != b.rows_) throw AssemblyError("BandedOp::operator* dimension mismatch");
    BandedOp c(a.rows_, b.cols_);
    for (const auto& [da, diag_a] : a.bands_) {
        for (const auto& [db, diag_b] : b.bands_) {
            const int dc = da + db;
            auto& out = c.band(dc);
            const int i0 = std::max({0, -da, -dc});
            const int i1 = std::min({a.rows_, a.cols_ - da, b.cols_ - dc});
            for (int i = i0; i < i1; ++i)
                out[static_cast<std::size_t>(i)] += diag_a[static_cast<std::size_t>(i)] *
                                                    diag_b[static_cast<std::size_t>(i + da)];
        }
    }
    c.compress();
    return c;
}

BandedOp BandedOp::truncated(int r, int c) const {
    BandedOp out(r, c);
    for (const auto& [d, diag] : bands_) {
        const int i0 = std::max(0, -d);
        const int i1 = std::min({r, c - d, rows_, cols_ - d});
        if (i1 <= i0) continue;
        auto& nd = out.band(d);
        for (int i = i0; i < i1; ++i) nd[static_cast<std::size_t>(i)] = diag[static_cast<std::size_t>(i)];
    }
    out.compress();
    return out;
}

std::vector<std::vector<double>> BandedOp::to_dense() const {
    std::vector<std::vector<double>> m(static_cast<std::size_t>(rows_),
                                       std::vector<double>(static_cast<std::size_t>(cols_), 0.0));
    for (const auto& [d, diag] : bands_) {
        const int i0 = std::max(0, -d);
        const int i1 = std::min(rows_, cols_ - d);
        for (int i = i0; i < i1; ++i)
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + d)] =
                diag[static_cast<std::size_t>(i)];
    }
    return m;
}

long long BandedOp::nnz() const {
    long long count = 0;
    for (const auto& [d, diag] : bands_) {
        const int i0 = std::max(0, -d);
        const int i1 = std::min(rows_, cols_ - d);
        for (int i = i0; i < i1; ++i)
            if (diag[static_cast<std::size_t>(i)] != 0.0) ++count;
    }
    return count;
}

void BandedOp::compress(double tol) {
    for (auto it = bands_.begin(); it != bands_.end();) {
        bool all_zero = true;
        for (double v : it->second) {
            if (std::abs(v) > tol) {
                all_zero = false;
                break;
            }
        }
        it = all_zero ? bands_.erase(it) : std::next(it);
    }
}

} // namespace gham
