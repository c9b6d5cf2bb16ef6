#include "gham/chebyshev.hpp"
#include "gham/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <unordered_map>

namespace gham {

namespace {

// Plan cache for DCT-I (REDFT00). Plans are created with FFTW_UNALIGNED so
// they can be executed on arbitrary caller buffers via fftw_execute_r2r.
class DctPlans {
public:
    static DctPlans& instance() {
        static DctPlans p;
        return p;
    }

    void execute(int n, const double* in, double* out) {
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = plans_.find(n);
            if (it == plans_.end()) {
                std::vector<double> a(static_cast<std::size_t>(n));
                std::vector<double> b(static_cast<std::size_t>(n));
                plan = fftw_plan_r2r_1d(n, a.data(), b.data(), FFTW_REDFT00,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
                plans_.emplace(n, plan);
            } else {
                plan = it->second;
            }
        }
        fftw_execute_r2r(plan, const_cast<double*>(in), out);
    }

private:
    DctPlans() = default;
    ~DctPlans() {
        for (auto& [n, p] : plans_) fftw_destroy_plan(p);
    }
    std::mutex mutex_;
    std::unordered_map<int, fftw_plan> plans_;
};

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x))
            throw NonFiniteInputError(std::string("non-finite input to ") + what);
    }
}

} // namespace

std::vector<double> cheb_points(int n) {
    if (n < 2) throw InvalidResolutionError("cheb_points requires n >= 2");
    std::vector<double> x(static_cast<std::size_t>(n));
    const int N = n - 1;
    for (int k = 0; 2 * k <= N; ++k) {
        double xk = std::cos(std::numbers::pi * k / N);
        x[static_cast<std::size_t>(k)] = xk;
        x[static_cast<std::size_t>(N - k)] = -xk;
    }
    if (N % 2 == 0) x[static_cast<std::size_t>(N / 2)] = 0.0;
    x[0] = 1.0;
    x[static_cast<std::size_t>(N)] = -1.0;
    return x;
}

int fft_grid_size(int m) {
    int s = 5;
    while (s < m) s = 2 * (s - 1) + 1;
    return s;
}

ChebCoeffs vals_to_coeffs(const GridValues& v) {
    const int n = v.size();
    if (n < 2) throw InvalidResolutionError("vals_to_coeffs requires n >= 2");
    check_finite(v.v, "vals_to_coeffs");
    ChebCoeffs c(n);
    DctPlans::instance().execute(n, v.v.data(), c.c.data());
    const double scale = 1.0 / (n - 1);
    for (int j = 0; j < n; ++j) c[j] *= scale;
    c[0] *= 0.5;
    c[n - 1] *= 0.5;
    return c;
}

GridValues coeffs_to_vals(const ChebCoeffs& c) {
    const int n = c.size();
    if (n < 2) throw InvalidResolutionError("coeffs_to_vals requires n >= 2");
    check_finite(c.c, "coeffs_to_vals");
    std::vector<double> in(c.c);
    for (int j = 1; j < n - 1; ++j) in[static_cast<std::size_t>(j)] *= 0.5;
    GridValues v(n);
    DctPlans::instance().execute(n, in.data(), v.v.data());
    return v;
}

GridValues coeffs_to_vals(const ChebCoeffs& c, int n) {
    ChebCoeffs padded(n);
    const int m = std::min(n, c.size());
    for (int j = 0; j < m; ++j) padded[j] = c[j];
    return coeffs_to_vals(padded);
}

double cheb_eval(const ChebCoeffs& c, double x) {
    const int n = c.size();
    double b1 = 0.0, b2 = 0.0;
    for (int j = n - 1; j >= 1; --j) {
        double b0 = c[j] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c.size() > 0 ? c[0] + x * b1 - b2 : 0.0;
}

ChebCoeffs cheb_derivative(const ChebCoeffs& c, int k) {
    ChebCoeffs d = c;
    const int n = c.size();
    for (int pass = 0; pass < k; ++pass) {
        ChebCoeffs next(n);
        for (int j = n - 1; j >= 1; --j)
            next[j - 1] = (j + 1 < n ? next[j + 1] : 0.0) + 2.0 * j * d[j];
        next[0] *= 0.5;
        d = next;
    }
    return d;
}

double gegenbauer_eval(int lambda, int j, double x) {
    if (lambda < 1) throw Error("gegenbauer_eval requires lambda >= 1");
    if (j < 0) throw Error("gegenbauer_eval requires j >= 0");
    if (j == 0) return 1.0;
    double prev = 1.0;
    double cur = 2.0 * lambda * x;
    for (int i = 1; i < j; ++i) {
        double next = (2.0 * (i + lambda) * x * cur - (i + 2.0 * lambda - 1.0) * prev) / (i + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double gegen_series_eval(const GegenCoeffs& g, double x) {
    const int n = g.size();
    if (n == 0) return 0.0;
    double sum = g.c[0];
    if (n == 1) return sum;
    double prev = 1.0;
    double cur = 2.0 * g.lambda * x;
    sum += g.c[1] * cur;
    for (int j = 1; j + 1 < n; ++j) {
        double next =
            (2.0 * (j + g.lambda) * x * cur - (j + 2.0 * g.lambda - 1.0) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
        sum += g.c[static_cast<std::size_t>(j + 1)] * cur;
    }
    return sum;
}

double integrate(const GridValues& v) {
    ChebCoeffs c = vals_to_coeffs(v);
    double sum = 2.0 * c[0];
    for (int j = 2; j < c.size(); j += 2) sum += 2.0 * c[j] / (1.0 - static_cast<double>(j) * j);
    return sum;
}

ChebCoeffs truncate(const ChebCoeffs& c, double rel_tol) {
    double mx = 0.0;
    for (double x : c.c) mx = std::max(mx, std::abs(x));
    int last = 0;
    for (int j = 0; j < c.size(); ++j)
        if (std::abs(c[j]) > rel_tol * mx) last = j;
    ChebCoeffs out(last + 1);
    for (int j = 0; j <= last; ++j) out[j] = c[j];
    return out;
}

ChebCoeffs sample(const std::function<double(double)>& f, int n) {
    auto x = cheb_points(n);
    GridValues v(n);
    for (int k = 0; k < n; ++k) v[k] = f(x[static_cast<std::size_t>(k)]);
    return vals_to_coeffs(v);
}

} // namespace gham
