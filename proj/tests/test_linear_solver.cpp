#include <doctest.h>

#include "gham/bvp.hpp"
#include "gham/errors.hpp"
#include "gham/problems.hpp"
#include "gham/solver.hpp"

#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace gham;

namespace {

AlmostBandedMatrix identity_system(int n) {
    AlmostBandedMatrix m;
    m.n = n;
    m.core = BandedOp::identity(n);
    return m;
}

/// Random diagonally dominant banded system with K dense boundary rows.
AlmostBandedMatrix random_system(int n, int k, int bw) {
    AlmostBandedMatrix m;
    m.n = n;
    for (int r = 0; r < k; ++r) m.dense_rows.push_back(oracle::random_vector(n, 0.5, 1.5));
    BandedOp core(n - k, n);
    for (int i = 0; i < n - k; ++i) {
        for (int d = -bw; d <= bw; ++d) {
            const int j = i + k + d; // center the band on the shifted diagonal
            if (j < 0 || j >= n) continue;
            double v = oracle::random_vector(1)[0];
            if (d == 0) v += 4.0 * bw; // dominance keeps the system well-conditioned
            core.set_entry(i, j, v);
        }
    }
    m.core = core;
    return m;
}

std::vector<std::vector<double>> to_dense(const AlmostBandedMatrix& m) {
    std::vector<std::vector<double>> d(static_cast<std::size_t>(m.n),
                                       std::vector<double>(static_cast<std::size_t>(m.n), 0.0));
    const int k = m.num_boundary_rows();
    for (int r = 0; r < k; ++r) d[static_cast<std::size_t>(r)] = m.dense_rows[static_cast<std::size_t>(r)];
    auto core = m.core.to_dense();
    for (int i = 0; i < m.n - k; ++i)
        d[static_cast<std::size_t>(i + k)] = core[static_cast<std::size_t>(i)];
    return d;
}

} // namespace

TEST_SUITE_BEGIN("linear-solver");

TEST_CASE("identity system: solve returns the right-hand side") {
    for (int n : {4, 64, 200}) { // covers both the dense fallback and banded paths
        auto f = factorize(identity_system(n));
        auto rhs = oracle::random_vector(n);
        CHECK(oracle::max_abs_diff(f.solve(rhs), rhs) < 1e-14);
    }
}

TEST_CASE("2x2 hand-eliminated system") {
    AlmostBandedMatrix m;
    m.n = 2;
    m.core = BandedOp(2, 2);
    m.core.set_entry(0, 0, 2.0);
    m.core.set_entry(0, 1, 1.0);
    m.core.set_entry(1, 0, 1.0);
    m.core.set_entry(1, 1, 3.0);
    auto x = factorize(m).solve({3.0, 4.0});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("random almost-banded systems agree with dense Gaussian elimination") {
    for (int n : {24, 96, 256}) {
        auto m = random_system(n, 4, 3);
        auto dense = to_dense(m);
        auto f = factorize(m);
        for (int t = 0; t < 5; ++t) {
            auto rhs = oracle::random_vector(n);
            auto got = f.solve(rhs);
            auto want = oracle::dense_solve(dense, rhs);
            CHECK(oracle::max_abs_diff(got, want) < 1e-10);
        }
    }
}

TEST_CASE("solve(factorize(A), A v) = v across test operators and resolutions") {
    NonlinearBVP p = porous_wall(1.0, 10.0);
    for (const char* tag : {"L1", "L2", "L3"}) {
        for (int n : {64, 256, 1024}) {
            LinearBVP aux = make_aux_operator(p, AuxOperatorChoice::named(tag), ChebCoeffs(n), n);
            auto [sys, rhs0] = assemble_system(aux, n);
            auto f = factorize(sys);
            for (int t = 0; t < 5; ++t) {
                std::vector<double> v = oracle::random_vector(n);
                // Cubic decay keeps the fourth-order rows of A v at O(1), so
                // the forward error is not dominated by conditioning of the
                // test's own A*v evaluation.
                for (int j = 0; j < n; ++j)
                    v[static_cast<std::size_t>(j)] /= (1.0 + static_cast<double>(j) * j * j);
                auto av = sys.apply(v);
                CHECK(oracle::max_abs_diff(f.solve(av), v) < 1e-10);
            }
        }
    }
}

TEST_CASE("fill stays almost-banded: factor nonzeros grow linearly, not quadratically") {
    NonlinearBVP p = porous_wall(1.0, 10.0);
    LinearBVP aux = make_aux_operator(p, AuxOperatorChoice::named("L2"), ChebCoeffs(512), 512);
    auto [sys, rhs0] = assemble_system(aux, 512);
    auto f = factorize(sys);
    const double fill = static_cast<double>(f.nnz_L() + f.nnz_U()) / (512.0 * 512.0);
    CHECK(fill < 0.10); // far below the ~49% dense-pattern LU fill
}

TEST_CASE("reused factorization: repeated solves are consistent and independent") {
    auto m = random_system(128, 4, 3);
    auto f = factorize(m);
    auto rhs = oracle::random_vector(128);
    auto first = f.solve(rhs);
    for (int t = 0; t < 10; ++t) {
        f.solve(oracle::random_vector(128)); // interleaved unrelated solves
        CHECK(oracle::max_abs_diff(f.solve(rhs), first) == 0.0);
    }
}

TEST_CASE("singular matrix raises with the pivot index") {
    AlmostBandedMatrix m;
    m.n = 3;
    m.core = BandedOp(3, 3);
    m.core.set_entry(0, 0, 1.0);
    m.core.set_entry(1, 1, 1.0);
    // Row 2 left entirely zero.
    CHECK_THROWS_AS(factorize(m), SingularMatrixError);
    try {
        factorize(m);
    } catch (const SingularMatrixError& e) {
        CHECK(e.pivot_index >= 0);
        CHECK(e.pivot_index < 3);
    }

    // Same via the dense fallback path (n <= 64) with a duplicated row.
    AlmostBandedMatrix d;
    d.n = 8;
    d.dense_rows.push_back(std::vector<double>(8, 1.0));
    d.dense_rows.push_back(std::vector<double>(8, 1.0));
    BandedOp core(6, 8);
    for (int i = 0; i < 6; ++i) core.set_entry(i, i, 1.0);
    d.core = core;
    CHECK_THROWS_AS(factorize(d), SingularMatrixError);
}

TEST_CASE("factor-once cost model: amortized solves beat refactoring") {
    NonlinearBVP p = porous_wall(1.0, 10.0);
    LinearBVP aux = make_aux_operator(p, AuxOperatorChoice::named("L2"), ChebCoeffs(512), 512);
    auto [sys, rhs0] = assemble_system(aux, 512);

    Stopwatch sw;
    auto f = factorize(sys);
    std::vector<double> rhs = oracle::random_vector(512);
    for (int t = 0; t < 100; ++t) f.solve(rhs);
    const double amortized = sw.seconds();

    sw.restart();
    for (int t = 0; t < 100; ++t) factorize(sys).solve(rhs);
    const double refactored = sw.seconds();
    // Solves are much cheaper than factorizations; a loose 2x bound keeps
    // the check robust under machine noise.
    CHECK(refactored > 2.0 * amortized);
}

TEST_SUITE_END();
