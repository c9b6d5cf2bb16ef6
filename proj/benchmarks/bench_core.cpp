// Microbenchmarks for the hot paths: transforms, operator assembly, the
// almost-banded factorization/solve, and one full homotopy iteration.

#include <benchmark/benchmark.h>

#include "gham/bvp.hpp"
#include "gham/chebyshev.hpp"
#include "gham/ham.hpp"
#include "gham/problems.hpp"
#include "gham/solver.hpp"

#include <random>
#include <vector>

namespace {

std::vector<double> random_vector(int n) {
    std::mt19937 gen(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = dist(gen);
    return v;
}

void bm_transform_roundtrip(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    gham::GridValues v(random_vector(n));
    for (auto _ : state) {
        auto c = gham::vals_to_coeffs(v);
        auto back = gham::coeffs_to_vals(c);
        benchmark::DoNotOptimize(back.v.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(bm_transform_roundtrip)->RangeMultiplier(4)->Range(65, 16385)->Complexity();

void bm_assemble_system(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    gham::NonlinearBVP p = gham::porous_wall(1.0, 10.0);
    gham::LinearBVP aux =
        gham::make_aux_operator(p, gham::AuxOperatorChoice::named("L2"), gham::ChebCoeffs(n), n);
    for (auto _ : state) {
        auto sys = gham::assemble_system(aux, n);
        benchmark::DoNotOptimize(&sys);
    }
    state.SetComplexityN(n);
}
BENCHMARK(bm_assemble_system)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void bm_factorize(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    gham::NonlinearBVP p = gham::porous_wall(1.0, 10.0);
    gham::LinearBVP aux =
        gham::make_aux_operator(p, gham::AuxOperatorChoice::named("L2"), gham::ChebCoeffs(n), n);
    auto [sys, rhs] = gham::assemble_system(aux, n);
    for (auto _ : state) {
        auto f = gham::factorize(sys);
        benchmark::DoNotOptimize(&f);
    }
    state.SetComplexityN(n);
}
BENCHMARK(bm_factorize)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void bm_solve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    gham::NonlinearBVP p = gham::porous_wall(1.0, 10.0);
    gham::LinearBVP aux =
        gham::make_aux_operator(p, gham::AuxOperatorChoice::named("L2"), gham::ChebCoeffs(n), n);
    auto [sys, rhs0] = gham::assemble_system(aux, n);
    auto f = gham::factorize(sys);
    auto rhs = random_vector(n);
    for (auto _ : state) {
        auto x = f.solve(rhs);
        benchmark::DoNotOptimize(x.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(bm_solve)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void bm_ham_iteration(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    gham::NonlinearBVP p = gham::porous_wall(1.0, 10.0);
    gham::GhamSession session(p, gham::AuxOperatorChoice::named("L4"), n);
    for (auto _ : state) {
        auto res = session.run(1.0, 10, 1e-300);
        benchmark::DoNotOptimize(&res);
    }
    state.SetComplexityN(n);
}
BENCHMARK(bm_ham_iteration)->RangeMultiplier(4)->Range(256, 4096)->Complexity()
    ->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
