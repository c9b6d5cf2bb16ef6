#pragma once

#include "gham/bvp.hpp"
#include "gham/solver.hpp"
#include "gham/timing.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gham {

/// A product nonlinearity coeff(x) * prod_i u^(orders[i]); two factors for a
/// quadratic term, three for a cubic one. Constant coefficients are stored
/// as a length-1 Chebyshev series.
struct NonlinearTerm {
    ChebCoeffs coeff;
    std::vector<int> orders;

    static NonlinearTerm quadratic(double c, int d1, int d2) {
        return {ChebCoeffs(std::vector<double>{c}), {d1, d2}};
    }
    static NonlinearTerm cubic(double c, int d1, int d2, int d3) {
        return {ChebCoeffs(std::vector<double>{c}), {d1, d2, d3}};
    }
};

/// Nonlinear BVP: linear_part houses a_0..a_N, the forcing psi (as rhs),
/// boundary functionals and c; terms hold the product nonlinearities.
struct NonlinearBVP {
    LinearBVP linear_part;
    std::vector<NonlinearTerm> terms;
    std::map<std::string, double> params;

    /// Optional per-problem construction of tag-based auxiliary operators
    /// (the registry problem supplies its own exact forms). Falls back to
    /// the generic tag rules when absent.
    std::function<LinearBVP(const std::string& tag, const ChebCoeffs& u0_ref, int n)> aux_override;
};

/// Auxiliary linear operator selection: a named tag or custom operator data.
struct AuxOperatorChoice {
    std::string tag = "L2"; // L1 | L2 | L3 | L4 | custom
    std::optional<LinearBVP> custom;

    static AuxOperatorChoice named(std::string t) { return {std::move(t), std::nullopt}; }
};

struct HamConfig {
    double hbar = 1.0;
    int max_iterations = 100;
    double tolerance = 1e-12;
    int n = 256;
};

/// One homotopy solve in flight: V_0..V_m, the running partial sum
/// u0 + sum V, and the residual trace.
struct HamState {
    ChebCoeffs u0;
    std::vector<ChebCoeffs> history; // V_0 ... V_m
    ChebCoeffs partial_sum;
    std::vector<double> residual_trace;
    int iterations_done = 0;
    long long cauchy_pair_count = 0;
};

struct IterationRecord {
    int iter = 0;
    double residual = 0.0;
    PhaseTimes cumulative; // phase totals up to and including this iteration
};

struct HamDiagnostics {
    PhaseTimes phases;
    std::vector<IterationRecord> per_iteration;
    int factorize_calls = 0;
    bool converged = false;
};

struct HamResult {
    ChebCoeffs solution;
    HamState state;
    HamDiagnostics diagnostics;
};

/// Result of the boundary homogenization u = v + u0.
struct HomogenizedProblem {
    ChebCoeffs u0;
    LinearBVP modified_linear;       // a-bar coefficients, rhs = psi_1, B v = 0
    std::vector<NonlinearTerm> terms; // product terms in v
};

/// Resolve an auxiliary operator choice to concrete operator data. For L4
/// the reference iterate u0_ref enters the coefficients.
LinearBVP make_aux_operator(const NonlinearBVP& p, const AuxOperatorChoice& aux,
                            const ChebCoeffs& u0_ref, int n);

/// Solve the auxiliary operator against psi with the problem's boundary data
/// and push the substitution u = v + u0 through the nonlinearity.
HomogenizedProblem homogenize(const NonlinearBVP& p, const AuxOperatorChoice& aux, int n);

/// The substitution step alone, for a given homogenization solution u0.
HomogenizedProblem homogenize_about(const NonlinearBVP& p, const ChebCoeffs& u0, int n);

/// The forcing/nonlinearity part N_m of the m-th right-hand side, in the
/// C^(order) basis: (1 - chi_m) S psi_1 minus the converted Cauchy products
/// over the iterate history. pair_counter, when given, accumulates the
/// number of distinct Cauchy index pairs audited per quadratic term.
std::vector<double> rm_build(int m, const HamState& state,
                             const std::vector<NonlinearTerm>& terms, const ChebCoeffs& psi1,
                             int order, long long* pair_counter = nullptr);

/// Advance the iteration V_m = chi_m V_{m-1} + hbar A^{-1}(N_m - A_1 V_{m-1}),
/// where A_1 is the modified linear operator projected to its first n-K rows;
/// hbar = +1 reproduces the exact solve for a linear problem. A must have been
/// factored once before iteration 1 and is never refactored.
void ham_step(HamState& state, const Factorization& A, const BandedOp& A1,
              const std::vector<NonlinearTerm>& terms, const ChebCoeffs& psi1,
              const HamConfig& config, int order);

/// Integral over [-1,1] of |N[u](x) - psi(x)| by Clenshaw-Curtis at 2n points.
double residual(const ChebCoeffs& u, const NonlinearBVP& p, int n);

/// Max-norm boundary defect ||B u - c||_inf, reported separately.
double boundary_defect(const ChebCoeffs& u, const NonlinearBVP& p);

/// Reusable solve context: auxiliary operator assembled and factored once;
/// run() is const and safe to call concurrently (e.g. across hbar samples).
class GhamSession {
public:
    GhamSession(const NonlinearBVP& p, const AuxOperatorChoice& aux, int n);

    HamResult run(double hbar, int max_iterations, double tolerance) const;

    const HomogenizedProblem& homogenized() const { return hom_; }
    const Factorization& factorization() const { return fact_; }
    int factorize_calls() const { return factorize_calls_; }
    const PhaseTimes& setup_times() const { return setup_times_; }
    int n() const { return n_; }

private:
    NonlinearBVP problem_;
    int n_;
    HomogenizedProblem hom_;
    BandedOp a1_;       // modified linear operator, Cheb -> C^(N)
    Factorization fact_;
    int factorize_calls_ = 0;
    PhaseTimes setup_times_;
};

/// Full homotopy solve with per-phase wall times and residual trace.
HamResult solve_ham(const NonlinearBVP& p, const AuxOperatorChoice& aux, const HamConfig& config);

struct HbarSweepConfig {
    double lo = -2.0;
    double hi = 2.0;
    double exclusion = 0.01; // neighbourhood of 0 to skip
    int samples = 41;
    int probe_iterations = 10;
    int n = 256;
};

struct HbarSweepResult {
    double hbar_opt = 0.0;
    std::vector<std::pair<double, double>> curve; // (hbar, residual)
};

/// Sample the residual across hbar, then refine the bracketed minimum by
/// golden-section search (the error curve is broadly convex).
HbarSweepResult optimize_hbar(const NonlinearBVP& p, const AuxOperatorChoice& aux,
                              const HbarSweepConfig& sweep);

/// Golden-section minimiser for a unimodal function on [lo, hi].
double golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                          int iterations = 40);

} // namespace gham
