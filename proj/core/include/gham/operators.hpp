#pragma once

#include "gham/banded.hpp"
#include "gham/chebyshev.hpp"

namespace gham {

/// k-th differentiation operator: Chebyshev coefficients in, C^(k)
/// coefficients out. Single superdiagonal at offset +k with entries
/// 2^(k-1) * j * (k-1)! feeding output index j-k from input index j.
BandedOp diff_operator(int k, int n);

/// Basis raise S_lambda: coefficients in C^(lambda) (lambda = 0 meaning
/// Chebyshev T) to coefficients in C^(lambda+1). Upper two-band.
BandedOp conversion_operator(int lambda, int n);

/// Composed chain S_{hi-1} ... S_{lo}: C^(lo) coefficients to C^(hi).
/// Identity when hi == lo.
BandedOp conversion_chain(int lo, int hi, int n);

/// Convert a Chebyshev series to the C^(lambda) basis (lambda >= 0).
GegenCoeffs cheb_to_gegen(const ChebCoeffs& c, int lambda);

/// Multiplication operator M_lambda[a]: acting on C^(lambda) coefficients
/// of u, produces the C^(lambda) coefficients of a(x) u(x). The coefficient
/// function a is supplied as a Chebyshev series; bandwidth is O(len(a)).
BandedOp multiplication_operator(int lambda, const ChebCoeffs& a, int n);

} // namespace gham
