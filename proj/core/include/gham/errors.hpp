#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gham {

/// Base class for all gham errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidResolutionError : public Error {
public:
    explicit InvalidResolutionError(const std::string& msg) : Error(msg) {}
};

class DegenerateOperatorError : public Error {
public:
    explicit DegenerateOperatorError(const std::string& msg) : Error(msg) {}
};

class NonFiniteInputError : public Error {
public:
    explicit NonFiniteInputError(const std::string& msg) : Error(msg) {}
};

class AssemblyError : public Error {
public:
    explicit AssemblyError(const std::string& msg) : Error(msg) {}
};

/// Raised when a scaled pivot falls below the singularity threshold.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& msg, int pivot_index)
        : Error(msg), pivot_index(pivot_index) {}
    int pivot_index;
};

/// Raised when a homotopy iterate blows up; carries the iteration and hbar.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& msg, int iteration, double hbar)
        : Error(msg), iteration(iteration), hbar(hbar) {}
    int iteration;
    double hbar;
};

class StateCorruptionError : public Error {
public:
    explicit StateCorruptionError(const std::string& msg) : Error(msg) {}
};

/// Every sampled hbar diverged; the sampled curve is attached.
class NoConvergentHbarError : public Error {
public:
    NoConvergentHbarError(const std::string& msg,
                          std::vector<std::pair<double, double>> curve)
        : Error(msg), curve(std::move(curve)) {}
    std::vector<std::pair<double, double>> curve;
};

} // namespace gham
