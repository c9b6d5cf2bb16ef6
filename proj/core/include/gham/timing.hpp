#pragma once

#include <chrono>

namespace gham {

/// Per-phase wall-clock accumulators (seconds, monotonic clock).
struct PhaseTimes {
    double setup = 0.0;
    double factor = 0.0;
    double solve = 0.0;
    double transform = 0.0;
    double deriv = 0.0;

    double total() const { return setup + factor + solve + transform + deriv; }

    PhaseTimes& operator+=(const PhaseTimes& o) {
        setup += o.setup;
        factor += o.factor;
        solve += o.solve;
        transform += o.transform;
        deriv += o.deriv;
        return *this;
    }
};

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    /// Add elapsed time to an accumulator and restart.
    void lap(double& acc) {
        acc += seconds();
        start_ = std::chrono::steady_clock::now();
    }
    void restart() { start_ = std::chrono::steady_clock::now(); }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace gham
