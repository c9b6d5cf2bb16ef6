#pragma once

#include "gham/timing.hpp"

#include <string>
#include <vector>

namespace gham {

/// One CSV row: per-iteration residual and cumulative phase timings.
struct BenchRecord {
    std::string run_id;
    std::string solver; // gham | sham | newton
    std::string aux;    // L1..L4 (or "-" when not applicable)
    int n = 0;
    int iter = 0;
    double hbar = 0.0;
    double residual = 0.0;
    PhaseTimes times;
    bool converged = false;
};

/// The exact header line emitted before record rows.
std::string csv_header();

/// One record as a CSV row (no trailing newline); numeric fields use
/// round-trippable formatting so output is deterministic apart from timings.
std::string csv_row(const BenchRecord& r);

/// Write header + rows to path; throws Error when the file cannot be opened.
void write_csv(const std::string& path, const std::vector<BenchRecord>& records);

/// Power-law fit t = C * I^S by least squares in log-log space.
struct ScalingFit {
    double c = 0.0;
    double s = 0.0;
    double r_squared = 0.0;
    int window_lo = 40;
    int window_hi = 80;
};

/// Fit over paired samples (x[i], y[i]); all entries must be positive.
ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Benchmark run description, loadable from a JSON config file.
struct RunConfig {
    std::string problem = "porous-wall";
    double alpha = 1.0;
    double re = 10.0;
    std::string solver = "gham";
    std::string aux = "L4";
    int n = 512;
    double hbar = 1.0;
    bool hbar_auto = false; // "auto" in the config / --hbar auto
    int iters = 100;
    double tol = 1e-12;
    unsigned long seed = 0;
};

/// Parse a JSON config file. Unknown keys are rejected; malformed input
/// raises Error with a line-numbered message.
RunConfig parse_config(const std::string& path);

/// Deterministic identifier for a run built from the config fields.
std::string make_run_id(const RunConfig& cfg);

} // namespace gham
