#include "gham/bench.hpp"
#include "gham/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gham {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

} // namespace

std::string csv_header() {
    return "run_id,solver,aux,n,iter,hbar,residual,t_setup_s,t_factor_s,t_solve_s,"
           "t_transform_s,t_deriv_s,converged";
}

std::string csv_row(const BenchRecord& r) {
    std::ostringstream os;
    os << r.run_id << ',' << r.solver << ',' << r.aux << ',' << r.n << ',' << r.iter << ','
       << fmt(r.hbar) << ',' << fmt(r.residual) << ',' << fmt(r.times.setup) << ','
       << fmt(r.times.factor) << ',' << fmt(r.times.solve) << ',' << fmt(r.times.transform) << ','
       << fmt(r.times.deriv) << ',' << (r.converged ? 1 : 0);
    return os.str();
}

void write_csv(const std::string& path, const std::vector<BenchRecord>& records) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << csv_header() << '\n';
    for (const auto& r : records) out << csv_row(r) << '\n';
}

ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw Error("fit_power_law: need at least 2 paired samples");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0)
            throw Error("fit_power_law: samples must be positive");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw Error("fit_power_law: degenerate abscissae");
    ScalingFit f;
    f.s = (n * sxy - sx * sy) / denom;
    f.c = std::exp((sy - f.s * sx) / n);
    const double sst = syy - sy * sy / n;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double pred = std::log(f.c) + f.s * std::log(x[i]);
        const double e = std::log(y[i]) - pred;
        sse += e * e;
    }
    f.r_squared = sst > 0.0 ? 1.0 - sse / sst : 1.0;
    return f;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(path + ":" + std::to_string(line_of_byte(text, e.byte)) +
                    ": malformed config: " + e.what());
    }
    if (!j.is_object()) throw Error(path + ":1: config must be a JSON object");

    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "problem") {
                cfg.problem = value.get<std::string>();
            } else if (key == "alpha") {
                cfg.alpha = value.get<double>();
            } else if (key == "Re" || key == "re") {
                cfg.re = value.get<double>();
            } else if (key == "solver") {
                cfg.solver = value.get<std::string>();
            } else if (key == "aux") {
                cfg.aux = value.get<std::string>();
            } else if (key == "n") {
                cfg.n = value.get<int>();
            } else if (key == "hbar") {
                if (value.is_string() && value.get<std::string>() == "auto")
                    cfg.hbar_auto = true;
                else
                    cfg.hbar = value.get<double>();
            } else if (key == "iters") {
                cfg.iters = value.get<int>();
            } else if (key == "tol") {
                cfg.tol = value.get<double>();
            } else if (key == "seed") {
                cfg.seed = value.get<unsigned long>();
            } else {
                throw Error(path + ": unknown config key: " + key);
            }
        } catch (const nlohmann::json::exception& e) {
            throw Error(path + ": bad value for key '" + key + "': " + e.what());
        }
    }

    if (cfg.n < 2) throw Error(path + ": n must be >= 2");
    if (cfg.iters < 1) throw Error(path + ": iters must be >= 1");
    if (cfg.tol <= 0.0) throw Error(path + ": tol must be positive");
    if (cfg.solver != "gham" && cfg.solver != "sham" && cfg.solver != "newton")
        throw Error(path + ": solver must be one of gham|sham|newton");
    if (cfg.aux != "L1" && cfg.aux != "L2" && cfg.aux != "L3" && cfg.aux != "L4")
        throw Error(path + ": aux must be one of L1|L2|L3|L4");
    return cfg;
}

std::string make_run_id(const RunConfig& cfg) {
    std::ostringstream os;
    os << cfg.problem << '-' << cfg.solver << '-' << cfg.aux << "-n" << cfg.n << "-s" << cfg.seed;
    return os.str();
}

} // namespace gham
