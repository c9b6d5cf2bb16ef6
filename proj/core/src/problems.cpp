#include "gham/problems.hpp"
#include "gham/errors.hpp"

namespace gham {

namespace {

ChebCoeffs constant(double v) { return ChebCoeffs(std::vector<double>{v}); }

void axpy(ChebCoeffs& dst, double s, const ChebCoeffs& src) {
    if (dst.size() < src.size()) dst.c.resize(static_cast<std::size_t>(src.size()), 0.0);
    for (int j = 0; j < src.size(); ++j) dst[j] += s * src[j];
}

} // namespace

NonlinearBVP porous_wall(double alpha, double re) {
    NonlinearBVP p;
    LinearBVP& lin = p.linear_part;
    lin.order = 4;
    lin.a = {constant(0.0),
             constant(0.0),
             constant(0.75 * alpha),
             ChebCoeffs(std::vector<double>{0.25 * alpha, 0.25 * alpha}), // alpha (x+1)/4
             constant(1.0)};
    lin.rhs = constant(0.0);
    lin.boundary = {{-1.0, 0, 1.0}, {-1.0, 2, 1.0}, {1.0, 0, 1.0}, {1.0, 1, 1.0}};
    lin.c = {0.0, 0.0, 1.0, 0.0};

    p.terms = {NonlinearTerm::quadratic(0.5 * re, 0, 3),
               NonlinearTerm::quadratic(-0.25 * re, 1, 2)};
    p.params = {{"alpha", alpha}, {"Re", re}};

    // Exact auxiliary family: L4 keeps the full 1/2 Re weight on the y''
    // term (not the product-rule 1/4), so it is supplied here rather than
    // derived from the generic tag rules.
    const LinearBVP base = lin;
    p.aux_override = [base, re](const std::string& tag, const ChebCoeffs& u0_ref,
                                int /*n*/) -> LinearBVP {
        LinearBVP aux = base;
        if (tag == "L1") {
            aux.a = {constant(0.0), constant(0.0), constant(0.0), constant(0.0), constant(1.0)};
        } else if (tag == "L2") {
            // the linear part as-is
        } else if (tag == "L3") {
            axpy(aux.a[3], 1.0, constant(0.5 * re));
            axpy(aux.a[2], 1.0, constant(-0.25 * re));
        } else if (tag == "L4") {
            axpy(aux.a[3], 0.5 * re, u0_ref);
            axpy(aux.a[2], -0.5 * re, truncate(cheb_derivative(u0_ref)));
        } else {
            throw Error("porous_wall: unknown auxiliary operator tag: " + tag);
        }
        return aux;
    };
    return p;
}

NonlinearBVP make_problem(const std::string& name, double alpha, double re) {
    if (name == "porous-wall") return porous_wall(alpha, re);
    throw Error("unknown problem: " + name);
}

std::vector<std::string> problem_names() { return {"porous-wall"}; }

} // namespace gham
