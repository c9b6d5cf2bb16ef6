#pragma once

#include "gham/ham.hpp"

#include <string>
#include <vector>

namespace gham {

/// Laminar flow between moving porous walls as a fourth-order nonlinear BVP
/// on [-1, 1]:
///   y'''' + alpha((x+1)/4 y''' + 3/4 y'') + Re(1/2 y y''' - 1/4 y' y'') = 0,
///   y(-1) = 0, y''(-1) = 0, y(1) = 1, y'(1) = 0.
/// alpha is the wall dilation rate, Re the permeation Reynolds number.
/// The problem carries its own exact auxiliary-operator family L1..L4.
NonlinearBVP porous_wall(double alpha, double re);

/// Registry lookup by name ("porous-wall"); throws Error on unknown names.
NonlinearBVP make_problem(const std::string& name, double alpha, double re);

/// Names accepted by make_problem.
std::vector<std::string> problem_names();

} // namespace gham
