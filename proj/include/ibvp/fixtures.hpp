/// \file
/// Named problems shared by the tests, the acceptance runner and the CLI.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ibvp/residuals.hpp"
#include "ibvp/solver.hpp"

namespace ibvp {

/// Burgers on (0,1), T = 1, u0 = 1, u_b(0) = 1, u_b(1) = -1. The constant
/// state 1 is the entropy solution: outflow at x = 1.
IBVPProblem reference_problem();

/// Burgers on (0,1), T = 1, u0 = -1, u_b(0) = -1, u_b(1) = 1. The constant
/// state -1 violates the boundary condition at x = 1.
IBVPProblem inadmissible_problem();

/// f(u) = u on (0,1), T = 0.5, u0 = 0.5 + 0.25 sin(2 pi x),
/// u_b(0, t) = u0(-t), u_b(1) = 0.
IBVPProblem advection_problem();
SmoothCandidate advection_candidate();
/// Exact advection profile plus eps * sin(pi x) sin(pi t).
SmoothCandidate perturbed_advection_candidate(double eps);

SmoothCandidate constant_candidate(double value);

/// Burgers on (0,1) with constant state c, u_b(0) = c and ghost value g at
/// x = 1.
struct BoundaryRiemann {
  std::string name;
  double ghost = 0.0;
  double state = 0.0;
};
std::vector<BoundaryRiemann> boundary_riemann_suite();
IBVPProblem boundary_riemann_problem(const BoundaryRiemann& r, double T = 0.5);

/// Burgers on (-1,1), T = 0.5, jump uL | uR at x = 0 with constant boundary
/// data; `exact` is the self-similar solution (valid while waves stay
/// inside the domain).
struct InteriorRiemann {
  std::string name;
  IBVPProblem problem;
  std::function<double(double, double)> exact;
};
InteriorRiemann interior_riemann(double uL, double uR);

/// Names accepted by problem_by_name: "reference", "inadmissible",
/// "advection" and the boundary Riemann fixture names.
std::vector<std::string> problem_names();
IBVPProblem problem_by_name(const std::string& name);

}  // namespace ibvp
