#include "ibvp/fixtures.hpp"

#include <cmath>
#include <numbers>

namespace ibvp {

namespace {

IBVPProblem constant_problem(double u0, double left, double right) {
  IBVPProblem p;
  p.flux = make_flux("burgers");
  p.u0 = [u0](double) { return u0; };
  p.ub_left = [left](double) { return left; };
  p.ub_right = [right](double) { return right; };
  return p;
}

double advection_profile(double s) {
  return 0.5 + 0.25 * std::sin(2.0 * std::numbers::pi * s);
}

}  // namespace

IBVPProblem reference_problem() { return constant_problem(1.0, 1.0, -1.0); }

IBVPProblem inadmissible_problem() { return constant_problem(-1.0, -1.0, 1.0); }

IBVPProblem advection_problem() {
  IBVPProblem p;
  p.flux = make_flux("linear:1");
  p.u0 = advection_profile;
  p.ub_left = [](double t) { return advection_profile(-t); };
  p.ub_right = [](double) { return 0.0; };
  p.T = 0.5;
  return p;
}

SmoothCandidate advection_candidate() {
  constexpr double w = 2.0 * std::numbers::pi;
  return {"advection",
          [](double t, double x) { return advection_profile(x - t); },
          [](double t, double x) { return -0.25 * w * std::cos(w * (x - t)); },
          [](double t, double x) { return 0.25 * w * std::cos(w * (x - t)); }};
}

SmoothCandidate perturbed_advection_candidate(double eps) {
  constexpr double pi = std::numbers::pi;
  auto base = advection_candidate();
  return {"advection-perturbed",
          [base, eps](double t, double x) {
            return base.u(t, x) + eps * std::sin(pi * x) * std::sin(pi * t);
          },
          [base, eps](double t, double x) {
            return base.du_dt(t, x) + eps * pi * std::sin(pi * x) * std::cos(pi * t);
          },
          [base, eps](double t, double x) {
            return base.du_dx(t, x) + eps * pi * std::cos(pi * x) * std::sin(pi * t);
          }};
}

SmoothCandidate constant_candidate(double value) {
  return {"constant", [value](double, double) { return value; },
          [](double, double) { return 0.0; }, [](double, double) { return 0.0; }};
}

std::vector<BoundaryRiemann> boundary_riemann_suite() {
  return {{"outflow", -1.0, 1.0},
          {"outflow-supersonic", 1.0, 0.5},
          {"inflow-shock", -1.0, -0.5},
          {"inflow-rarefaction", -0.5, -1.0},
          {"transonic", 1.0, -1.0},
          {"zero-speed", -1.0, 0.0}};
}

IBVPProblem boundary_riemann_problem(const BoundaryRiemann& r, double T) {
  IBVPProblem p = constant_problem(r.state, r.state, r.ghost);
  p.T = T;
  return p;
}

InteriorRiemann interior_riemann(double uL, double uR) {
  InteriorRiemann r;
  r.name = "riemann(" + std::to_string(uL) + "," + std::to_string(uR) + ")";
  r.problem = constant_problem(uL, uL, uR);
  r.problem.u0 = [uL, uR](double x) { return x < 0.0 ? uL : uR; };
  r.problem.a = -1.0;
  r.problem.b = 1.0;
  r.problem.T = 0.5;
  r.exact = [uL, uR](double t, double x) {
    if (t <= 0.0) return x < 0.0 ? uL : uR;
    const double xi = x / t;
    if (uL > uR) return xi < 0.5 * (uL + uR) ? uL : uR;
    if (xi <= uL) return uL;
    if (xi >= uR) return uR;
    return xi;
  };
  return r;
}

std::vector<std::string> problem_names() {
  std::vector<std::string> names = {"reference", "inadmissible", "advection"};
  for (const auto& r : boundary_riemann_suite()) names.push_back(r.name);
  return names;
}

IBVPProblem problem_by_name(const std::string& name) {
  if (name == "reference") return reference_problem();
  if (name == "inadmissible") return inadmissible_problem();
  if (name == "advection") return advection_problem();
  for (const auto& r : boundary_riemann_suite()) {
    if (r.name == name) return boundary_riemann_problem(r);
  }
  throw Error("unknown problem '" + name + "'");
}

}  // namespace ibvp
