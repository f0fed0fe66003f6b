#include <cmath>
#include <vector>

#include "doctest.h"
#include "ibvp/boundary_admissibility.hpp"
#include "ibvp/fixtures.hpp"
#include "ibvp/residuals.hpp"

using namespace ibvp;

namespace {

constexpr double kBumpMass = 32.0 / 35.0;

// Boundary bump at x = 0 or 1: support t in [0.2, 0.8], x within 0.2.
TestFunction bump_at(double xi) { return {"edge", 0.5, 0.3, xi, 0.2}; }

// int phi(t, xi) dt for bump_at.
double edge_mass() { return 0.3 * kBumpMass; }

}  // namespace

TEST_CASE("bump profile values and antiderivative") {
  CHECK(bump_profile(0.0) == 1.0);
  CHECK(bump_profile(1.0) == 0.0);
  CHECK(bump_profile(-1.0) == 0.0);
  CHECK(bump_profile(1.5) == 0.0);
  CHECK(bump_profile_integral(-1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(bump_profile_integral(1.0) == doctest::Approx(kBumpMass).epsilon(1e-15));
  CHECK(bump_profile_integral(3.0) == bump_profile_integral(1.0));
  CHECK(bump_profile_integral(0.0) == doctest::Approx(0.5 * kBumpMass));
  for (double s : {-0.9, -0.3, 0.2, 0.7}) {
    const double h = 1e-6;
    CHECK(bump_profile_prime(s) ==
          doctest::Approx((bump_profile(s + h) - bump_profile(s - h)) / (2 * h))
              .epsilon(1e-7));
    CHECK(bump_profile(s) ==
          doctest::Approx((bump_profile_integral(s + h) -
                           bump_profile_integral(s - h)) / (2 * h))
              .epsilon(1e-7));
  }
}

TEST_CASE("test function factors and moments") {
  const TestFunction phi("p", 0.5, 0.25, 0.3, 0.1, 2.0);
  CHECK(phi.t_lo() == doctest::Approx(0.25));
  CHECK(phi.x_hi() == doctest::Approx(0.4));
  CHECK(phi.phi(0.5, 0.3) == doctest::Approx(2.0));
  CHECK(phi.time_integral(0.0, 1.0) == doctest::Approx(2.0 * 0.25 * kBumpMass));
  CHECK(phi.space_integral(-1.0, 1.0) == doctest::Approx(0.1 * kBumpMass));
  CHECK(phi.time_jump(0.0, 0.5) == doctest::Approx(2.0));
  CHECK(phi.dphi_dx(0.5, 0.3) == doctest::Approx(0.0));
  const double h = 1e-6;
  CHECK(phi.dphi_dt(0.6, 0.32) ==
        doctest::Approx((phi.phi(0.6 + h, 0.32) - phi.phi(0.6 - h, 0.32)) / (2 * h))
            .epsilon(1e-6));
  CHECK(phi.scaled(3.0).phi(0.55, 0.31) == doctest::Approx(3.0 * phi.phi(0.55, 0.31)));
  CHECK_THROWS_AS(TestFunction("bad", 0.0, 0.0, 0.0, 1.0), Error);
}

TEST_CASE("bump family tiles the box") {
  const auto fam = bump_family({0.1, 0.9, 0.0, 1.0}, 9);
  REQUIRE(fam.size() == 9);
  for (const auto& f : fam) {
    CHECK(f.t_lo() >= 0.1 - 1e-12);
    CHECK(f.t_hi() <= 0.9 + 1e-12);
    CHECK(f.x_lo() >= -1e-12);
    CHECK(f.x_hi() <= 1.0 + 1e-12);
  }
  CHECK(bump_family({0.0, 1.0, 0.0, 1.0}, 5).size() == 5);
  CHECK_THROWS_AS(bump_family({0.0, 0.0, 0.0, 1.0}, 4), Error);
  CHECK_THROWS_AS(bump_family({0.0, 1.0, 0.0, 1.0}, 0), Error);
  const auto std_fam = standard_test_functions(reference_problem());
  CHECK(std_fam.size() == 20);
  for (const auto& f : std_fam) CHECK(f.t_hi() < 1.0);
}

TEST_CASE("reference problem: boundary bump at the inflow end") {
  const auto problem = reference_problem();
  const auto field = constant_field(problem, 50, 40, 1.0);
  const GridView grid(field, problem);
  const SmoothView smooth(constant_candidate(1.0), problem);
  const auto phi = bump_at(0.0);
  for (double k : {-0.5, 0.0, 0.5, 0.9}) {
    for (double L : {0.5, 1.0, 2.0}) {
      const double expected = (1.0 - k) * (L - 0.5 * (1.0 + k)) * edge_mass();
      CHECK(residual_mv(grid, k, Sign::plus, phi, L).lhs ==
            doctest::Approx(expected).epsilon(1e-12));
      CHECK(residual_mv(smooth, k, Sign::plus, phi, L).lhs ==
            doctest::Approx(expected).epsilon(1e-9));
    }
  }
  // Below the threshold constant the bump at x = 0 sees a negative value.
  CHECK_FALSE(residual_mv(grid, 0.5, Sign::plus, phi, 0.5).passed);
  CHECK(residual_mv(grid, 0.5, Sign::plus, phi, 1.0).passed);
}

TEST_CASE("reference problem: boundary bump at the outflow end") {
  const auto problem = reference_problem();
  const auto field = constant_field(problem, 50, 40, 1.0);
  const GridView grid(field, problem);
  const auto phi = bump_at(1.0);
  for (double k : {-0.5, 0.0, 0.5}) {
    const double expected = 0.5 * (1.0 - k * k) * edge_mass();
    CHECK(residual_mv(grid, k, Sign::plus, phi, 1.0).lhs ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(residual_bln(grid, k, phi).lhs >= -1e-12);
  }
}

TEST_CASE("constant state is a zero of every residual on interior bumps") {
  const auto problem = reference_problem();
  const auto field = constant_field(problem, 64, 32, 1.0);
  const GridView grid(field, problem);
  const auto phis = bump_family({0.1, 0.9, 0.2, 0.8}, 4);
  const auto pair = smoothed_semi_pair(problem.flux, Sign::minus, 50);
  const auto ent = quadratic_pair(problem.flux, 0.3);
  for (const auto& phi : phis) {
    for (double k : {-1.5, 0.0, 0.7, 1.0, 2.0}) {
      CHECK(std::abs(residual_mv(grid, k, Sign::plus, phi, 1.0).lhs) < 1e-13);
      CHECK(std::abs(residual_mv(grid, k, Sign::minus, phi, 1.0).lhs) < 1e-13);
      CHECK(std::abs(residual_bln(grid, k, phi).lhs) < 1e-13);
      CHECK(std::abs(residual_re(grid, pair, k, phi, 1.0).lhs) < 1e-12);
    }
    CHECK(std::abs(residual_e(grid, ent, phi).lhs) < 1e-12);
  }
}

TEST_CASE("semi-Kruzkov residuals add up to the Kruzkov residual") {
  const auto problem = advection_problem();
  const auto field = sampled_field(problem, advection_candidate(), 80, 60);
  const GridView grid(field, problem);
  for (const auto& phi : bump_family({0.05, 0.45, 0.1, 0.9}, 6)) {
    for (double k : {0.3, 0.5, 0.6}) {
      const double plus = residual_mv(grid, k, Sign::plus, phi, 1.0).lhs;
      const double minus = residual_mv(grid, k, Sign::minus, phi, 1.0).lhs;
      CHECK(plus + minus ==
            doctest::Approx(residual_bln(grid, k, phi).lhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("residuals are linear in the test function") {
  const auto problem = reference_problem();
  const auto field = solve(problem, make_grid(problem, 100));
  const GridView grid(field, problem);
  const auto phi = bump_at(0.0);
  const auto pair = smoothed_semi_pair(problem.flux, Sign::plus, 20);
  const auto ent = smooth_abs_family(problem.flux, 0.2, 20);
  for (double lambda : {0.5, 3.0}) {
    const auto psi = phi.scaled(lambda);
    CHECK(residual_mv(grid, 0.3, Sign::plus, psi, 1.0).lhs ==
          doctest::Approx(lambda * residual_mv(grid, 0.3, Sign::plus, phi, 1.0).lhs));
    CHECK(residual_re(grid, pair, 0.3, psi, 1.0).lhs ==
          doctest::Approx(lambda * residual_re(grid, pair, 0.3, phi, 1.0).lhs));
    CHECK(residual_bln(grid, 0.3, psi).lhs ==
          doctest::Approx(lambda * residual_bln(grid, 0.3, phi).lhs));
    CHECK(residual_e(grid, ent, psi).lhs ==
          doctest::Approx(lambda * residual_e(grid, ent, phi).lhs));
  }
}

TEST_CASE("terminal variant subtracts the final-time entropy") {
  const auto problem = reference_problem();
  const auto field = constant_field(problem, 40, 20, 1.0);
  const GridView grid(field, problem);
  const SmoothView smooth(constant_candidate(1.0), problem);
  const TestFunction phi("late", 1.0, 0.3, 0.5, 0.2);
  const auto pair = smoothed_semi_pair(problem.flux, Sign::plus, 10);
  const double k = 0.2;
  const double H = pair.H(1.0, k);
  const double mass = 0.2 * kBumpMass;  // int phi(T, x) dx
  ResidualOptions with_terminal;
  with_terminal.terminal = true;
  for (const SolutionView* view : {static_cast<const SolutionView*>(&grid),
                                   static_cast<const SolutionView*>(&smooth)}) {
    CHECK(residual_re(*view, pair, k, phi, 1.0).lhs ==
          doctest::Approx(H * mass).epsilon(1e-9));
    CHECK(std::abs(residual_re(*view, pair, k, phi, 1.0, with_terminal).lhs) <
          1e-9);
  }
}

TEST_CASE("smoothed semi pairs converge to the semi-Kruzkov residual") {
  const auto problem = reference_problem();
  const auto field = solve(problem, make_grid(problem, 200));
  const GridView grid(field, problem);
  const auto phi = bump_at(0.0);
  const double k = 0.5;
  const double mv = residual_mv(grid, k, Sign::plus, phi, 1.0).lhs;
  std::vector<double> gaps;
  for (int n : {10, 100, 1000}) {
    const auto pair = smoothed_semi_pair(problem.flux, Sign::plus, n);
    gaps.push_back(std::abs(residual_re(grid, pair, k, phi, 1.0).lhs - mv));
  }
  // Slope of log gap against log n over three decades, and on the finest pair.
  CHECK(0.5 * std::log10(gaps[0] / gaps[2]) >= 0.9);
  CHECK(std::log10(gaps[1] / gaps[2]) >= 0.9);
  CHECK(gaps[2] < 2e-4);
}

TEST_CASE("inadmissible constant state has negative residuals") {
  const auto problem = inadmissible_problem();
  const auto field = constant_field(problem, 50, 40, -1.0);
  const GridView grid(field, problem);
  const SmoothView smooth(constant_candidate(-1.0), problem);
  const auto phi = bump_at(1.0);
  const double P = edge_mass();
  for (double k : {-0.5, 0.0, 0.5}) {
    CHECK(residual_bln(grid, k, phi).lhs ==
          doctest::Approx(-(1.0 - k * k) * P).epsilon(1e-12));
    CHECK(residual_bln(smooth, k, phi).lhs ==
          doctest::Approx(-(1.0 - k * k) * P).epsilon(1e-9));
    CHECK(residual_mv(grid, k, Sign::minus, phi, 1.0).lhs ==
          doctest::Approx(-0.5 * (1.0 - k * k) * P).epsilon(1e-12));
  }
  CHECK(residual_e(grid, quadratic_pair(problem.flux, 0.0), phi).lhs ==
        doctest::Approx(-4.0 / 3.0 * P).epsilon(1e-9));
  const auto sweep = definition_sweep(grid, Definition::bln);
  CHECK_FALSE(sweep.passed());
  CHECK(sweep.min_lhs < -0.1);
}

TEST_CASE("definition sweeps on the reference solution") {
  const auto problem = reference_problem();
  const auto field = solve(problem, make_grid(problem, 100));
  const GridView grid(field, problem);
  for (Definition d : {Definition::mv_plus, Definition::mv_minus,
                       Definition::bln, Definition::e}) {
    const auto s = definition_sweep(grid, d);
    CHECK_MESSAGE(s.passed(), to_string(d), " min lhs ", s.min_lhs);
    CHECK(s.reports.size() >= 33 * 20);
    CHECK(s.worst_report().lhs == s.min_lhs);
  }
  DefinitionSweepOptions opts;
  opts.ks = linspace(-2.0, 2.0, 9);
  const auto re = definition_sweep(grid, Definition::re, opts);
  CHECK(re.passed());
  CHECK(re.reports.size() == 9 * 20 * 2);
  CHECK(residual_summary_json(re).find("\"min_lhs\"") != std::string::npos);
}

TEST_CASE("grid and smooth views agree on sampled smooth data") {
  const auto problem = advection_problem();
  const auto cand = advection_candidate();
  const SmoothView smooth(cand, problem);
  const TestFunction phi("mid", 0.25, 0.15, 0.5, 0.3);
  const double exact = residual_bln(smooth, 0.5, phi).lhs;
  double prev = 1e9;
  for (int m : {40, 80, 160}) {
    const auto field = sampled_field(problem, cand, m, m);
    const double err = std::abs(residual_bln(GridView(field, problem), 0.5, phi).lhs - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("strong solution verifier") {
  const auto problem = advection_problem();
  const auto good = verify_strong(advection_candidate(), problem);
  CHECK(good.pde_ok);
  CHECK(good.initial_ok);
  CHECK(good.boundary_admissible);
  CHECK_MESSAGE(good.re_ok, "min lhs ", good.re_min_lhs);
  CHECK(good.passed());

  const auto bad = verify_strong(perturbed_advection_candidate(1e-3), problem);
  CHECK_FALSE(bad.pde_ok);
  CHECK_FALSE(bad.passed());

  const auto ref = verify_strong(constant_candidate(1.0), reference_problem());
  CHECK(ref.passed());
  const auto wrong = verify_strong(constant_candidate(-1.0), inadmissible_problem());
  CHECK_FALSE(wrong.boundary_admissible);
  CHECK_FALSE(wrong.passed());
}

TEST_CASE("boundary limit agrees with the pointwise condition") {
  const BoundaryWeight beta = [](double t, Side) {
    return bump_profile((t - 0.5) / 0.4);
  };
  const auto good_p = reference_problem();
  const auto good = solve(good_p, make_grid(good_p, 100));
  const auto bad_p = inadmissible_problem();
  const auto bad = constant_field(bad_p, 100, 50, -1.0);

  BoundarySample s;
  s.xi = point1(1.0);
  s.nu = point1(1.0);
  s.trace_u = -1.0;
  s.datum_ub = 1.0;
  const bool pointwise_bad = check_bln(s, bad_p.flux).admissible;
  CHECK_FALSE(pointwise_bad);

  bool any_negative = false;
  for (double k : linspace(-1.5, 1.5, 31)) {
    CHECK(boundary_limit_check(good, good_p, k, beta).passed);
    any_negative = any_negative || !boundary_limit_check(bad, bad_p, k, beta).passed;
  }
  CHECK(any_negative);

  const auto pair = distance_pair_limit(bad_p.flux, 0.0);
  const auto rep = boundary_limit_check(bad, bad_p, pair, beta);
  CHECK(rep.values.size() == 2);
  CHECK(rep.extrapolated < 0.0);
  CHECK(boundary_limit_check(good, good_p, distance_pair_limit(good_p.flux, 0.0), beta)
            .passed);
}
