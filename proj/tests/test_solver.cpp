#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "ibvp/boundary_admissibility.hpp"
#include "ibvp/fixtures.hpp"
#include "ibvp/solver.hpp"

using namespace ibvp;

TEST_CASE("Godunov flux for Burgers") {
  const auto f = make_flux("burgers");
  CHECK(godunov_numflux(f, 0, 0, -1.0, 1.0) == 0.0);  // transonic rarefaction
  CHECK(godunov_numflux(f, 0, 0, 1.0, -1.0) == 0.5);  // stationary shock
  CHECK(godunov_numflux(f, 0, 0, 0.5, 0.5) == 0.125);
  CHECK(godunov_numflux(f, 0, 0, 0.2, 0.7) == doctest::Approx(0.02));
  CHECK(godunov_numflux(f, 0, 0, -0.7, -0.2) == doctest::Approx(0.02));
  CHECK(godunov_numflux(f, 0, 0, 0.9, -0.4) == doctest::Approx(0.405));
}

TEST_CASE("Godunov flux for a non-convex flux is monotone") {
  const auto f = make_flux("buckley-leverett");
  for (double a : linspace(-1.0, 2.0, 13)) {
    for (double b : linspace(-1.0, 2.0, 13)) {
      const double h = 1e-3;
      CHECK(godunov_numflux(f, 0, 0, a + h, b) >= godunov_numflux(f, 0, 0, a, b) - 1e-12);
      CHECK(godunov_numflux(f, 0, 0, a, b + h) <= godunov_numflux(f, 0, 0, a, b) + 1e-12);
    }
  }
}

TEST_CASE("grid validation") {
  const auto p = reference_problem();
  CHECK_THROWS_AS(make_grid(p, 3), Error);
  CHECK_THROWS_AS(make_grid(p, 10, 0.0), Error);
  CHECK_THROWS_AS(make_grid(p, 10, 1.5), Error);
  IBVPProblem bad = p;
  bad.b = bad.a;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("constant states are preserved exactly") {
  IBVPProblem p = boundary_riemann_problem({"flat", 0.7, 0.7}, 1.0);
  const auto field = solve(p, make_grid(p, 1000));
  CHECK(field.steps() > 1000);
  double drift = 0.0;
  for (const auto& snap : field.snapshots) {
    for (double v : snap) drift = std::max(drift, std::abs(v - 0.7));
  }
  CHECK(drift <= 1e-14);
}

TEST_CASE("reference problem keeps the state 1 and its traces") {
  const auto p = reference_problem();
  const auto field = solve(p, make_grid(p, 200));
  CHECK(field.times.back() == 1.0);
  for (const auto& snap : field.snapshots) {
    for (double v : snap) CHECK(v == 1.0);
  }
  for (Side side : {Side::left, Side::right}) {
    for (const auto& tp : extract_trace(field, side, true)) {
      CHECK(tp.value == 1.0);
      CHECK(tp.quality == 0.0);
    }
  }
  BoundarySample s;
  s.xi = point1(1.0);
  s.nu = point1(1.0);
  s.trace_u = 1.0;
  s.datum_ub = -1.0;
  CHECK(check_bln(s, p.flux).admissible);
}

TEST_CASE("inflow state -1 is kept when the left datum is 1") {
  IBVPProblem p = reference_problem();
  p.u0 = [](double) { return -1.0; };
  p.ub_left = [](double) { return 1.0; };
  p.ub_right = [](double) { return -1.0; };
  const auto field = solve(p, make_grid(p, 100));
  for (double v : field.snapshots.back()) CHECK(v == -1.0);
  BoundarySample s;
  s.xi = point1(0.0);
  s.nu = point1(-1.0);
  s.trace_u = -1.0;
  s.datum_ub = 1.0;
  CHECK(check_bln(s, p.flux).admissible);
}

TEST_CASE("maximum principle and conservation on the fixture suite") {
  for (const auto& name : problem_names()) {
    CAPTURE(name);
    const auto p = problem_by_name(name);
    const auto field = solve(p, make_grid(p, 160));
    CHECK(field.max_conservation_defect <= 1e-12);
    if (field.max_principle_checked) CHECK(field.max_principle_violation == 0.0);
  }
  for (auto [uL, uR] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {-1.0, 1.0}, {1.0, -1.0}}) {
    const auto r = interior_riemann(uL, uR);
    const auto field = solve(r.problem, make_grid(r.problem, 200));
    CHECK(field.max_principle_checked);
    CHECK(field.max_principle_violation == 0.0);
    CHECK(field.max_conservation_defect <= 1e-12);
  }
}

TEST_CASE("source terms and non-autonomous fluxes run") {
  IBVPProblem p = advection_problem();
  p.flux = with_linear_source(p.flux, -0.5);
  const auto field = solve(p, make_grid(p, 100));
  CHECK_FALSE(field.max_principle_checked);
  CHECK(field.max_conservation_defect <= 1e-12);
  IBVPProblem q = advection_problem();
  q.flux = make_flux("nonautonomous-demo");
  CHECK(solve(q, make_grid(q, 100)).max_conservation_defect <= 1e-12);
}

TEST_CASE("L1 convergence on interior Riemann problems") {
  for (auto [uL, uR] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {-1.0, 1.0}}) {
    const auto r = interior_riemann(uL, uR);
    CAPTURE(r.name);
    const double e1 = l1_error(solve(r.problem, make_grid(r.problem, 100)), r.exact);
    const double e2 = l1_error(solve(r.problem, make_grid(r.problem, 400)), r.exact);
    const double order = std::log2(e1 / e2) / 2.0;
    MESSAGE(r.name, " L1 order ", order);
    CHECK(order >= 0.5);
  }
}

TEST_CASE("outflow trace of smooth advection converges") {
  const auto p = advection_problem();
  const auto cand = advection_candidate();
  double prev_plain = 1e9, prev_rich = 1e9;
  for (int m : {50, 100, 200}) {
    const auto field = solve(p, make_grid(p, m));
    double plain = 0.0, rich = 0.0;
    const auto a = extract_trace(field, Side::right, false);
    const auto b = extract_trace(field, Side::right, true);
    for (std::size_t n = 0; n < a.size(); ++n) {
      const double exact = cand.u(a[n].t, 1.0);
      plain = std::max(plain, std::abs(a[n].value - exact));
      rich = std::max(rich, std::abs(b[n].value - exact));
    }
    CHECK(plain < prev_plain);
    CHECK(rich < prev_rich);
    prev_plain = plain;
    prev_rich = rich;
  }
  CHECK(prev_rich < 0.05);
  CHECK_THROWS_AS(extract_trace(Field1D{}, Side::left), Error);
}

TEST_CASE("binary and CSV output") {
  const auto p = advection_problem();
  const auto field = solve(p, make_grid(p, 40));
  const auto dir = std::filesystem::temp_directory_path() / "ibvp_solver_test";
  std::filesystem::create_directories(dir);
  const auto bin = (dir / "field.bin").string();
  write_field_binary(field, bin);
  const auto back = read_field_binary(bin);
  REQUIRE(back.cells == field.cells);
  REQUIRE(back.times.size() == field.times.size());
  CHECK(back.a == field.a);
  CHECK(back.b == field.b);
  CHECK(back.T == field.T);
  for (std::size_t n = 0; n < field.times.size(); ++n) {
    CHECK(back.times[n] == field.times[n]);
    CHECK(back.snapshots[n] == field.snapshots[n]);
    CHECK(back.trace_left[n][0] == field.trace_left[n][0]);
    CHECK(back.trace_right[n][1] == field.trace_right[n][1]);
  }
  std::ofstream(dir / "junk.bin") << "NOTAFIELD";
  CHECK_THROWS_AS(read_field_binary((dir / "junk.bin").string()), Error);

  const auto csv = (dir / "field.csv").string();
  write_field_csv(field, csv);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x,u");
  write_trace_csv(field, (dir / "trace.csv").string());
  std::ifstream tin(dir / "trace.csv");
  std::getline(tin, header);
  CHECK(header == "t,side,offset,value");
  std::filesystem::remove_all(dir);
}
