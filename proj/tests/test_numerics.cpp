#include "doctest.h"

#include <cmath>
#include <vector>

#include "ibvp/numerics.hpp"

using namespace ibvp;

TEST_CASE("polynomial bump integrates to 32/35") {
  auto bump = [](double s) { return std::pow(1.0 - s * s, 3); };
  const auto r = integrate(bump, -1.0, 1.0);
  CHECK(r.value == doctest::Approx(32.0 / 35.0).epsilon(1e-12));
}

TEST_CASE("reversed limits negate and breakpoints handle kinks") {
  auto g = [](double s) { return std::abs(s - 0.3); };
  const double exact = 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7;
  const std::vector<double> kinks{0.3};
  CHECK(integrate_value(g, -1.0, 1.0, {}, kinks) ==
        doctest::Approx(exact).epsilon(1e-13));
  CHECK(integrate_value(g, 1.0, -1.0, {}, kinks) ==
        doctest::Approx(-exact).epsilon(1e-13));
  // Without the breakpoint adaptation still converges.
  CHECK(integrate_value(g, -1.0, 1.0) == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("budget exhaustion throws") {
  auto wild = [](double s) { return std::sin(1.0 / (s + 1e-300)); };
  CHECK_THROWS_AS(integrate(wild, 0.0, 1.0, {1e-15, 1e-15, 20}),
                  QuadratureError);
}

TEST_CASE("halton points are in the unit cube and distinct") {
  Halton h(3);
  auto a = h.next();
  auto b = h.next();
  for (double v : a) CHECK((v > 0.0 && v < 1.0));
  CHECK(a != b);
  CHECK_THROWS_AS(Halton(9), Error);
}

TEST_CASE("maximize finds interior and endpoint maxima") {
  auto m = maximize([](double x) { return -(x - 0.3) * (x - 0.3); }, -1, 1);
  CHECK(m.arg == doctest::Approx(0.3).epsilon(1e-7));
  auto e = maximize([](double x) { return x; }, -1, 2);
  CHECK(e.value == 2.0);
  auto n = minimize([](double x) { return x * x; }, -1, 1);
  CHECK(std::abs(n.value) < 1e-14);
}

TEST_CASE("linspace includes endpoints") {
  auto v = linspace(-2.0, 2.0, 5);
  CHECK(v.size() == 5);
  CHECK(v.front() == -2.0);
  CHECK(v.back() == 2.0);
  CHECK(v[2] == 0.0);
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("splitmix64 and fnv1a are deterministic") {
  CHECK(splitmix64(1) == splitmix64(1));
  CHECK(splitmix64(1) != splitmix64(2));
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
