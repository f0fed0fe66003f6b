#include "doctest.h"

#include <cmath>

#include "ibvp/entropy_core.hpp"

using namespace ibvp;

namespace {

FluxModel sine_flux() {
  FluxDefinition def;
  def.name = "sine";
  def.autonomous = true;
  def.f = [](double, const SpaceVec&, double u) {
    return SpaceVec{std::sin(u), 0.0, 0.0};
  };
  def.df_du = [](double, const SpaceVec&, double u) {
    return SpaceVec{std::cos(u), 0.0, 0.0};
  };
  return FluxModel(def);
}

}  // namespace

TEST_CASE("sign helpers") {
  CHECK(sgn(0.0) == 0.0);
  CHECK(sgn_plus(0.0) == 0.0);
  CHECK(sgn_minus(0.0) == 0.0);
  CHECK(sgn_plus(2.0) == 1.0);
  CHECK(sgn_minus(-2.0) == -1.0);
  for (double s : {-3.0, -0.5, 0.0, 0.25, 4.0}) {
    CHECK(neg_part(-s) == pos_part(s));
    CHECK(pos_part(-s) == neg_part(s));
    CHECK(pos_part(s) + neg_part(s) == std::abs(s));
  }
}

TEST_CASE("interval hull and membership") {
  CHECK(interval_hull(2, 2).lo == 2);
  CHECK(interval_hull(2, 2).hi == 2);
  CHECK(interval_hull(1, -1).lo == -1);
  CHECK(interval_hull(1, -1).hi == 1);
  CHECK(in_hull(0.5, -1, 1));
  CHECK_FALSE(in_hull(1.5, -1, 1));
}

TEST_CASE("catalog fluxes") {
  auto b = make_flux("burgers");
  CHECK(b.f1(0, 0, 2.0) == 2.0);
  auto lin = make_flux("linear:-1.5");
  CHECK(lin.df1(0, 0, 3.0) == -1.5);
  auto bl = make_flux("buckley-leverett");
  CHECK(bl.f1(0, 0, 1.0) == doctest::Approx(1.0));
  CHECK(bl.f1(0, 0, 0.0) == 0.0);
  auto na = make_flux("nonautonomous-demo");
  CHECK_FALSE(na.autonomous());
  // a(1/4) = 1.5, a'(0) = pi.
  CHECK(na.f1(0, 0.25, 2.0) == doctest::Approx(3.0));
  CHECK(na.div_f(0, point1(0.0), 2.0) == doctest::Approx(2.0 * M_PI));
  CHECK_THROWS_AS(make_flux("nope"), Error);
  CHECK_THROWS_AS(make_flux("linear:x"), Error);
  for (const char* name : {"burgers", "linear:2", "buckley-leverett",
                           "nonautonomous-demo"}) {
    CHECK(verify_flux(make_flux(name), 500).passed());
  }
}

TEST_CASE("flux self-check rejects a wrong derivative") {
  FluxDefinition def;
  def.name = "bad";
  def.f = [](double, const SpaceVec&, double u) { return SpaceVec{u * u, 0, 0}; };
  def.df_du = [](double, const SpaceVec&, double u) { return SpaceVec{u, 0, 0}; };
  CHECK_THROWS_AS(FluxModel{def}, Error);
}

TEST_CASE("finite-difference fallback") {
  FluxDefinition def;
  def.name = "cubic";
  def.autonomous = true;
  def.f = [](double, const SpaceVec&, double u) { return SpaceVec{u * u * u, 0, 0}; };
  FluxModel m(def);
  CHECK(m.derivative_mode() == DerivativeMode::finite_difference);
  CHECK(m.df1(0, 0, 2.0) == doctest::Approx(12.0).epsilon(1e-8));
}

TEST_CASE("lipschitz_norm") {
  CHECK(lipschitz_norm(make_flux("burgers"), 1.0, {}, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lipschitz_norm(make_flux("linear:-3"), 1.0, {}, 5.0) == 3.0);
  CHECK(lipschitz_norm(sine_flux(), 1.0, {}, M_PI) ==
        doctest::Approx(1.0).epsilon(1e-10));
  // max |a(x) u| = 1.5 * U.
  CHECK(lipschitz_norm(make_flux("nonautonomous-demo"), 1.0, {}, 2.0) ==
        doctest::Approx(3.0).epsilon(1e-3));
  auto bl = make_flux("buckley-leverett");
  double prev = 0.0;
  for (double U : {0.25, 0.5, 1.0, 2.0}) {
    const double L = lipschitz_norm(bl, 1.0, {}, U);
    CHECK(L >= prev * (1.0 - 1e-12));
    prev = L;
  }
}

TEST_CASE("kruzkov and semi-kruzkov pairs") {
  auto b = make_flux("burgers");
  auto kp = kruzkov_pair(b, 0.0);
  CHECK(kp.q(0, point1(0), 2.0)[0] == 2.0);
  CHECK(kp.eta(0.0) == 0.0);
  CHECK(kp.q(0, point1(0), 0.0)[0] == 0.0);

  auto minus = semi_kruzkov_pair(b, 1.0, Sign::minus);
  CHECK(minus.eta(-1.0) == 2.0);
  CHECK(minus.q(0, point1(0), -1.0)[0] == 0.0);

  for (double k : {-1.0, 0.3}) {
    auto full = kruzkov_pair(b, k);
    auto p = semi_kruzkov_pair(b, k, Sign::plus);
    auto m = semi_kruzkov_pair(b, k, Sign::minus);
    for (double u = -2.0; u <= 2.0; u += 0.125) {
      CHECK(full.eta(u) == p.eta(u) + m.eta(u));
      CHECK(full.q(0, point1(0), u)[0] ==
            p.q(0, point1(0), u)[0] + m.q(0, point1(0), u)[0]);
    }
  }
  CHECK(verify_entropy_pair(kp, b).passed());
  CHECK(verify_entropy_pair(kruzkov_pair_quadrature(b, 0.4), b).passed());
  auto na = make_flux("nonautonomous-demo");
  CHECK(verify_entropy_pair(kruzkov_pair(na, -0.2), na, 300).passed());
}

TEST_CASE("corrupted pair fails convexity") {
  auto b = make_flux("burgers");
  auto cubic = entropy_pair_from_eta(
      b, "cubic", [](double u) { return u * u * u; },
      [](double u) { return 3 * u * u; }, 0.0);
  auto r = verify_entropy_pair(cubic, b, 200);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(r.check("convexity").passed);
  CHECK(r.check("compatibility").passed);
}

TEST_CASE("quadratic pair flux matches closed form") {
  auto b = make_flux("burgers");
  auto qp = quadratic_pair(b, 0.0);
  // q(u) = int_0^u 2 s * s ds = 2 u^3 / 3.
  CHECK(qp.q(0, point1(0), 1.0)[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(qp.q(0, point1(0), -1.0)[0] == doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("smooth_abs_family") {
  auto b = make_flux("burgers");
  for (int n : {10, 100, 1000}) {
    auto p = smooth_abs_family(b, 0.0, n);
    CHECK(p.eta(0.0) == doctest::Approx(1.0 / std::sqrt(n)).epsilon(1e-14));
    double worst = 0.0;
    for (double z = -2.0; z <= 2.0; z += 1.0 / 512) {
      worst = std::max(worst, std::abs(p.eta(z) - std::abs(z)));
      // eta'' = delta / (a^2 + delta)^{3/2} > 0.
      const double d = 1.0 / n;
      CHECK(d / std::pow(z * z + d, 1.5) > 0.0);
    }
    CHECK(worst <= 1.0 / std::sqrt(n) + 1e-15);
  }
  CHECK(verify_entropy_pair(smooth_abs_family(b, 0.2, 100), b, 300).passed());
}

TEST_CASE("smoothed_semi_pair") {
  auto b = make_flux("burgers");
  for (Sign s : {Sign::plus, Sign::minus}) {
    for (int n : {10, 100, 1000}) {
      auto p = smoothed_semi_pair(b, s, n);
      CHECK(p.H(0.3, 0.3) == 0.0);
      double worst = 0.0;
      for (double z = -2.0; z <= 2.0; z += 1.0 / 512) {
        worst = std::max(worst, std::abs(p.H(z, 0.0) - semi_part(s, z)));
      }
      CHECK(worst <= 1.0 / n + 1e-15);
    }
  }
  // Q_n(1, 0) -> f(1) - f(0) = 0.5 at rate 1/n.
  double prev = 1.0;
  for (int n : {10, 100, 1000}) {
    auto p = smoothed_semi_pair(b, Sign::plus, n);
    const double err = std::abs(p.Q(0, point1(0), 1.0, 0.0)[0] - 0.5);
    CHECK(err <= 1.0 / n);
    CHECK(err < prev);
    prev = err;
  }
  auto r = verify_boundary_pair(smoothed_semi_pair(b, Sign::minus, 10), b);
  CHECK(r.passed());
  CHECK(r.check("diagonal-H").max_violation == 0.0);
}

TEST_CASE("distance pairs") {
  auto b = make_flux("burgers");
  CHECK(hull_distance(0.5, 0.0, 1.0) == 0.0);
  CHECK(hull_distance(2.0, 0.0, 1.0) == 1.0);
  for (double u : {-2.0, 0.4, 1.7}) {
    CHECK(hull_distance(u, -0.3, 1.1) == hull_distance(u, 1.1, -0.3));
  }
  auto lim = distance_pair_limit(b, 1.0);
  CHECK(lim.Q(0, point1(0), 2.0, 0.0)[0] == doctest::Approx(1.5).epsilon(1e-12));
  auto fam = distance_pair_family(b, 1.0, 1000);
  CHECK(fam.H(0.5, 0.0) == 0.0);
  CHECK(std::abs(fam.Q(0, point1(0), 2.0, 0.0)[0] - 1.5) < 1e-2);
  CHECK(verify_boundary_pair(fam, b, 300).passed());
}

TEST_CASE("shifted pairs") {
  auto b = make_flux("burgers");
  const double k = 0.2;
  auto base = kruzkov_pair(b, k);
  auto lim = shifted_pair_limit(base, b, k);
  // w <= z <= k row.
  CHECK(lim.H(0.1, -0.5) == 0.0);
  CHECK(lim.H(-1.0, -0.5) == doctest::Approx(0.5));

  auto fam = shifted_pair_family(base, b, k, 50);
  CHECK(std::abs(fam.H(k, k)) <= 2.0 / 50);
  // |Q~ - q| <= L eta(w) with L = 2 on [-2, 2].
  for (double z : {-1.5, -0.2, 0.7, 1.9}) {
    for (double w : {-1.0, 0.0, 0.5, 1.5}) {
      const double diff = std::abs(lim.Q(0, point1(0), z, w)[0] -
                                   base.q(0, point1(0), z)[0]);
      CHECK(diff <= 2.0 * base.eta(w) + 1e-14);
    }
  }
  // Locally uniform convergence to the limit pair.
  double prev = 1e9;
  for (int n : {10, 40, 160}) {
    auto p = shifted_pair_family(base, b, k, n);
    double worst = 0.0;
    for (double z : {-1.3, -0.4, 0.9, 1.6}) {
      worst = std::max(worst, std::abs(p.H(z, -0.6) - lim.H(z, -0.6)));
    }
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK(verify_boundary_pair(fam, b, 100).passed());
  CHECK_THROWS_AS(shifted_pair_family(smooth_abs_family(b, k, 10), b, k, 10),
                  Error);
}

TEST_CASE("mollifier has unit mass") {
  CHECK(integrate_value(mollifier, -1, 1, {1e-14, 1e-12, 4000}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mollifier(1.0) == 0.0);
}
