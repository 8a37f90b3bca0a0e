#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rrk/analysis.hpp"
#include "rrk/problems.hpp"

using namespace rrk;

TEST_CASE("linear fit recovers an exact line") {
  const std::vector<double> x = {0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(2.5 * v - 1.0);
  const LinearFit f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.5));
  CHECK(f.intercept == doctest::Approx(-1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)linear_fit({1.0}, {2.0}), Error);
  CHECK_THROWS_AS((void)linear_fit({1.0, 1.0}, {2.0, 3.0}), Error);
}

TEST_CASE("order fit keeps errors inside the asymptotic window") {
  std::vector<double> dts = {0.4, 0.2, 0.1, 0.05, 0.025, 0.0125};
  std::vector<double> errs;
  for (double h : dts) errs.push_back(0.5 * std::pow(h, 3));
  errs[0] = 0.5;  // saturated, outside (100 eps, 0.1)
  const OrderFit f = fit_order(dts, errs);
  CHECK(f.window_samples == 5);
  CHECK(f.slope == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.reliable);
  CHECK(f.window.second == 0.2);
}

TEST_CASE("growth fit measures the late-time exponent") {
  std::vector<double> t, e;
  for (int k = 1; k <= 100; ++k) {
    t.push_back(10.0 * k);
    e.push_back(1e-8 * t.back() * t.back());
  }
  const GrowthFit f = fit_growth(t, e, 1000.0);
  CHECK(f.exponent == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f.window.first == doctest::Approx(200.0));
  std::vector<double> sat(e.size(), 0.7);
  try {
    (void)fit_growth(t, sat, 1000.0);
    FAIL("expected SaturatedWindow");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::SaturatedWindow);
  }
}

TEST_CASE("state error needs a reference and max drift is relative to max(1, |H0|)") {
  CHECK_THROWS_AS((void)state_error(lotka_volterra(), 1.0, Vector::Ones(2)), Error);
  const OdeProblem h = harmonic_oscillator();
  CHECK(state_error(h, 0.0, h.initial_state) == 0.0);
  CHECK(max_relative_drift({0.5, 0.5 + 1e-3, 0.5 - 2e-3}) == doctest::Approx(2e-3));
  CHECK(max_relative_drift({-200.0, -201.0}) == doctest::Approx(1.0 / 200.0));
}

TEST_CASE("convergence study of rk44 on the harmonic oscillator") {
  const OdeProblem p = harmonic_oscillator();
  const OrderFit f = convergence_order(p, &registry_get("rk44"), Scheme::Baseline, {0.2, 0.1, 0.05, 0.025}, 5.0);
  CHECK(f.slope == doctest::Approx(4.0).epsilon(0.05));
  CHECK(f.final_times.back() == 5.0);
}

TEST_CASE("convex hull of an inscribed regular polygon plus interior points") {
  for (int n : {3, 4, 7, 50}) {
    std::vector<Point2> pts;
    const double r = 1.7;
    for (int k = 0; k < n; ++k) {
      const double a = 2 * std::numbers::pi * k / n + 0.3;
      pts.push_back({r * std::cos(a) + 2.0, r * std::sin(a) - 1.0});
    }
    for (int k = 0; k < 20; ++k) pts.push_back({2.0 + 0.1 * std::cos(k), -1.0 + 0.1 * std::sin(k)});
    const HullArea h = convex_hull_area_2d(pts);
    CAPTURE(n);
    CHECK(h.area == doctest::Approx(0.5 * n * r * r * std::sin(2 * std::numbers::pi / n)).epsilon(1e-13));
    CHECK(h.vertices == static_cast<std::size_t>(n));
    CHECK_FALSE(h.degenerate);
  }
  const HullArea line = convex_hull_area_2d({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  CHECK(line.degenerate);
  CHECK(line.area == 0.0);
  CHECK_THROWS_AS((void)convex_hull_area_2d({{0, 0}, {1, 0}}), Error);
}

TEST_CASE("disk cloud is seeded, bounded and perturbs only the chosen coordinates") {
  Vector c(4);
  c << 1.0, 2.0, 3.0, 4.0;
  const auto a = disk_cloud(c, 0.1, 200, 42, 1, 3);
  const auto b = disk_cloud(c, 0.1, 200, 42, 1, 3);
  const auto d = disk_cloud(c, 0.1, 200, 43, 1, 3);
  REQUIRE(a.size() == 200);
  bool differs = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k] == b[k]);
    differs = differs || a[k] != d[k];
    CHECK(a[k](0) == 1.0);
    CHECK(a[k](2) == 3.0);
    CHECK(std::hypot(a[k](1) - 2.0, a[k](3) - 4.0) <= 0.1);
  }
  CHECK(differs);
}

TEST_CASE("symplectic Euler preserves phase area on a linear flow") {
  const OdeProblem p = harmonic_oscillator();
  const Stepper s(p, nullptr, Scheme::SymplecticEuler);
  const auto cloud = disk_cloud(p.initial_state, 1e-2, 50);
  const VolumeSeries v = volume_series(s, cloud, 0.1, 10.0, 5);
  CHECK(v.times.front() == 0.0);
  CHECK(v.times.back() == doctest::Approx(10.0));
  for (double rc : v.relative_change) CHECK(std::abs(rc) <= 1e-9);
}

TEST_CASE("kinetic temperature of trivial configurations") {
  Vector u(4);
  u << 0.0, 0.0, 1.0, 1.0;  // one atom in 2D, p = (1, 1)
  CHECK(kinetic_temperature(u, {1.0}, 1.0, 2) == doctest::Approx(1.0));
  CHECK(kinetic_temperature(u, {2.0}, 1.0, 2) == doctest::Approx(0.5));
  CHECK(kinetic_temperature(u, {1.0}, 4.0, 2) == doctest::Approx(0.25));
  Vector still = Vector::Zero(8);
  CHECK(kinetic_temperature(still, {1.0, 1.0}, 1.0, 2) == 0.0);
}

TEST_CASE("alternating factorial identity: hand cases and sweep") {
  const LemmaA2Check a = verify_lemma_a2(1, 1);
  CHECK(a.exact);
  CHECK(a.lhs == "1");
  const LemmaA2Check b = verify_lemma_a2(3, 2);
  CHECK(b.exact);
  CHECK(b.lhs == "-1/12");
  CHECK(b.rhs == "-1/12");
  CHECK(b.residual == 0.0);
  const auto sweep = lemma_a2_sweep(12);
  CHECK(sweep.size() == 42);
  for (const auto& c : sweep) CHECK(c.exact);
  CHECK_THROWS_AS((void)verify_lemma_a2(3, 3), Error);
}

TEST_CASE("Poincare crossings of the harmonic oscillator occur at 3 pi / 2 + 2 pi k") {
  const OdeProblem p = harmonic_oscillator();
  const Tableau& t = registry_get("rk44");
  const Trajectory traj = integrate(p, &t, Scheme::Baseline, p.initial_state, 0.0, 20.0, 0.1);
  SectionPlane plane;
  plane.record = {0, 1};
  const auto pts = poincare_section(traj, p, plane);
  REQUIRE(pts.size() == 3);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    CHECK(pts[k].t == doctest::Approx(1.5 * std::numbers::pi + 2 * std::numbers::pi * k).epsilon(1e-5));
    CHECK(std::abs(pts[k].coords[0]) <= 1e-12);
    CHECK(pts[k].coords[1] == doctest::Approx(-1.0).epsilon(1e-5));
  }
  plane.direction = CrossingDirection::Both;
  CHECK(poincare_section(traj, p, plane).size() == 6);

  const Stepper stepper(p, &t, Scheme::Baseline);
  plane.direction = CrossingDirection::Positive;
  const auto refined = poincare_section(traj, p, plane, stepper_refiner(stepper));
  REQUIRE(refined.size() == 3);
  for (const auto& pt : refined) CHECK(std::abs(pt.state(0)) <= 1e-13);

  CHECK(parse_crossing_direction("both") == CrossingDirection::Both);
  CHECK(to_string(CrossingDirection::Negative) == "negative");
  CHECK_THROWS_AS((void)parse_crossing_direction("up"), Error);
}

TEST_CASE("gamma asymptotics: heun3 exponent 2 with the predicted constant, rk44 flagged as even") {
  const OdeProblem p = harmonic_oscillator();
  const GammaAsymptotics g = gamma_asymptotic_check(registry_get("heun3"), p, {0.1, 0.05, 0.025, 0.0125});
  CHECK(g.applicable);
  CHECK(g.order == 3);
  CHECK(g.exponent == doctest::Approx(2.0).epsilon(0.05));
  // |alpha_4 - 1/24| = 1/24 for a three-stage method; |L^2 u|^2 / |L u|^2 = 1
  CHECK(g.predicted_constant == doctest::Approx(1.0 / 12.0));
  CHECK(g.relative_deviation <= 0.05);
  const GammaAsymptotics e = gamma_asymptotic_check(registry_get("rk44"), p, {0.1, 0.05, 0.025});
  CHECK_FALSE(e.applicable);
  CHECK_THROWS_AS((void)gamma_asymptotic_check(registry_get("heun3"), lotka_volterra(), {0.1, 0.05}), Error);
}
