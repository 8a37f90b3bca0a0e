#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <complex>
#include <random>

#include "doctest.h"
#include "rrk/integrators.hpp"
#include "rrk/tableaux.hpp"

using namespace rrk;
using Rat = boost::multiprecision::cpp_rational;

namespace {

Rat frac(long n, long d) { return Rat(n) / Rat(d); }

Rat factorial(int k) {
  Rat f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// The bs85 coefficients re-entered as exact fractions.
ButcherTableau<Rat> bs85_exact() {
  using M = ButcherTableau<Rat>::MatrixType;
  M A = M::Zero(8, 8);
  A(1, 0) = frac(1, 6);
  A(2, 0) = frac(2, 27);
  A(2, 1) = frac(4, 27);
  A(3, 0) = frac(183, 1372);
  A(3, 1) = frac(-162, 343);
  A(3, 2) = frac(1053, 1372);
  A(4, 0) = frac(68, 297);
  A(4, 1) = frac(-4, 11);
  A(4, 2) = frac(42, 143);
  A(4, 3) = frac(1960, 3861);
  A(5, 0) = frac(597, 22528);
  A(5, 1) = frac(81, 352);
  A(5, 2) = frac(63099, 585728);
  A(5, 3) = frac(58653, 366080);
  A(5, 4) = frac(4617, 20480);
  A(6, 0) = frac(174197, 959244);
  A(6, 1) = frac(-30942, 79937);
  A(6, 2) = frac(8152137, 19744439);
  A(6, 3) = frac(666106, 1039181);
  A(6, 4) = frac(-29421, 29068);
  A(6, 5) = frac(482048, 414219);
  A(7, 0) = frac(587, 8064);
  A(7, 2) = frac(4440339, 15491840);
  A(7, 3) = frac(24353, 124800);
  A(7, 4) = frac(387, 44800);
  A(7, 5) = frac(2152, 5985);
  A(7, 6) = frac(7267, 94080);
  ButcherTableau<Rat>::VectorType b = A.row(7).transpose();
  return make_tableau<Rat>("bs85", A, b, 5);
}

// R(z) = det(I - zA + z 1 b^T) / det(I - zA).
std::complex<double> stability_by_determinants(const Tableau& t, std::complex<double> z) {
  using CM = Eigen::MatrixXcd;
  const Eigen::Index s = t.stages();
  const CM I = CM::Identity(s, s);
  const CM A = t.A.cast<std::complex<double>>();
  const CM e_bT = Eigen::VectorXcd::Ones(s) * t.b.cast<std::complex<double>>().transpose();
  return (I - z * A + z * e_bT).determinant() / (I - z * A).determinant();
}

// One dirk_step on u' = [[x, -y], [y, x]] u from (1, 0) with dt = 1 gives (Re R, Im R).
std::complex<double> stability_by_stepping(const Tableau& t, std::complex<double> z) {
  OdeProblem p;
  p.name = "dahlquist";
  p.dim = 2;
  Matrix L(2, 2);
  L << z.real(), -z.imag(), z.imag(), z.real();
  p.rhs = [L](double, const Vector& u) -> Vector { return L * u; };
  p.jacobian = [L](double, const Vector&) -> Matrix { return L; };
  Vector u0(2);
  u0 << 1.0, 0.0;
  const RkStepResult r = rk_step(p, t, 0.0, u0, 1.0);
  return {r.u_plus(0), r.u_plus(1)};
}

}  // namespace

TEST_CASE("registry exposes every method and rejects unknown names") {
  const auto names = registry_names();
  CHECK(names.size() == 10);
  for (const auto& n : names) CHECK(registry_get(n).name == n);
  try {
    (void)registry_get("rk99");
    FAIL("expected UnknownMethod");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownMethod);
  }
}

TEST_CASE("abscissae are the row sums and explicit tableaux are strictly lower triangular") {
  for (const auto& n : registry_names()) {
    const Tableau& t = registry_get(n);
    CAPTURE(n);
    CHECK((t.c - t.A.rowwise().sum()).cwiseAbs().maxCoeff() == 0.0);
    if (t.is_explicit()) {
      for (Eigen::Index i = 0; i < t.stages(); ++i)
        for (Eigen::Index j = i; j < t.stages(); ++j) CHECK(t.A(i, j) == 0.0);
    } else {
      for (Eigen::Index i = 1; i < t.stages(); ++i) CHECK(t.A(i, i) == doctest::Approx(t.A(0, 0)).epsilon(1e-15));
    }
  }
}

TEST_CASE("order conditions hold through the declared order and the next one fails") {
  for (const auto& n : registry_names()) {
    const Tableau& t = registry_get(n);
    CAPTURE(n);
    const int up_to = std::min(t.declared_order, 4);
    for (const auto& r : check_order_conditions(t, up_to)) {
      CAPTURE(r.id);
      CHECK(std::abs(r.residual) < 1e-14);
    }
  }
  // ssprk22 is exactly second order: b.c^2 = 1/2 and b.Ac = 0.
  const auto r = check_order_conditions(registry_get("ssprk22"), 3);
  CHECK(r[2].id == "3a");
  CHECK(r[2].residual == doctest::Approx(1.0 / 6.0));
  CHECK(r[3].residual == doctest::Approx(-1.0 / 6.0));
  CHECK_THROWS_AS((void)check_order_conditions(registry_get("rk44"), 5), Error);
}

TEST_CASE("stability monomials of bs85 agree with an exact-rational evaluation") {
  const ButcherTableau<Rat> exact = bs85_exact();
  const auto alpha_exact = stability_monomial_coefficients(exact);
  const auto alpha = stability_monomial_coefficients(registry_get("bs85"));
  REQUIRE(alpha.size() == 8);
  for (int k = 1; k <= 5; ++k) CHECK(alpha_exact(k - 1) == 1 / factorial(k));
  CHECK(alpha_exact(5) != 1 / factorial(6));
  for (Eigen::Index k = 0; k < 8; ++k) {
    CAPTURE(k);
    const double ref = alpha_exact(k).convert_to<double>();
    CHECK(std::abs(alpha(k) - ref) <= 1e-14 * std::max(std::abs(ref), 1e-6));
  }
}

TEST_CASE("explicit classical methods have alpha_k = 1/k! up to their order") {
  for (const char* n : {"rk44", "heun3", "ssprk33", "ssprk22"}) {
    const Tableau& t = registry_get(n);
    const auto alpha = stability_monomial_coefficients(t);
    double fact = 1.0;
    for (int k = 1; k <= t.declared_order; ++k) {
      fact *= k;
      CHECK(alpha(k - 1) == doctest::Approx(1.0 / fact).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS((void)stability_monomial_coefficients(registry_get("sdirk34")), Error);
}

TEST_CASE("DIRK stability functions match the determinant formula at 20 points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-3.0, 0.5), im(-3.0, 3.0);
  std::vector<std::complex<double>> zs;
  for (int k = 0; k < 20; ++k) zs.emplace_back(re(rng), im(rng));
  for (const char* n : {"norsett23", "sdirk34", "sdirk54"}) {
    const Tableau& t = registry_get(n);
    CAPTURE(n);
    for (const auto z : zs) {
      const auto R = stability_by_stepping(t, z);
      CHECK(std::abs(R - stability_by_determinants(t, z)) <= 1e-12 * std::max(1.0, std::abs(R)));
    }
  }
}

TEST_CASE("norsett23 stability function equals its closed form") {
  const double g = (3.0 + std::sqrt(3.0)) / 6.0;
  const Tableau& t = registry_get("norsett23");
  for (int k = 0; k < 20; ++k) {
    const std::complex<double> z(-2.0 + 0.1 * k, 1.5 - 0.15 * k);
    const auto closed = (1.0 + (1.0 - 2.0 * g) * z + (g * g - 2.0 * g + 0.5) * z * z) / ((1.0 - g * z) * (1.0 - g * z));
    CHECK(std::abs(stability_by_stepping(t, z) - closed) <= 1e-12);
  }
}
