#include "rrk/tableaux.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rrk {
namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

Tableau ssprk22() {
  Mat A = Mat::Zero(2, 2);
  A(1, 0) = 1.0;
  Vec b(2);
  b << 0.5, 0.5;
  return make_tableau<double>("ssprk22", A, b, 2);
}

// Shu & Osher (1988).
Tableau ssprk33() {
  Mat A = Mat::Zero(3, 3);
  A(1, 0) = 1.0;
  A(2, 0) = 0.25;
  A(2, 1) = 0.25;
  Vec b(3);
  b << 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0;
  return make_tableau<double>("ssprk33", A, b, 3);
}

// Heun (1900), third order.
Tableau heun3() {
  Mat A = Mat::Zero(3, 3);
  A(1, 0) = 1.0 / 3.0;
  A(2, 1) = 2.0 / 3.0;
  Vec b(3);
  b << 0.25, 0.0, 0.75;
  return make_tableau<double>("heun3", A, b, 3);
}

// Classical method of Kutta (1901).
Tableau rk44() {
  Mat A = Mat::Zero(4, 4);
  A(1, 0) = 0.5;
  A(2, 1) = 0.5;
  A(3, 2) = 1.0;
  Vec b(4);
  b << 1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0;
  return make_tableau<double>("rk44", A, b, 4);
}

// Fehlberg (1969), Table III: the five-stage fourth-order member of RK4(5).
Tableau fehlberg4() {
  Mat A = Mat::Zero(5, 5);
  A(1, 0) = 1.0 / 4.0;
  A(2, 0) = 3.0 / 32.0;
  A(2, 1) = 9.0 / 32.0;
  A(3, 0) = 1932.0 / 2197.0;
  A(3, 1) = -7200.0 / 2197.0;
  A(3, 2) = 7296.0 / 2197.0;
  A(4, 0) = 439.0 / 216.0;
  A(4, 1) = -8.0;
  A(4, 2) = 3680.0 / 513.0;
  A(4, 3) = -845.0 / 4104.0;
  Vec b(5);
  b << 25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0;
  return make_tableau<double>("fehlberg4", A, b, 4);
}

// Dormand & Prince (1980), fifth-order propagating solution, 7 stages (FSAL).
Tableau dp75() {
  Mat A = Mat::Zero(7, 7);
  A(1, 0) = 1.0 / 5.0;
  A(2, 0) = 3.0 / 40.0;
  A(2, 1) = 9.0 / 40.0;
  A(3, 0) = 44.0 / 45.0;
  A(3, 1) = -56.0 / 15.0;
  A(3, 2) = 32.0 / 9.0;
  A(4, 0) = 19372.0 / 6561.0;
  A(4, 1) = -25360.0 / 2187.0;
  A(4, 2) = 64448.0 / 6561.0;
  A(4, 3) = -212.0 / 729.0;
  A(5, 0) = 9017.0 / 3168.0;
  A(5, 1) = -355.0 / 33.0;
  A(5, 2) = 46732.0 / 5247.0;
  A(5, 3) = 49.0 / 176.0;
  A(5, 4) = -5103.0 / 18656.0;
  A(6, 0) = 35.0 / 384.0;
  A(6, 2) = 500.0 / 1113.0;
  A(6, 3) = 125.0 / 192.0;
  A(6, 4) = -2187.0 / 6784.0;
  A(6, 5) = 11.0 / 84.0;
  Vec b(7);
  b << 35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0;
  return make_tableau<double>("dp75", A, b, 5);
}

// Bogacki & Shampine (1996), fifth-order solution of the 5(4) pair, 8 stages.
Tableau bs85() {
  Mat A = Mat::Zero(8, 8);
  A(1, 0) = 1.0 / 6.0;
  A(2, 0) = 2.0 / 27.0;
  A(2, 1) = 4.0 / 27.0;
  A(3, 0) = 183.0 / 1372.0;
  A(3, 1) = -162.0 / 343.0;
  A(3, 2) = 1053.0 / 1372.0;
  A(4, 0) = 68.0 / 297.0;
  A(4, 1) = -4.0 / 11.0;
  A(4, 2) = 42.0 / 143.0;
  A(4, 3) = 1960.0 / 3861.0;
  A(5, 0) = 597.0 / 22528.0;
  A(5, 1) = 81.0 / 352.0;
  A(5, 2) = 63099.0 / 585728.0;
  A(5, 3) = 58653.0 / 366080.0;
  A(5, 4) = 4617.0 / 20480.0;
  A(6, 0) = 174197.0 / 959244.0;
  A(6, 1) = -30942.0 / 79937.0;
  A(6, 2) = 8152137.0 / 19744439.0;
  A(6, 3) = 666106.0 / 1039181.0;
  A(6, 4) = -29421.0 / 29068.0;
  A(6, 5) = 482048.0 / 414219.0;
  A(7, 0) = 587.0 / 8064.0;
  A(7, 2) = 4440339.0 / 15491840.0;
  A(7, 3) = 24353.0 / 124800.0;
  A(7, 4) = 387.0 / 44800.0;
  A(7, 5) = 2152.0 / 5985.0;
  A(7, 6) = 7267.0 / 94080.0;
  Vec b = A.row(7).transpose();
  return make_tableau<double>("bs85", A, b, 5);
}

// Norsett (1974), two-stage SDIRK of order 3 with gamma = (3 + sqrt 3) / 6.
Tableau norsett23() {
  const double g = (3.0 + std::sqrt(3.0)) / 6.0;
  Mat A = Mat::Zero(2, 2);
  A(0, 0) = g;
  A(1, 0) = 1.0 - 2.0 * g;
  A(1, 1) = g;
  Vec b(2);
  b << 0.5, 0.5;
  return make_tableau<double>("norsett23", A, b, 3);
}

// Three-stage fourth-order SDIRK (Crouzeix; Norsett):
// gamma = 1/2 + cos(pi/18)/sqrt(3), delta = 1 / (6 (2 gamma - 1)^2).
Tableau sdirk34() {
  const double g = 0.5 + std::cos(std::numbers::pi / 18.0) / std::sqrt(3.0);
  const double delta = 1.0 / (6.0 * (2.0 * g - 1.0) * (2.0 * g - 1.0));
  Mat A = Mat::Zero(3, 3);
  A(0, 0) = g;
  A(1, 0) = 0.5 - g;
  A(1, 1) = g;
  A(2, 0) = 2.0 * g;
  A(2, 1) = 1.0 - 4.0 * g;
  A(2, 2) = g;
  Vec b(3);
  b << delta, 1.0 - 2.0 * delta, delta;
  return make_tableau<double>("sdirk34", A, b, 4);
}

// Five-stage L-stable SDIRK of order 4 with gamma = 1/4 (Hairer & Wanner).
Tableau sdirk54() {
  Mat A = Mat::Zero(5, 5);
  A(0, 0) = 1.0 / 4.0;
  A(1, 0) = 1.0 / 2.0;
  A(1, 1) = 1.0 / 4.0;
  A(2, 0) = 17.0 / 50.0;
  A(2, 1) = -1.0 / 25.0;
  A(2, 2) = 1.0 / 4.0;
  A(3, 0) = 371.0 / 1360.0;
  A(3, 1) = -137.0 / 2720.0;
  A(3, 2) = 15.0 / 544.0;
  A(3, 3) = 1.0 / 4.0;
  A(4, 0) = 25.0 / 24.0;
  A(4, 1) = -49.0 / 48.0;
  A(4, 2) = 125.0 / 16.0;
  A(4, 3) = -85.0 / 12.0;
  A(4, 4) = 1.0 / 4.0;
  Vec b = A.row(4).transpose();
  return make_tableau<double>("sdirk54", A, b, 4);
}

const std::vector<Tableau>& registry() {
  static const std::vector<Tableau> methods = {
      rk44(), ssprk22(), ssprk33(), heun3(), fehlberg4(),
      dp75(), bs85(), norsett23(), sdirk34(), sdirk54(),
  };
  return methods;
}

}  // namespace

const Tableau& registry_get(std::string_view name) {
  const auto& methods = registry();
  auto it = std::find_if(methods.begin(), methods.end(),
                         [&](const Tableau& t) { return t.name == name; });
  if (it == methods.end()) {
    std::string known;
    for (const auto& t : methods) known += (known.empty() ? "" : ", ") + t.name;
    throw Error(ErrorKind::UnknownMethod, "'" + std::string(name) + "' (known: " + known + ")");
  }
  return *it;
}

std::vector<std::string> registry_names() {
  std::vector<std::string> names;
  for (const auto& t : registry()) names.push_back(t.name);
  return names;
}

std::vector<OrderConditionResidual> check_order_conditions(const Tableau& t, int up_to) {
  if (up_to < 1 || up_to > 4) {
    throw Error(ErrorKind::PreconditionViolated, "order conditions are available for orders 1..4");
  }
  const Eigen::VectorXd& b = t.b;
  const Eigen::VectorXd& c = t.c;
  const Eigen::MatrixXd& A = t.A;
  const Eigen::VectorXd c2 = c.array().square();
  const Eigen::VectorXd Ac = A * c;

  std::vector<OrderConditionResidual> out;
  auto add = [&](const char* id, int order, double value, double target) {
    if (order <= up_to) out.push_back({id, order, value - target});
  };
  add("1", 1, b.sum(), 1.0);
  add("2", 2, b.dot(c), 1.0 / 2.0);
  add("3a", 3, b.dot(c2), 1.0 / 3.0);
  add("3b", 3, b.dot(Ac), 1.0 / 6.0);
  add("4a", 4, b.dot(c.cwiseProduct(c2)), 1.0 / 4.0);
  add("4b", 4, b.dot(c.cwiseProduct(Ac)), 1.0 / 8.0);
  add("4c", 4, b.dot(A * c2), 1.0 / 12.0);
  add("4d", 4, b.dot(A * Ac), 1.0 / 24.0);
  return out;
}

}  // namespace rrk
