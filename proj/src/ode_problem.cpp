#include "rrk/ode_problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rrk/errors.hpp"

namespace rrk {

const Invariant& OdeProblem::invariant(std::string_view wanted) const {
  auto it = std::find_if(invariants.begin(), invariants.end(),
                         [&](const Invariant& inv) { return inv.name == wanted; });
  if (it == invariants.end()) {
    std::string known;
    for (const auto& inv : invariants) known += (known.empty() ? "" : ", ") + inv.name;
    throw Error(ErrorKind::UnknownInvariant,
                "'" + std::string(wanted) + "' is not registered on " + name + " (known: " + known + ")");
  }
  return *it;
}

bool OdeProblem::has_invariant(std::string_view wanted) const {
  return std::any_of(invariants.begin(), invariants.end(),
                     [&](const Invariant& inv) { return inv.name == wanted; });
}

Vector invariant_gradient(const Invariant& inv, const Vector& u) {
  if (inv.gradient) return inv.gradient(u);
  const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  Vector grad(u.size());
  Vector x = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double h = base * std::max(1.0, std::abs(u(i)));
    x(i) = u(i) + h;
    const double fp = inv.value(x);
    x(i) = u(i) - h;
    const double fm = inv.value(x);
    x(i) = u(i);
    grad(i) = (fp - fm) / (2.0 * h);
  }
  return grad;
}

Matrix finite_difference_jacobian(const RhsFunction& f, double t, const Vector& u) {
  const double base = std::sqrt(std::numeric_limits<double>::epsilon());
  const Vector f0 = f(t, u);
  Matrix J(f0.size(), u.size());
  Vector x = u;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double h = base * std::max(1.0, std::abs(u(k)));
    x(k) = u(k) + h;
    J.col(k) = (f(t, x) - f0) / h;
    x(k) = u(k);
  }
  return J;
}

}  // namespace rrk
