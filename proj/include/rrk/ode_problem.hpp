#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rrk {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using RhsFunction = std::function<Vector(double t, const Vector& u)>;
using JacobianFunction = std::function<Matrix(double t, const Vector& u)>;
using ScalarFunctional = std::function<double(const Vector& u)>;
using GradientFunction = std::function<Vector(const Vector& u)>;
using ReferenceSolution = std::function<Vector(double t)>;

/// A scalar functional conserved by the flow, e.g. a Hamiltonian.
struct Invariant {
  std::string name;
  ScalarFunctional value;
  GradientFunction gradient;  // empty: central differences are used
  /// Set when value(u) = w/2 <u, u>; enables the closed-form relaxation parameter.
  std::optional<double> quadratic_weight;

  [[nodiscard]] bool is_quadratic() const noexcept { return quadratic_weight.has_value(); }
};

/// Canonical (q, p) split of the state for partitioned methods.
/// q' = dH/dp, p' = -dH/dq; both derivative callbacks take the full state.
struct CanonicalPartition {
  std::vector<Eigen::Index> q_index;
  std::vector<Eigen::Index> p_index;
  GradientFunction dH_dq;
  GradientFunction dH_dp;
  /// dH/dq independent of p and dH/dp independent of q.
  bool separable = true;
};

struct OdeProblem {
  std::string name;
  Eigen::Index dim = 0;
  RhsFunction rhs;
  std::vector<Invariant> invariants;
  ReferenceSolution analytic_solution;  // may be empty
  JacobianFunction jacobian;            // may be empty
  std::optional<CanonicalPartition> partition;
  Vector initial_state;
  double t0 = 0.0;
  /// Multiplier applied to the Euclidean error norm (sqrt(dx) for grids).
  double error_weight = 1.0;

  /// Throws UnknownInvariant.
  [[nodiscard]] const Invariant& invariant(std::string_view name) const;
  [[nodiscard]] bool has_invariant(std::string_view name) const;
  [[nodiscard]] bool has_reference() const noexcept { return static_cast<bool>(analytic_solution); }
};

/// Gradient of an invariant, falling back to central differences with
/// h_i = cbrt(eps) * max(1, |u_i|).
[[nodiscard]] Vector invariant_gradient(const Invariant& inv, const Vector& u);

/// Forward-difference Jacobian with h_k = sqrt(eps) * max(1, |u_k|).
[[nodiscard]] Matrix finite_difference_jacobian(const RhsFunction& f, double t, const Vector& u);

}  // namespace rrk
