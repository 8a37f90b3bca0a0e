#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

#include "rrk/errors.hpp"

namespace rrk {

enum class TableauKind { Explicit, DiagonallyImplicit };

/// Butcher tableau (A, b, c) of an s-stage Runge-Kutta method.
///
/// The abscissae follow the row-sum convention c_i = sum_j a_ij.
template <typename Scalar>
struct ButcherTableau {
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::string name;
  MatrixType A;
  VectorType b;
  VectorType c;
  int declared_order = 1;
  TableauKind kind = TableauKind::Explicit;

  [[nodiscard]] Eigen::Index stages() const noexcept { return b.size(); }
  [[nodiscard]] bool is_explicit() const noexcept { return kind == TableauKind::Explicit; }
};

using Tableau = ButcherTableau<double>;

/// Builds a tableau, filling c from the row sums of A and classifying it.
template <typename Scalar>
ButcherTableau<Scalar> make_tableau(std::string name,
                                    typename ButcherTableau<Scalar>::MatrixType A,
                                    typename ButcherTableau<Scalar>::VectorType b,
                                    int declared_order) {
  ButcherTableau<Scalar> t;
  t.name = std::move(name);
  t.c = A.rowwise().sum();
  bool has_diagonal = false;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (A(i, i) != Scalar(0)) has_diagonal = true;
  }
  t.kind = has_diagonal ? TableauKind::DiagonallyImplicit : TableauKind::Explicit;
  t.A = std::move(A);
  t.b = std::move(b);
  t.declared_order = declared_order;
  return t;
}

/// Returns a registered tableau by its CLI name (rk44, ssprk22, ...).
/// Throws UnknownMethod for anything else.
[[nodiscard]] const Tableau& registry_get(std::string_view name);

/// Names of all registered methods, in registration order.
[[nodiscard]] std::vector<std::string> registry_names();

struct OrderConditionResidual {
  std::string id;  // "1", "2", "3a", "3b", "4a" ... "4d"
  int order = 0;
  double residual = 0.0;  // elementary weight minus 1/gamma(t)
};

/// Residuals of the Butcher order conditions through order up_to (1..4).
[[nodiscard]] std::vector<OrderConditionResidual> check_order_conditions(const Tableau& t, int up_to);

/// alpha_k = b^T A^{k-1} 1 for k = 1..s, the monomial coefficients of the
/// stability polynomial R(z) = 1 + sum_k alpha_k z^k.
template <typename Scalar>
typename ButcherTableau<Scalar>::VectorType stability_monomial_coefficients(
    const ButcherTableau<Scalar>& t) {
  if (!t.is_explicit()) {
    throw Error(ErrorKind::NotExplicit, "stability polynomial requested for implicit tableau " + t.name);
  }
  const Eigen::Index s = t.stages();
  typename ButcherTableau<Scalar>::VectorType alpha(s);
  typename ButcherTableau<Scalar>::VectorType v =
      ButcherTableau<Scalar>::VectorType::Ones(s);
  for (Eigen::Index k = 0; k < s; ++k) {
    alpha(k) = t.b.dot(v);
    v = t.A.lazyProduct(v).eval();  // avoids the scalar operator* overload for multiprecision types
  }
  return alpha;
}

}  // namespace rrk
