#include <cmath>
#include <numbers>

#include "rrk/errors.hpp"
#include "rrk/problems.hpp"

namespace rrk {

Matrix fourier_derivative_matrix(Eigen::Index N, double width, int order) {
  if (N < 2 || N % 2 != 0) throw Error(ErrorKind::PreconditionViolated, "Fourier grid size must be even");
  if (order < 0) throw Error(ErrorKind::PreconditionViolated, "derivative order must be non-negative");
  const double dx = width / static_cast<double>(N);
  const double two_pi_over_w = 2.0 * std::numbers::pi / width;
  const Eigen::Index half = N / 2;

  // Entry (j, l) depends only on j - l; build the generating column first.
  // Re[(i k)^d e^{i k x}] = k^d * {cos, -sin, -cos, sin}[d mod 4](k x).
  Vector column = Vector::Zero(N);
  for (Eigen::Index offset = 0; offset < N; ++offset) {
    const double x = static_cast<double>(offset) * dx;
    double sum = 0.0;
    for (Eigen::Index m = -half + 1; m <= half; ++m) {
      if (m == half && order % 2 == 1) continue;
      const double k = two_pi_over_w * static_cast<double>(m);
      const double kd = std::pow(k, order);
      const double phase = k * x;
      switch (order % 4) {
        case 0: sum += kd * std::cos(phase); break;
        case 1: sum -= kd * std::sin(phase); break;
        case 2: sum -= kd * std::cos(phase); break;
        default: sum += kd * std::sin(phase); break;
      }
    }
    column(offset) = sum / static_cast<double>(N);
  }
  Matrix D(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index l = 0; l < N; ++l) D(j, l) = column(((j - l) % N + N) % N);
  }
  return D;
}

FourierOperators make_fourier_operators(Eigen::Index N, double x_left, double x_right) {
  if (!(x_right > x_left)) throw Error(ErrorKind::PreconditionViolated, "empty periodic domain");
  FourierOperators ops;
  ops.N = N;
  ops.x_left = x_left;
  ops.x_right = x_right;
  const double width = x_right - x_left;
  ops.nodes = Vector::LinSpaced(N, x_left, x_right - width / static_cast<double>(N));
  ops.D1 = fourier_derivative_matrix(N, width, 1);
  ops.D3 = fourier_derivative_matrix(N, width, 3);
  return ops;
}

double kdv_soliton(const KdvSoliton& soliton, double t, double x, double x_left, double x_right) {
  const double width = x_right - x_left;
  double xi = x - soliton.speed() * t - soliton.offset;
  xi -= width * std::round(xi / width);  // nearest periodic image
  const double sech = 1.0 / std::cosh(std::sqrt(3.0 * soliton.amplitude) * xi / 6.0);
  return soliton.amplitude * sech * sech;
}

OdeProblem kdv_semidiscretization(Eigen::Index N, double x_left, double x_right, KdvSoliton soliton) {
  const FourierOperators ops = make_fourier_operators(N, x_left, x_right);
  const double dx = ops.dx();
  const Matrix D1 = ops.D1;
  const Matrix D3 = ops.D3;

  OdeProblem p;
  p.name = "kdv";
  p.dim = N;
  p.rhs = [D1, D3](double, const Vector& u) -> Vector {
    const Vector du = D1 * u;
    return -(D1 * u.cwiseProduct(u) + u.cwiseProduct(du)) / 3.0 - D3 * u;
  };
  p.jacobian = [D1, D3](double, const Vector& u) -> Matrix {
    const Vector du = D1 * u;
    Matrix J = 2.0 * (D1 * u.asDiagonal());
    J += u.asDiagonal() * D1;
    J.diagonal() += du;
    return -J / 3.0 - D3;
  };

  Invariant mass;
  mass.name = "mass";
  mass.value = [dx](const Vector& u) { return dx * u.sum(); };
  mass.gradient = [dx](const Vector& u) -> Vector { return Vector::Constant(u.size(), dx); };
  Invariant energy;
  energy.name = "energy";
  energy.value = [dx](const Vector& u) { return 0.5 * dx * u.squaredNorm(); };
  energy.gradient = [dx](const Vector& u) -> Vector { return dx * u; };
  energy.quadratic_weight = dx;
  p.invariants.push_back(std::move(energy));
  p.invariants.push_back(std::move(mass));

  const Vector nodes = ops.nodes;
  p.analytic_solution = [soliton, nodes, x_left, x_right](double t) -> Vector {
    Vector u(nodes.size());
    for (Eigen::Index j = 0; j < nodes.size(); ++j) u(j) = kdv_soliton(soliton, t, nodes(j), x_left, x_right);
    return u;
  };
  p.initial_state = p.analytic_solution(0.0);
  p.error_weight = std::sqrt(dx);
  return p;
}

}  // namespace rrk
