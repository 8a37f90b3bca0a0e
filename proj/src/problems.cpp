#include "rrk/problems.hpp"

#include <cmath>
#include <numbers>

#include "rrk/errors.hpp"

namespace rrk {
namespace {

Invariant half_squared_norm(std::string name = "energy", double weight = 1.0) {
  Invariant inv;
  inv.name = std::move(name);
  inv.value = [weight](const Vector& u) { return 0.5 * weight * u.squaredNorm(); };
  inv.gradient = [weight](const Vector& u) -> Vector { return weight * u; };
  inv.quadratic_weight = weight;
  return inv;
}

void require_positive(const Vector& u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!(u(i) > 0.0)) {
      throw Error(ErrorKind::DomainViolation, "Lotka-Volterra invariant needs positive components, u" +
                                                  std::to_string(i + 1) + " = " + std::to_string(u(i)));
    }
  }
}

std::vector<Eigen::Index> index_range(Eigen::Index first, Eigen::Index count) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(count));
  for (Eigen::Index k = 0; k < count; ++k) idx[static_cast<std::size_t>(k)] = first + k;
  return idx;
}

/// Rotation exp(t L) u0 for L = [[0, -1], [1, 0]] applied blockwise.
Vector rotate_pairs(const Vector& u0, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Vector u(u0.size());
  for (Eigen::Index k = 0; k + 1 < u0.size(); k += 2) {
    u(k) = c * u0(k) - s * u0(k + 1);
    u(k + 1) = s * u0(k) + c * u0(k + 1);
  }
  return u;
}

/// Reference for linear problems u' = M u via the eigendecomposition of M.
ReferenceSolution linear_reference(const Matrix& M, const Vector& u0) {
  Eigen::EigenSolver<Matrix> eig(M);
  const Eigen::MatrixXcd V = eig.eigenvectors();
  const Eigen::VectorXcd lambda = eig.eigenvalues();
  const Eigen::VectorXcd coeffs = V.partialPivLu().solve(u0.cast<std::complex<double>>());
  return [V, lambda, coeffs](double t) -> Vector {
    const Eigen::VectorXcd scaled = coeffs.cwiseProduct((lambda * t).array().exp().matrix());
    return (V * scaled).real();
  };
}

}  // namespace

OdeProblem lotka_volterra() {
  OdeProblem p;
  p.name = "lotka-volterra";
  p.dim = 2;
  p.rhs = [](double, const Vector& u) -> Vector {
    Vector f(2);
    f << u(0) * (1.0 - u(1)), u(1) * (u(0) - 1.0);
    return f;
  };
  Invariant h;
  h.name = "energy";
  h.value = [](const Vector& u) {
    require_positive(u);
    return u(0) - std::log(u(0)) + u(1) - std::log(u(1));
  };
  h.gradient = [](const Vector& u) -> Vector {
    require_positive(u);
    Vector g(2);
    g << 1.0 - 1.0 / u(0), 1.0 - 1.0 / u(1);
    return g;
  };
  p.invariants.push_back(std::move(h));
  p.initial_state = Vector(2);
  p.initial_state << 1.0, 2.0;
  return p;
}

OdeProblem henon_heiles(HenonHeilesStart start) {
  OdeProblem p;
  p.name = start == HenonHeilesStart::Quasiperiodic ? "henon-heiles" : "henon-heiles-chaotic";
  p.dim = 4;
  auto dH_dq = [](const Vector& u) -> Vector {
    Vector g(2);
    g << u(0) + 2.0 * u(0) * u(1), u(1) + u(0) * u(0) - u(1) * u(1);
    return g;
  };
  auto dH_dp = [](const Vector& u) -> Vector { return u.tail(2); };
  p.rhs = [dH_dq](double, const Vector& u) -> Vector {
    Vector f(4);
    f << u(2), u(3), -dH_dq(u);
    return f;
  };
  Invariant h;
  h.name = "energy";
  h.value = [](const Vector& u) {
    const double q1 = u(0), q2 = u(1), p1 = u(2), p2 = u(3);
    return 0.5 * (p1 * p1 + p2 * p2) + 0.5 * (q1 * q1 + q2 * q2) + q1 * q1 * q2 - q2 * q2 * q2 / 3.0;
  };
  h.gradient = [dH_dq](const Vector& u) -> Vector {
    Vector g(4);
    g << dH_dq(u), u(2), u(3);
    return g;
  };
  p.invariants.push_back(std::move(h));
  p.partition = CanonicalPartition{{0, 1}, {2, 3}, dH_dq, dH_dp, true};
  p.initial_state = Vector::Constant(4, 0.12);
  if (start == HenonHeilesStart::Chaotic) p.initial_state(2) = std::sqrt(2.0) * std::sqrt(0.15925);
  return p;
}

OdeProblem duffing() {
  OdeProblem p;
  p.name = "duffing";
  p.dim = 2;
  p.rhs = [](double, const Vector& u) -> Vector {
    Vector f(2);
    f << u(1), u(0) - u(0) * u(0) * u(0);
    return f;
  };
  auto dH_dq = [](const Vector& u) -> Vector { return Vector::Constant(1, -u(0) + u(0) * u(0) * u(0)); };
  auto dH_dp = [](const Vector& u) -> Vector { return Vector::Constant(1, u(1)); };
  Invariant h;
  h.name = "energy";
  h.value = [](const Vector& u) {
    const double q2 = u(0) * u(0);
    return 0.5 * u(1) * u(1) - 0.5 * q2 + 0.25 * q2 * q2;
  };
  h.gradient = [](const Vector& u) -> Vector {
    Vector g(2);
    g << -u(0) + u(0) * u(0) * u(0), u(1);
    return g;
  };
  p.invariants.push_back(std::move(h));
  p.partition = CanonicalPartition{{0}, {1}, dH_dq, dH_dp, true};
  p.initial_state = Vector(2);
  p.initial_state << 1.4142, 0.0;
  return p;
}

OdeProblem harmonic_oscillator(int count) {
  if (count != 1 && count != 2) {
    throw Error(ErrorKind::PreconditionViolated, "harmonic oscillator count must be 1 or 2");
  }
  OdeProblem p;
  p.name = count == 1 ? "harmonic" : "harmonic2";
  p.dim = 2 * count;
  p.rhs = [](double, const Vector& u) -> Vector {
    Vector f(u.size());
    for (Eigen::Index k = 0; k + 1 < u.size(); k += 2) {
      f(k) = -u(k + 1);
      f(k + 1) = u(k);
    }
    return f;
  };
  p.jacobian = [](double, const Vector& u) -> Matrix {
    Matrix J = Matrix::Zero(u.size(), u.size());
    for (Eigen::Index k = 0; k + 1 < u.size(); k += 2) {
      J(k, k + 1) = -1.0;
      J(k + 1, k) = 1.0;
    }
    return J;
  };
  p.invariants.push_back(half_squared_norm());
  std::vector<Eigen::Index> q_idx, p_idx;
  for (Eigen::Index k = 0; k < p.dim; k += 2) {
    p_idx.push_back(k);
    q_idx.push_back(k + 1);
  }
  p.partition = CanonicalPartition{q_idx, p_idx, [q_idx](const Vector& u) -> Vector { return u(q_idx); },
                                   [p_idx](const Vector& u) -> Vector { return u(p_idx); }, true};
  p.initial_state = Vector(p.dim);
  if (count == 1) {
    p.initial_state << 1.0, 0.0;
  } else {
    p.initial_state << 1.0, 0.0, 0.5, 0.5;
  }
  const Vector u0 = p.initial_state;
  p.analytic_solution = [u0](double t) { return rotate_pairs(u0, t); };
  return p;
}

OdeProblem nonlinear_oscillator() {
  OdeProblem p;
  p.name = "nonlinear-oscillator";
  p.dim = 2;
  auto inv_norm2 = [](const Vector& u) {
    const double r2 = u.squaredNorm();
    if (!(r2 > 0.0)) throw Error(ErrorKind::DomainViolation, "nonlinear oscillator is singular at u = 0");
    return 1.0 / r2;
  };
  p.rhs = [inv_norm2](double, const Vector& u) -> Vector {
    const double w = inv_norm2(u);
    Vector f(2);
    f << -w * u(1), w * u(0);
    return f;
  };
  p.invariants.push_back(half_squared_norm());
  // H = log(|u|^2 / 2) / 2 generates the same flow with (q, p) = (u2, u1).
  p.partition = CanonicalPartition{{1},
                                   {0},
                                   [inv_norm2](const Vector& u) -> Vector { return Vector::Constant(1, inv_norm2(u) * u(1)); },
                                   [inv_norm2](const Vector& u) -> Vector { return Vector::Constant(1, inv_norm2(u) * u(0)); },
                                   false};
  p.initial_state = Vector(2);
  p.initial_state << 1.0, 0.0;
  const Vector u0 = p.initial_state;
  const double omega = 1.0 / u0.squaredNorm();
  p.analytic_solution = [u0, omega](double t) { return rotate_pairs(u0, omega * t); };
  return p;
}

OdeProblem euclidean_hamiltonian(const EuclideanProfile& profile, const Vector& u0) {
  if (u0.size() % 2 != 0 || u0.size() == 0) {
    throw Error(ErrorKind::PreconditionViolated, "Euclidean Hamiltonian needs an even-dimensional state");
  }
  const Eigen::Index d = u0.size() / 2;
  OdeProblem p;
  p.name = "euclidean-hamiltonian";
  p.dim = u0.size();
  auto g = profile.g;
  auto G = profile.G;
  p.rhs = [g, d](double, const Vector& u) -> Vector {
    const double scale = g(0.5 * u.squaredNorm());
    Vector f(u.size());
    f.head(d) = scale * u.tail(d);
    f.tail(d) = -scale * u.head(d);
    return f;
  };
  Invariant h;
  h.name = "energy";
  h.value = [G](const Vector& u) { return G(0.5 * u.squaredNorm()); };
  h.gradient = [g](const Vector& u) -> Vector { return g(0.5 * u.squaredNorm()) * u; };
  p.invariants.push_back(std::move(h));
  p.invariants.push_back(half_squared_norm("norm"));
  p.partition = CanonicalPartition{index_range(0, d), index_range(d, d),
                                   [g, d](const Vector& u) -> Vector { return g(0.5 * u.squaredNorm()) * u.head(d); },
                                   [g, d](const Vector& u) -> Vector { return g(0.5 * u.squaredNorm()) * u.tail(d); },
                                   false};
  p.initial_state = u0;
  // H is conserved, so the flow is the linear rotation with frequency g(|u0|^2 / 2).
  const double omega = g(0.5 * u0.squaredNorm());
  p.analytic_solution = [u0, omega, d](double t) -> Vector {
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    Vector u(u0.size());
    u.head(d) = c * u0.head(d) + s * u0.tail(d);
    u.tail(d) = c * u0.tail(d) - s * u0.head(d);
    return u;
  };
  return p;
}

OdeProblem skew_linear_system() {
  Matrix L(4, 4);
  L << 0, 0, -1, -1,
       0, 0, 0, -1,
       1, 0, 0, -1,
       1, 1, 1, 0;
  OdeProblem p;
  p.name = "skew4";
  p.dim = 4;
  p.rhs = [L](double, const Vector& u) -> Vector { return L * u; };
  p.jacobian = [L](double, const Vector&) -> Matrix { return L; };
  p.invariants.push_back(half_squared_norm());
  p.initial_state = Vector::Unit(4, 0);
  p.analytic_solution = linear_reference(L, p.initial_state);
  return p;
}

OdeProblem linear_hamiltonian_system() {
  Matrix Q(2, 2), P(2, 2);
  Q << 1, 1, 1, 2;
  P << 3, 2, 2, 4;
  Matrix M = Matrix::Zero(4, 4);
  M.topRightCorner(2, 2) = P;
  M.bottomLeftCorner(2, 2) = -Q;
  OdeProblem p;
  p.name = "linear-hamiltonian";
  p.dim = 4;
  p.rhs = [M](double, const Vector& u) -> Vector { return M * u; };
  p.jacobian = [M](double, const Vector&) -> Matrix { return M; };
  Invariant h;
  h.name = "energy";
  h.value = [Q, P](const Vector& u) {
    return 0.5 * u.head(2).dot(Q * u.head(2)) + 0.5 * u.tail(2).dot(P * u.tail(2));
  };
  h.gradient = [Q, P](const Vector& u) -> Vector {
    Vector g(4);
    g << Q * u.head(2), P * u.tail(2);
    return g;
  };
  p.invariants.push_back(std::move(h));
  p.partition = CanonicalPartition{{0, 1}, {2, 3}, [Q](const Vector& u) -> Vector { return Q * u.head(2); },
                                   [P](const Vector& u) -> Vector { return P * u.tail(2); }, true};
  p.initial_state = Vector::Unit(4, 0);
  p.analytic_solution = linear_reference(M, p.initial_state);
  return p;
}

double solve_kepler_equation(double mean_anomaly, double eccentricity) {
  const double M = std::remainder(mean_anomaly, 2.0 * std::numbers::pi);
  double E = eccentricity < 0.8 ? M : std::numbers::pi * (M < 0 ? -1.0 : 1.0);
  for (int it = 0; it < 100; ++it) {
    const double step = (E - eccentricity * std::sin(E) - M) / (1.0 - eccentricity * std::cos(E));
    E -= step;
    if (std::abs(step) <= 1e-14) break;
  }
  return E + (mean_anomaly - M);
}

OdeProblem kepler(double eccentricity) {
  if (!(eccentricity >= 0.0 && eccentricity < 1.0)) {
    throw Error(ErrorKind::PreconditionViolated, "Kepler eccentricity must lie in [0, 1)");
  }
  const double e = eccentricity;
  auto check = [](const Vector& u) {
    const double r2 = u(0) * u(0) + u(1) * u(1);
    if (!(r2 > 0.0)) throw Error(ErrorKind::DomainViolation, "Kepler problem is singular at q = 0");
    return r2;
  };
  auto dH_dq = [check](const Vector& u) -> Vector {
    const double r2 = check(u);
    const double r3 = r2 * std::sqrt(r2);
    return u.head(2) / r3;
  };
  auto dH_dp = [](const Vector& u) -> Vector { return u.tail(2); };

  OdeProblem p;
  p.name = "kepler";
  p.dim = 4;
  p.rhs = [dH_dq](double, const Vector& u) -> Vector {
    Vector f(4);
    f << u(2), u(3), -dH_dq(u);
    return f;
  };
  Invariant h;
  h.name = "energy";
  h.value = [check](const Vector& u) { return 0.5 * u.tail(2).squaredNorm() - 1.0 / std::sqrt(check(u)); };
  h.gradient = [dH_dq](const Vector& u) -> Vector {
    Vector g(4);
    g << dH_dq(u), u(2), u(3);
    return g;
  };
  Invariant l;
  l.name = "angular-momentum";
  l.value = [](const Vector& u) { return u(0) * u(3) - u(1) * u(2); };
  l.gradient = [](const Vector& u) -> Vector {
    Vector g(4);
    g << u(3), -u(2), -u(1), u(0);
    return g;
  };
  p.invariants.push_back(std::move(h));
  p.invariants.push_back(std::move(l));
  p.partition = CanonicalPartition{{0, 1}, {2, 3}, dH_dq, dH_dp, true};
  p.initial_state = Vector(4);
  p.initial_state << 1.0 - e, 0.0, 0.0, std::sqrt((1.0 + e) / (1.0 - e));
  // Semi-major axis 1, mean motion 1, perihelion at t = 0.
  const double b = std::sqrt(1.0 - e * e);
  p.analytic_solution = [e, b](double t) -> Vector {
    const double E = solve_kepler_equation(t, e);
    const double cE = std::cos(E);
    const double sE = std::sin(E);
    const double Edot = 1.0 / (1.0 - e * cE);
    Vector u(4);
    u << cE - e, b * sE, -sE * Edot, b * cE * Edot;
    return u;
  };
  return p;
}

std::vector<std::string> problem_names() {
  return {"harmonic", "harmonic2", "nonlinear-oscillator", "lotka-volterra", "henon-heiles",
          "henon-heiles-chaotic", "duffing", "kepler", "kdv", "skew4", "linear-hamiltonian", "solar", "argon"};
}

OdeProblem make_problem(std::string_view name, const ProblemParameters& params) {
  if (name == "harmonic") return harmonic_oscillator(1);
  if (name == "harmonic2") return harmonic_oscillator(2);
  if (name == "nonlinear-oscillator") return nonlinear_oscillator();
  if (name == "lotka-volterra") return lotka_volterra();
  if (name == "henon-heiles") return henon_heiles(HenonHeilesStart::Quasiperiodic);
  if (name == "henon-heiles-chaotic") return henon_heiles(HenonHeilesStart::Chaotic);
  if (name == "duffing") return duffing();
  if (name == "kepler") return kepler(params.eccentricity);
  if (name == "kdv") return kdv_semidiscretization(params.grid);
  if (name == "skew4") return skew_linear_system();
  if (name == "linear-hamiltonian") return linear_hamiltonian_system();
  if (name == "solar") return outer_solar_system(params.data_dir).problem;
  if (name == "argon") return argon_crystal(params.data_dir).problem;
  std::string known;
  for (const auto& n : problem_names()) known += (known.empty() ? "" : ", ") + n;
  throw Error(ErrorKind::ConfigError, "unknown problem '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace rrk
