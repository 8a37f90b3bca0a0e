#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rrk/ode_problem.hpp"

namespace rrk {

// Every factory returns an immutable problem with its default initial state.
// Canonical problems expose a (q, p) partition for symplectic Euler.

/// u1' = u1 (1 - u2), u2' = u2 (u1 - 1); H = u1 - log u1 + u2 - log u2, IC (1, 2).
/// H and its gradient raise DomainViolation for non-positive components.
[[nodiscard]] OdeProblem lotka_volterra();

enum class HenonHeilesStart { Quasiperiodic, Chaotic };

/// State (q1, q2, p1, p2).
[[nodiscard]] OdeProblem henon_heiles(HenonHeilesStart start = HenonHeilesStart::Quasiperiodic);

/// q'' = q - q^3, state (q, p), IC (1.4142, 0) just inside the separatrix.
[[nodiscard]] OdeProblem duffing();

/// u' = L u with L = [[0, -1], [1, 0]] per oscillator; count is 1 or 2.
/// The canonical pair of each oscillator is (q, p) = (u2, u1).
[[nodiscard]] OdeProblem harmonic_oscillator(int count = 1);

/// u' = |u|^-2 (-u2, u1), IC (1, 0).
[[nodiscard]] OdeProblem nonlinear_oscillator();

/// Smooth profile of a Euclidean Hamiltonian H = G(|u|^2 / 2) with g = G'.
struct EuclideanProfile {
  std::function<double(double)> G;
  std::function<double(double)> g;
};

/// u = (q, p) with q, p in R^d and f = g(|u|^2 / 2) (p, -q).
[[nodiscard]] OdeProblem euclidean_hamiltonian(const EuclideanProfile& profile, const Vector& u0);

/// 4x4 skew-symmetric system conserving |u|^2 without Euclidean Hamiltonian structure.
[[nodiscard]] OdeProblem skew_linear_system();

/// H = q^T Q q / 2 + p^T P p / 2 with Q = [[1, 1], [1, 2]], P = [[3, 2], [2, 4]].
[[nodiscard]] OdeProblem linear_hamiltonian_system();

/// Kepler problem with eccentricity e, started at perihelion with semi-major axis 1.
/// Invariants "energy" and "angular-momentum"; reference from Kepler's equation.
[[nodiscard]] OdeProblem kepler(double eccentricity = 0.5);

/// Solves E - e sin E = M by Newton's method to 1e-14.
[[nodiscard]] double solve_kepler_equation(double mean_anomaly, double eccentricity);

/// Real dense Fourier collocation derivative matrices on a periodic grid.
struct FourierOperators {
  Eigen::Index N = 0;
  double x_left = 0.0;
  double x_right = 0.0;
  Vector nodes;
  Matrix D1;
  Matrix D3;

  [[nodiscard]] double dx() const noexcept { return (x_right - x_left) / static_cast<double>(N); }
};

/// D_k has the Fourier symbol (i 2 pi m / W)^k; odd orders drop the Nyquist mode.
[[nodiscard]] Matrix fourier_derivative_matrix(Eigen::Index N, double width, int order);
[[nodiscard]] FourierOperators make_fourier_operators(Eigen::Index N, double x_left, double x_right);

struct KdvSoliton {
  double amplitude = 2.0;
  double offset = 40.0;

  [[nodiscard]] double speed() const noexcept { return amplitude / 3.0; }
};

/// u_t + (D1(u u) + u D1 u) / 3 + D3 u = 0 on a periodic grid.
/// Invariants "mass" (sum u dx) and "energy" (sum u^2 dx / 2).
[[nodiscard]] OdeProblem kdv_semidiscretization(Eigen::Index N = 256, double x_left = -20.0, double x_right = 60.0,
                                                KdvSoliton soliton = {});

/// Soliton value at (t, x) wrapped onto the periodic domain.
[[nodiscard]] double kdv_soliton(const KdvSoliton& soliton, double t, double x, double x_left, double x_right);

/// Directory holding the constants files: explicit argument, then the
/// RRK_LAB_DATA_DIR environment variable, then the compiled-in default.
[[nodiscard]] std::filesystem::path resolve_data_dir(const std::optional<std::filesystem::path>& explicit_dir = {});

/// N-body problem with state layout (q_1 .. q_N, p_1 .. p_N).
struct NBodySetup {
  OdeProblem problem;
  std::vector<std::string> names;
  std::vector<double> masses;
  int space_dim = 3;
  double gravitational_constant = 0.0;  // solar system
  double lj_epsilon = 0.0;              // argon, in problem energy units
  double lj_sigma = 0.0;
  double boltzmann = 0.0;  // problem energy units per kelvin

  [[nodiscard]] std::size_t bodies() const noexcept { return masses.size(); }
};

/// Sun (with inner planets), Jupiter, Saturn, Uranus, Neptune, Pluto.
/// Units: AU, days, solar masses. Throws MissingDataFile.
[[nodiscard]] NBodySetup outer_solar_system(const std::optional<std::filesystem::path>& data_dir = {});

/// Seven argon atoms in 2D with Lennard-Jones interactions.
/// Units: argon mass, nm, ns; temperatures in kelvin. Throws MissingDataFile.
[[nodiscard]] NBodySetup argon_crystal(const std::optional<std::filesystem::path>& data_dir = {});

/// Lennard-Jones pair potential 4 eps ((sigma/r)^12 - (sigma/r)^6).
[[nodiscard]] double lennard_jones(double r, double epsilon, double sigma);

/// Builds a problem by CLI identifier (harmonic, harmonic2, nonlinear-oscillator,
/// lotka-volterra, henon-heiles, henon-heiles-chaotic, duffing, kepler, kdv,
/// skew4, linear-hamiltonian, solar, argon).
struct ProblemParameters {
  double eccentricity = 0.5;
  Eigen::Index grid = 128;
  std::optional<std::filesystem::path> data_dir;
};
[[nodiscard]] OdeProblem make_problem(std::string_view name, const ProblemParameters& params = {});
[[nodiscard]] std::vector<std::string> problem_names();

}  // namespace rrk
